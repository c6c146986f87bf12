#pragma once

#include <cmath>
#include <vector>

#include "steinflow/core.hpp"

namespace steinflow {

struct EigenSym {
    Vector values;   // ascending
    Matrix vectors;  // columns
};

// Cyclic-threshold Jacobi for symmetric matrices. Deterministic sweep order,
// no pivot search, so results are reproducible bit-for-bit.
inline EigenSym jacobi_eigen_sym(Matrix a, int max_sweeps = 64) {
    const Eigen::Index n = a.rows();
    require(a.cols() == n, "jacobi_eigen_sym: matrix must be square");
    Matrix v = Matrix::Identity(n, n);
    if (n == 1) return {Vector::Constant(1, a(0, 0)), v};

    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-14 * scale * static_cast<double>(n)) break;

        const double thresh = (sweep < 3) ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq * apq <= thresh) continue;
                const double app = a(p, p), aqq = a(q, q);
                if (std::abs(apq) <= 1e-18 * scale) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    Vector values(n);
    for (Eigen::Index i = 0; i < n; ++i) values(i) = a(i, i);
    // sort ascending, permuting the eigenvector columns along
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index l, Eigen::Index r) { return values(l) < values(r); });
    Vector sorted(n);
    Matrix vsorted(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sorted(i) = values(order[static_cast<std::size_t>(i)]);
        vsorted.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return {sorted, vsorted};
}

// Symmetric PSD square root through the Jacobi eigendecomposition.
// Eigenvalues in [-clamp_tol, 0) are treated as round-off and clamped to 0.
inline Matrix sym_sqrt_psd(const Matrix& g, double clamp_tol = 1e-10) {
    const Eigen::Index n = g.rows();
    require(g.cols() == n, "sym_sqrt_psd: matrix must be square");
    const double scale = std::max(g.cwiseAbs().maxCoeff(), 1.0);
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw InvalidInputError("sym_sqrt_psd: input is not symmetric");

    EigenSym es = jacobi_eigen_sym(g);
    Vector roots(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double lam = es.values(i);
        if (lam < 0.0) {
            if (lam < -clamp_tol * scale)
                throw InvalidInputError("sym_sqrt_psd: eigenvalue below PSD tolerance");
            lam = 0.0;
        }
        roots(i) = std::sqrt(lam);
    }
    Matrix s = es.vectors * roots.asDiagonal() * es.vectors.transpose();
    return 0.5 * (s + s.transpose());
}

}  // namespace steinflow
