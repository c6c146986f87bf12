#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "steinflow/core.hpp"
#include "steinflow/kernels.hpp"
#include "steinflow/targets.hpp"

namespace steinflow {

// Exact W1 between 1D empirical measures via quantile coupling. Unequal
// sample sizes integrate |F_a^{-1} - F_b^{-1}| over the merged weight
// partition with integer bookkeeping, so the result is exact.
inline double w1_1d(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), "w1_1d: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size(), m = b.size();
    if (n == m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
        return acc / static_cast<double>(n);
    }
    // each a-atom spans m units of mass 1/(n*m), each b-atom spans n units
    double acc = 0.0;
    std::size_t ia = 0, ib = 0;
    long long ra = static_cast<long long>(m), rb = static_cast<long long>(n);
    while (ia < n && ib < m) {
        const long long s = std::min(ra, rb);
        acc += static_cast<double>(s) * std::abs(a[ia] - b[ib]);
        ra -= s;
        rb -= s;
        if (ra == 0) {
            ++ia;
            ra = static_cast<long long>(m);
        }
        if (rb == 0) {
            ++ib;
            rb = static_cast<long long>(n);
        }
    }
    return acc / static_cast<double>(n) / static_cast<double>(m);
}

inline double w1_1d(const Matrix& a, const Matrix& b) {
    require(a.cols() == 1 && b.cols() == 1, "w1_1d: 1D samples expected");
    std::vector<double> av(a.data(), a.data() + a.rows());
    std::vector<double> bv(b.data(), b.data() + b.rows());
    return w1_1d(std::move(av), std::move(bv));
}

namespace detail {

// Shortest-augmenting-path assignment (Jonker-Volgenant style), O(n^3).
inline double solve_assignment(const Matrix& cost) {
    const Eigen::Index n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<Eigen::Index> match(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Eigen::Index> way(static_cast<std::size_t>(n) + 1, 0);
    for (Eigen::Index i = 1; i <= n; ++i) {
        match[0] = i;
        Eigen::Index j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const Eigen::Index i0 = match[static_cast<std::size_t>(j0)];
            double delta = inf;
            Eigen::Index j1 = -1;
            for (Eigen::Index j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (Eigen::Index j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (Eigen::Index j = 1; j <= n; ++j)
        total += cost(match[static_cast<std::size_t>(j)] - 1, j - 1);
    return total;
}

}  // namespace detail

// Exact W1 between equal-size empirical measures in any dimension:
// minimum-cost perfect matching on the Euclidean cost matrix, divided by n.
inline double w1_assignment(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows(), "w1_assignment: sample sizes must match");
    require(a.cols() == b.cols(), "w1_assignment: dimension mismatch");
    require(a.rows() >= 1 && a.rows() <= 2048, "w1_assignment: size must be in [1, 2048]");
    const Eigen::Index n = a.rows();
    Matrix cost(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
    return detail::solve_assignment(cost) / static_cast<double>(n);
}

struct SinkhornResult {
    double cost = 0.0;   // transport cost of the rounded feasible plan
    int iterations = 0;
    bool converged = false;
};

// Entropic OT with Euclidean cost and log-domain iterations; the returned
// value is the cost under the plan rounded onto the feasibility polytope,
// hence always >= 0 and an upper-bound-flavoured estimate of W1.
inline SinkhornResult w1_sinkhorn(const Matrix& a, const Matrix& b, double epsilon,
                                  int max_iters = 2000, double marginal_tol = 1e-10) {
    require(epsilon > 0.0, "w1_sinkhorn: epsilon must be positive");
    require(a.rows() >= 1 && b.rows() >= 1, "w1_sinkhorn: empty input");
    require(a.cols() == b.cols(), "w1_sinkhorn: dimension mismatch");
    const Eigen::Index n = a.rows(), m = b.rows();
    Matrix cost(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();

    const double log_mu = -std::log(static_cast<double>(n));
    const double log_nu = -std::log(static_cast<double>(m));
    Vector f = Vector::Zero(n), g = Vector::Zero(m);
    auto lse_row = [&](Eigen::Index i) {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < m; ++j)
            best = std::max(best, (g(j) - cost(i, j)) / epsilon + log_nu);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < m; ++j)
            acc += std::exp((g(j) - cost(i, j)) / epsilon + log_nu - best);
        return best + std::log(acc);
    };
    auto lse_col = [&](Eigen::Index j) {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i)
            best = std::max(best, (f(i) - cost(i, j)) / epsilon + log_mu);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            acc += std::exp((f(i) - cost(i, j)) / epsilon + log_mu - best);
        return best + std::log(acc);
    };

    SinkhornResult result;
    for (int it = 0; it < max_iters; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) f(i) = -epsilon * lse_row(i);
        for (Eigen::Index j = 0; j < m; ++j) g(j) = -epsilon * lse_col(j);
        result.iterations = it + 1;
        if (it % 10 != 9 && it + 1 != max_iters) continue;
        // after the g-update columns are exact; check row marginals
        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double row = std::exp((f(i) + epsilon * lse_row(i)) / epsilon + log_mu);
            err += std::abs(row - std::exp(log_mu));
        }
        if (err < marginal_tol) {
            result.converged = true;
            break;
        }
    }

    Matrix plan(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            plan(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / epsilon + log_mu + log_nu);

    // round onto the transport polytope: scale rows, then columns, then
    // spread the remaining deficit as a rank-one correction
    const double mu = std::exp(log_mu), nu = std::exp(log_nu);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = plan.row(i).sum();
        if (r > mu) plan.row(i) *= mu / r;
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        const double c = plan.col(j).sum();
        if (c > nu) plan.col(j) *= nu / c;
    }
    Vector err_r = Vector::Constant(n, mu) - plan.rowwise().sum();
    Vector err_c = Vector::Constant(m, nu) - plan.colwise().sum().transpose();
    const double deficit = err_r.sum();
    if (deficit > 1e-300) plan += (err_r * err_c.transpose()) / deficit;

    result.cost = (plan.array() * cost.array()).sum();
    return result;
}

// ---------------------------------------------------------------------------

struct SteinFisherEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// U-statistic estimate of the Stein-Fisher information using the kernelized
// Stein kernel
//   kappa(y,z) = gradV(y).gradV(z) k(y,z) - gradV(y).grad1 k(z,y)
//              - gradV(z).grad1 k(y,z) + tr(grad1 grad2 k(y,z)),
// averaged over ordered pairs i != j. Diagonal terms are excluded by default,
// which is required for kernels whose second derivatives do not exist there;
// include_diagonal switches to the V-statistic for smooth kernels.
inline SteinFisherEstimate stein_fisher_detail(const Matrix& positions, const KernelSpec& k,
                                               const TargetModel& t,
                                               bool include_diagonal = false) {
    const Eigen::Index n = positions.rows();
    require(n >= 2, "stein_fisher: need at least two samples");
    require(positions.cols() == t.dim(), "stein_fisher: dimension mismatch");
    const Eigen::Index d = positions.cols();

    Matrix grads(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        grads.row(i) = t.grad_potential(positions.row(i).transpose()).transpose();

    Vector row_sum = Vector::Zero(n);
    double total = 0.0, total_sq = 0.0;
    RowVec gyz(d), gzy(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double kv = eval_and_grad1(k, positions.row(i), positions.row(j), gyz);
            eval_and_grad1(k, positions.row(j), positions.row(i), gzy);
            const double kappa = grads.row(i).dot(grads.row(j)) * kv -
                                 grads.row(i).dot(gzy) - grads.row(j).dot(gyz) +
                                 cross_derivative_trace(k, positions.row(i).transpose(),
                                                        positions.row(j).transpose());
            total += kappa;
            total_sq += kappa * kappa;
            row_sum(i) += kappa;
            row_sum(j) += kappa;
        }
    }
    double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    double value = total / pairs;
    if (include_diagonal) {
        double diag = 0.0;
        RowVec gd(d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double kv = eval_and_grad1(k, positions.row(i), positions.row(i), gd);
            diag += grads.row(i).squaredNorm() * kv - 2.0 * grads.row(i).dot(gd) +
                    cross_derivative_trace(k, positions.row(i).transpose(),
                                           positions.row(i).transpose());
        }
        value = (2.0 * total + diag) / (static_cast<double>(n) * static_cast<double>(n));
    }

    // variance estimate combining the non-degenerate (projection) term with
    // the degenerate term, the latter dominating near equilibrium
    const double nd = static_cast<double>(n);
    Vector h = row_sum / (nd - 1.0);
    const double h_mean = h.mean();
    double var_h = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) var_h += (h(i) - h_mean) * (h(i) - h_mean);
    var_h /= std::max(nd - 1.0, 1.0);
    double var_k = total_sq / pairs - value * value;
    var_k = std::max(var_k, 0.0);
    const double se =
        std::sqrt(4.0 * var_h / nd + 2.0 * var_k / (nd * (nd - 1.0)));
    return {value, se};
}

inline double stein_fisher(const Matrix& positions, const KernelSpec& k, const TargetModel& t) {
    return stein_fisher_detail(positions, k, t).value;
}

// ---------------------------------------------------------------------------

struct Histogram {
    Vector edges;      // bins+1 entries
    Vector densities;  // integrates to 1 over [lo, hi]
};

inline Histogram histogram(const std::vector<double>& samples, int bins, double lo, double hi) {
    require(bins >= 1, "histogram: need at least one bin");
    require(hi > lo, "histogram: empty range");
    Histogram h;
    h.edges = Vector::LinSpaced(bins + 1, lo, hi);
    Vector counts = Vector::Zero(bins);
    const double width = (hi - lo) / bins;
    long inside = 0;
    for (double s : samples) {
        if (s < lo || s > hi) continue;
        auto b = static_cast<Eigen::Index>((s - lo) / width);
        b = std::min<Eigen::Index>(b, bins - 1);
        counts(b) += 1.0;
        ++inside;
    }
    h.densities = (inside > 0) ? Vector(counts / (static_cast<double>(inside) * width))
                               : Vector(Vector::Zero(bins));
    return h;
}

}  // namespace steinflow
