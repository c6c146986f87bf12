#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <variant>
#include <vector>

#include "steinflow/core.hpp"
#include "steinflow/linalg.hpp"
#include "steinflow/targets.hpp"

namespace steinflow {

class KernelSpec;

// k(x,y) = exp(-|x-y|^p / sigma^p), p in (0,2]. p=2 is the Gaussian kernel,
// p=1 the Laplace kernel; p<1 kernels have unbounded derivatives near the
// diagonal, where the profile gradient is taken to be zero by convention.
struct PExponentialKernel {
    double p;
    double sigma;
};

// k(x,y) = pi(x)^{-1/2} exp(-|x-y|) pi(y)^{-1/2}, 1D only. Tails adapted to
// the target; not translation-invariant, not differentiable on the diagonal.
struct WeightedMaternKernel {
    std::shared_ptr<const TargetModel> target;
};

// k(x,y) = x*y, optionally x*y + 1. Not ISPD; meant for use inside a
// weighted sum with a small ISPD perturbation.
struct PolynomialKernel {
    bool include_offset;
};

struct WeightedSumKernel {
    std::vector<std::pair<double, std::shared_ptr<const KernelSpec>>> terms;
};

class KernelSpec {
public:
    using Variant =
        std::variant<PExponentialKernel, WeightedMaternKernel, PolynomialKernel, WeightedSumKernel>;

    explicit KernelSpec(Variant v) : v_(std::move(v)) { validate(); }

    static KernelSpec p_exponential(double p, double sigma) {
        return KernelSpec(PExponentialKernel{p, sigma});
    }
    static KernelSpec gaussian(double sigma) { return p_exponential(2.0, sigma); }
    static KernelSpec laplace(double sigma) { return p_exponential(1.0, sigma); }
    static KernelSpec weighted_matern(std::shared_ptr<const TargetModel> target) {
        require(target != nullptr && target->dim() == 1, "weighted_matern: 1D target required");
        return KernelSpec(WeightedMaternKernel{std::move(target)});
    }
    static KernelSpec polynomial(bool include_offset) {
        return KernelSpec(PolynomialKernel{include_offset});
    }
    static KernelSpec weighted_sum(std::vector<std::pair<double, KernelSpec>> terms) {
        WeightedSumKernel w;
        for (auto& [weight, k] : terms) {
            require(weight > 0.0, "weighted_sum: weights must be positive");
            w.terms.emplace_back(weight, std::make_shared<KernelSpec>(std::move(k)));
        }
        require(!w.terms.empty(), "weighted_sum: needs at least one term");
        return KernelSpec(w);
    }

    const Variant& variant() const { return v_; }

    bool one_dimensional_only() const {
        if (std::holds_alternative<WeightedMaternKernel>(v_) ||
            std::holds_alternative<PolynomialKernel>(v_))
            return true;
        if (const auto* ws = std::get_if<WeightedSumKernel>(&v_)) {
            for (const auto& [w, k] : ws->terms)
                if (k->one_dimensional_only()) return true;
        }
        return false;
    }

private:
    void validate() const {
        if (const auto* pe = std::get_if<PExponentialKernel>(&v_)) {
            require(pe->p > 0.0 && pe->p <= 2.0, "p_exponential: p must lie in (0,2]");
            require(pe->sigma > 0.0, "p_exponential: sigma must be positive");
        }
    }
    Variant v_;
};

namespace detail {

inline void check_finite_pair(double x, double y, const char* who) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw InvalidInputError(std::string(who) + ": non-finite input");
}

inline double sign_of(double d) { return (d > 0.0) ? 1.0 : ((d < 0.0) ? -1.0 : 0.0); }

}  // namespace detail

// ---------------------------------------------------------------------------
// scalar (1D) evaluation paths, used heavily by the quadrature modules

inline double eval1(const KernelSpec& k, double x, double y) {
    detail::check_finite_pair(x, y, "eval1");
    return std::visit(
        [&](const auto& kv) -> double {
            using T = std::decay_t<decltype(kv)>;
            if constexpr (std::is_same_v<T, PExponentialKernel>) {
                const double r = std::abs(x - y);
                return std::exp(-std::pow(r / kv.sigma, kv.p));
            } else if constexpr (std::is_same_v<T, WeightedMaternKernel>) {
                return std::exp(0.5 * kv.target->potential1(x) + 0.5 * kv.target->potential1(y) -
                                std::abs(x - y));
            } else if constexpr (std::is_same_v<T, PolynomialKernel>) {
                return x * y + (kv.include_offset ? 1.0 : 0.0);
            } else {
                double acc = 0.0;
                for (const auto& [w, sub] : kv.terms) acc += w * eval1(*sub, x, y);
                return acc;
            }
        },
        k.variant());
}

// d/dx k(x,y). On the diagonal the non-smooth profile contribution is set to
// zero (symmetric-limit convention), so self-interactions carry no drift.
inline double grad1_1d(const KernelSpec& k, double x, double y) {
    detail::check_finite_pair(x, y, "grad1_1d");
    return std::visit(
        [&](const auto& kv) -> double {
            using T = std::decay_t<decltype(kv)>;
            if constexpr (std::is_same_v<T, PExponentialKernel>) {
                const double d = x - y;
                if (d == 0.0) return 0.0;
                const double r = std::abs(d);
                const double kval = std::exp(-std::pow(r / kv.sigma, kv.p));
                return -kv.p * std::pow(r, kv.p - 2.0) / std::pow(kv.sigma, kv.p) * d * kval;
            } else if constexpr (std::is_same_v<T, WeightedMaternKernel>) {
                const double kval = std::exp(0.5 * kv.target->potential1(x) +
                                             0.5 * kv.target->potential1(y) - std::abs(x - y));
                return kval *
                       (0.5 * kv.target->grad_potential1(x) - detail::sign_of(x - y));
            } else if constexpr (std::is_same_v<T, PolynomialKernel>) {
                return y;
            } else {
                double acc = 0.0;
                for (const auto& [w, sub] : kv.terms) acc += w * grad1_1d(*sub, x, y);
                return acc;
            }
        },
        k.variant());
}

// sum_i d^2 k / dx_i dy_i, needed by the kernelized Stein-Fisher estimator.
// Only defined off the diagonal for kernels that are not C^2 there.
inline double cross_derivative_trace(const KernelSpec& k, const Vector& x, const Vector& y) {
    return std::visit(
        [&](const auto& kv) -> double {
            using T = std::decay_t<decltype(kv)>;
            if constexpr (std::is_same_v<T, PExponentialKernel>) {
                const double r = (x - y).norm();
                const double p = kv.p;
                const double sp = std::pow(kv.sigma, p);
                const double d = static_cast<double>(x.size());
                if (r == 0.0) {
                    if (p == 2.0) return 2.0 * d / sp;
                    throw UnsupportedKernelError(
                        "cross_derivative_trace: diagonal undefined for p < 2");
                }
                const double kval = std::exp(-std::pow(r, p) / sp);
                return (p * (p + d - 2.0) * std::pow(r, p - 2.0) / sp -
                        p * p * std::pow(r, 2.0 * p - 2.0) / (sp * sp)) *
                       kval;
            } else if constexpr (std::is_same_v<T, WeightedMaternKernel>) {
                require(x.size() == 1, "weighted_matern: 1D only");
                const double xv = x(0), yv = y(0);
                if (xv == yv)
                    throw UnsupportedKernelError(
                        "cross_derivative_trace: diagonal undefined for weighted Matern");
                const double s = detail::sign_of(xv - yv);
                const double kval = eval1(k, xv, yv);
                return kval * (0.5 * kv.target->grad_potential1(xv) - s) *
                       (0.5 * kv.target->grad_potential1(yv) + s);
            } else if constexpr (std::is_same_v<T, PolynomialKernel>) {
                require(x.size() == 1, "polynomial: 1D only");
                return 1.0;
            } else {
                double acc = 0.0;
                for (const auto& [w, sub] : kv.terms)
                    acc += w * cross_derivative_trace(*sub, x, y);
                return acc;
            }
        },
        k.variant());
}

// ---------------------------------------------------------------------------
// vector evaluation paths

inline double eval(const KernelSpec& k, const Vector& x, const Vector& y) {
    require(x.size() == y.size(), "eval: dimension mismatch");
    if (!x.allFinite() || !y.allFinite()) throw InvalidInputError("eval: non-finite input");
    if (k.one_dimensional_only()) {
        require(x.size() == 1, "eval: kernel variant is 1D only");
        return eval1(k, x(0), y(0));
    }
    return std::visit(
        [&](const auto& kv) -> double {
            using T = std::decay_t<decltype(kv)>;
            if constexpr (std::is_same_v<T, PExponentialKernel>) {
                const double r = (x - y).norm();
                return std::exp(-std::pow(r / kv.sigma, kv.p));
            } else if constexpr (std::is_same_v<T, WeightedSumKernel>) {
                double acc = 0.0;
                for (const auto& [w, sub] : kv.terms) acc += w * eval(*sub, x, y);
                return acc;
            } else {
                return eval1(k, x(0), y(0));
            }
        },
        k.variant());
}

// Writes grad_x k(x,y) into g (no allocation); returns k(x,y).
inline double eval_and_grad1(const KernelSpec& k, Eigen::Ref<const RowVec> x,
                             Eigen::Ref<const RowVec> y, Eigen::Ref<RowVec> g) {
    return std::visit(
        [&](const auto& kv) -> double {
            using T = std::decay_t<decltype(kv)>;
            if constexpr (std::is_same_v<T, PExponentialKernel>) {
                double r2 = 0.0;
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    const double d = x(i) - y(i);
                    r2 += d * d;
                }
                const double r = std::sqrt(r2);
                const double kval = std::exp(-std::pow(r / kv.sigma, kv.p));
                if (r == 0.0) {
                    g.setZero();
                    return kval;
                }
                const double coef =
                    -kv.p * std::pow(r, kv.p - 2.0) / std::pow(kv.sigma, kv.p) * kval;
                for (Eigen::Index i = 0; i < x.size(); ++i) g(i) = coef * (x(i) - y(i));
                return kval;
            } else if constexpr (std::is_same_v<T, WeightedSumKernel>) {
                double acc = 0.0;
                g.setZero();
                RowVec tmp(x.size());
                for (const auto& [w, sub] : kv.terms) {
                    acc += w * eval_and_grad1(*sub, x, y, tmp);
                    g += w * tmp;
                }
                return acc;
            } else {
                const double kval = eval1(k, x(0), y(0));
                g(0) = grad1_1d(k, x(0), y(0));
                return kval;
            }
        },
        k.variant());
}

inline Vector grad1(const KernelSpec& k, const Vector& x, const Vector& y) {
    require(x.size() == y.size(), "grad1: dimension mismatch");
    if (!x.allFinite() || !y.allFinite()) throw InvalidInputError("grad1: non-finite input");
    if (k.one_dimensional_only()) require(x.size() == 1, "grad1: kernel variant is 1D only");
    RowVec g(x.size());
    eval_and_grad1(k, x.transpose(), y.transpose(), g);
    return g.transpose();
}

// ---------------------------------------------------------------------------

// Median-heuristic bandwidth: sigma^p = med^p / log(max(n,2)), where med is
// the median pairwise Euclidean distance (ties: mean of the two middle order
// statistics). Reduces to the usual h = med^2 / log n rule at p = 2.
inline double median_bandwidth(const Matrix& points, double p, Eigen::Index n) {
    require(points.rows() >= 2, "median_bandwidth: need at least two points");
    require(p > 0.0, "median_bandwidth: p must be positive");
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(points.rows() * (points.rows() - 1) / 2));
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = i + 1; j < points.rows(); ++j)
            dists.push_back((points.row(i) - points.row(j)).norm());
    std::sort(dists.begin(), dists.end());
    const std::size_t m = dists.size();
    const double med =
        (m % 2 == 1) ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
    if (med <= 0.0)
        throw DegenerateConfigurationError("median_bandwidth: all points identical");
    const double log_n = std::log(std::max(static_cast<double>(n), 2.0));
    return med / std::pow(log_n, 1.0 / p);
}

// G_ij = scale * k(x_i, x_j); scale = 1/N gives the SDE mass-matrix blocks.
inline Matrix gram(const KernelSpec& k, const Matrix& points, double scale) {
    require(scale > 0.0, "gram: scale must be positive");
    const Eigen::Index n = points.rows();
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = scale * eval(k, points.row(i).transpose(), points.row(j).transpose());
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

// Symmetric PSD square root of a Gram matrix (full Jacobi eigendecomposition,
// eigenvalues clamped at -1e-10 tolerance).
inline Matrix gram_sqrt(const Matrix& g) { return sym_sqrt_psd(g, 1e-10); }

}  // namespace steinflow
