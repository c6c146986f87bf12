#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "steinflow/core.hpp"
#include "steinflow/kernels.hpp"
#include "steinflow/targets.hpp"

namespace steinflow {

// N interacting particles plus simulation clock, RNG state and cost counters.
// grad_evals counts target-gradient calls (N per right-hand-side evaluation);
// pair_evals counts kernel pair evaluations.
struct ParticleEnsemble {
    Matrix positions;  // N x d
    double time = 0.0;
    long grad_evals = 0;
    long pair_evals = 0;
    std::mt19937_64 rng;

    static ParticleEnsemble standard_normal(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
        require(n >= 1 && d >= 1, "ParticleEnsemble: need n,d >= 1");
        ParticleEnsemble e;
        e.rng.seed(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        e.positions.resize(n, d);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) e.positions(i, j) = normal(e.rng);
        return e;
    }

    static ParticleEnsemble from_positions(Matrix positions, std::uint64_t seed) {
        require(positions.rows() >= 1 && positions.cols() >= 1,
                "ParticleEnsemble: need n,d >= 1");
        ParticleEnsemble e;
        e.rng.seed(seed);
        e.positions = std::move(positions);
        return e;
    }

    Eigen::Index size() const { return positions.rows(); }
    Eigen::Index dim() const { return positions.cols(); }
};

enum class IntegratorMethod { FixedEuler, AdaptiveRK45, SemiImplicitTrapezoidal };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::AdaptiveRK45;
    double rtol = 1e-6;
    double atol = 1e-9;
    double dt_init = 1e-3;
    double dt_max = 10.0;
    long max_steps = 2000000;
};

struct RunStats {
    long steps_accepted = 0;
    long steps_rejected = 0;
    long rhs_evals = 0;
    double last_dt = 0.0;
};

using ObserverFn = std::function<void(const ParticleEnsemble&)>;

namespace detail {

inline void check_finite(const Matrix& m, const char* what) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (!m.row(i).allFinite())
            throw NumericalBlowupError(std::string(what) + ": non-finite state", i);
}

}  // namespace detail

// v_i = -(1/N) sum_j [ grad1 k(x_i,x_j) + k(x_i,x_j) gradV(x_j) ].
// gradV is evaluated once per particle and reused across the pairwise sum;
// inner sums run in fixed index order so results are schedule-independent.
inline Matrix svgd_velocity(ParticleEnsemble& e, const KernelSpec& k, const TargetModel& t) {
    const Eigen::Index n = e.size(), d = e.dim();
    require(t.dim() == d, "svgd_velocity: target dimension mismatch");
    Matrix grad_v(n, d);
    for (Eigen::Index j = 0; j < n; ++j)
        grad_v.row(j) = t.grad_potential(e.positions.row(j).transpose()).transpose();
    e.grad_evals += n;

    Matrix v = Matrix::Zero(n, d);
    RowVec g(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double kij = eval_and_grad1(k, e.positions.row(i), e.positions.row(j), g);
            v.row(i) -= g + kij * grad_v.row(j);
        }
        v.row(i) /= static_cast<double>(n);
        if (!v.row(i).allFinite())
            throw NumericalBlowupError("svgd_velocity: non-finite velocity", i);
    }
    e.pair_evals += n * n;
    return v;
}

namespace detail {

// Dormand-Prince 5(4) Butcher tableau.
struct Dopri5 {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

template <typename Rhs>
RunStats integrate_adaptive(Matrix& y, double& time, double t_end, const IntegratorConfig& cfg,
                            Rhs&& rhs) {
    using D = Dopri5;
    RunStats stats;
    double dt = std::min(cfg.dt_init, cfg.dt_max);
    Matrix k1 = rhs(y);
    ++stats.rhs_evals;
    while (time < t_end) {
        if (stats.steps_accepted + stats.steps_rejected >= cfg.max_steps)
            throw NonconvergenceError("integrate_adaptive: max_steps exceeded", dt,
                                      stats.steps_rejected);
        dt = std::min({dt, cfg.dt_max, t_end - time});
        if (dt <= 1e-15 * std::max(1.0, std::abs(time)))
            throw NonconvergenceError("integrate_adaptive: step size underflow", dt,
                                      stats.steps_rejected);

        Matrix k2 = rhs(y + dt * (D::a21 * k1));
        Matrix k3 = rhs(y + dt * (D::a31 * k1 + D::a32 * k2));
        Matrix k4 = rhs(y + dt * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
        Matrix k5 = rhs(y + dt * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
        Matrix k6 = rhs(y + dt * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 +
                                  D::a65 * k5));
        Matrix y5 = y + dt * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
        Matrix k7 = rhs(y5);  // FSAL
        stats.rhs_evals += 6;

        Matrix err = dt * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 + D::e6 * k6 +
                           D::e7 * k7);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            for (Eigen::Index j = 0; j < y.cols(); ++j) {
                const double sc =
                    cfg.atol + cfg.rtol * std::max(std::abs(y(i, j)), std::abs(y5(i, j)));
                const double q = err(i, j) / sc;
                acc += q * q;
            }
        }
        const double err_norm = std::sqrt(acc / static_cast<double>(y.size()));

        if (std::isfinite(err_norm) && err_norm <= 1.0) {
            time += dt;
            y = std::move(y5);
            k1 = std::move(k7);
            ++stats.steps_accepted;
            const double fac = (err_norm > 0.0)
                                   ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0)
                                   : 5.0;
            stats.last_dt = dt;
            dt *= fac;
        } else {
            ++stats.steps_rejected;
            const double fac = std::isfinite(err_norm)
                                   ? std::max(0.9 * std::pow(err_norm, -0.2), 0.1)
                                   : 0.1;
            dt *= fac;
        }
    }
    return stats;
}

template <typename Rhs>
RunStats integrate_fixed_euler(Matrix& y, double& time, double t_end, const IntegratorConfig& cfg,
                               Rhs&& rhs) {
    RunStats stats;
    while (time < t_end) {
        if (stats.steps_accepted >= cfg.max_steps)
            throw NonconvergenceError("integrate_fixed_euler: max_steps exceeded", cfg.dt_init,
                                      0);
        const double dt = std::min(cfg.dt_init, t_end - time);
        y += dt * rhs(y);
        ++stats.rhs_evals;
        time += dt;
        ++stats.steps_accepted;
        stats.last_dt = dt;
    }
    return stats;
}

// Trapezoidal rule with fixed-point correction of the implicit stage; the
// fallback for stiff runs (p < 1 kernels) where the explicit pair rejects
// its way to tiny steps.
template <typename Rhs>
RunStats integrate_trapezoidal(Matrix& y, double& time, double t_end,
                               const IntegratorConfig& cfg, Rhs&& rhs) {
    RunStats stats;
    while (time < t_end) {
        if (stats.steps_accepted >= cfg.max_steps)
            throw NonconvergenceError("integrate_trapezoidal: max_steps exceeded", cfg.dt_init,
                                      0);
        const double dt = std::min(cfg.dt_init, t_end - time);
        Matrix f0 = rhs(y);
        ++stats.rhs_evals;
        Matrix yn = y + dt * f0;  // Euler predictor
        const double tol = std::max(cfg.atol, cfg.rtol * y.cwiseAbs().maxCoeff());
        for (int it = 0; it < 12; ++it) {
            Matrix yn_next = y + 0.5 * dt * (f0 + rhs(yn));
            ++stats.rhs_evals;
            const double delta = (yn_next - yn).cwiseAbs().maxCoeff();
            yn = std::move(yn_next);
            if (delta <= tol) break;
        }
        y = std::move(yn);
        time += dt;
        ++stats.steps_accepted;
        stats.last_dt = dt;
    }
    return stats;
}

template <typename Rhs>
RunStats integrate_segment(Matrix& y, double& time, double t_end, const IntegratorConfig& cfg,
                           Rhs&& rhs) {
    switch (cfg.method) {
        case IntegratorMethod::FixedEuler:
            return integrate_fixed_euler(y, time, t_end, cfg, rhs);
        case IntegratorMethod::SemiImplicitTrapezoidal:
            return integrate_trapezoidal(y, time, t_end, cfg, rhs);
        case IntegratorMethod::AdaptiveRK45:
        default:
            return integrate_adaptive(y, time, t_end, cfg, rhs);
    }
}

}  // namespace detail

// Integrates dX/dt = svgd_velocity up to t_end, stopping exactly at each
// observation time. Counters on the ensemble track the true RHS cost.
inline RunStats evolve_deterministic(ParticleEnsemble& e, const KernelSpec& k,
                                     const TargetModel& t, double t_end,
                                     const IntegratorConfig& cfg,
                                     const std::vector<double>& record_times = {},
                                     const ObserverFn& observer = nullptr) {
    require(t_end > e.time, "evolve_deterministic: t_end must exceed current time");
    std::vector<double> breaks;
    for (double rt : record_times)
        if (rt > e.time && rt <= t_end) breaks.push_back(rt);
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(t_end);

    auto rhs = [&](const Matrix& y) {
        ParticleEnsemble scratch;
        scratch.positions = y;
        scratch.time = e.time;
        Matrix v = svgd_velocity(scratch, k, t);
        e.grad_evals += scratch.grad_evals;
        e.pair_evals += scratch.pair_evals;
        return v;
    };

    RunStats total;
    for (double stop : breaks) {
        if (stop <= e.time) continue;
        RunStats s = detail::integrate_segment(e.positions, e.time, stop, cfg, rhs);
        total.steps_accepted += s.steps_accepted;
        total.steps_rejected += s.steps_rejected;
        total.rhs_evals += s.rhs_evals;
        total.last_dt = s.last_dt;
        detail::check_finite(e.positions, "evolve_deterministic");
        if (observer && stop != t_end) observer(e);
    }
    if (observer) observer(e);
    return total;
}

// One Euler-Maruyama step of the stochastic SVGD system
//   dX_i = (1/N) sum_j [ -k(X_i,X_j) gradV(X_j) + grad_{X_j} k(X_i,X_j) ] dt
//        + sum_j sqrt(2) (G^{1/2})_{ij} xi_j sqrt(dt),
// with G the N x N Gram matrix at scale 1/N; the same square root drives all
// d coordinates. noise_scale exists so tests can switch the noise off.
inline void stochastic_step(ParticleEnsemble& e, const KernelSpec& k, const TargetModel& t,
                            double dt, double noise_scale = 1.0) {
    require(dt > 0.0, "stochastic_step: dt must be positive");
    const Eigen::Index n = e.size(), d = e.dim();
    Matrix grad_v(n, d);
    for (Eigen::Index j = 0; j < n; ++j)
        grad_v.row(j) = t.grad_potential(e.positions.row(j).transpose()).transpose();
    e.grad_evals += n;

    Matrix drift = Matrix::Zero(n, d);
    RowVec g(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            // grad w.r.t. X_j of k(X_i, X_j) equals grad1 k evaluated at (x_j, x_i)
            const double kij = eval_and_grad1(k, e.positions.row(j), e.positions.row(i), g);
            drift.row(i) += g - kij * grad_v.row(j);
        }
        drift.row(i) /= static_cast<double>(n);
    }
    e.pair_evals += n * n;

    Matrix root = gram_sqrt(gram(k, e.positions, 1.0 / static_cast<double>(n)));
    e.pair_evals += n * (n + 1) / 2;
    Matrix xi(n, d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index i = 0; i < n; ++i) xi(i, c) = normal(e.rng);

    e.positions += dt * drift + noise_scale * std::sqrt(2.0 * dt) * (root * xi);
    e.time += dt;
    detail::check_finite(e.positions, "stochastic_step");
}

// Named real-valued observables for ergodic averaging.
using TestFunction = std::function<double(Eigen::Ref<const RowVec>)>;

// Repeated stochastic steps accumulating (1/T) int (1/N) sum_i phi(X_t^i) dt
// for each registered test function (left-endpoint rule in time).
inline std::vector<double> evolve_stochastic(ParticleEnsemble& e, const KernelSpec& k,
                                             const TargetModel& t, double t_end, double dt,
                                             const std::vector<TestFunction>& test_functions = {},
                                             const std::vector<double>& record_times = {},
                                             const ObserverFn& observer = nullptr) {
    require(t_end > e.time, "evolve_stochastic: t_end must exceed current time");
    std::vector<double> acc(test_functions.size(), 0.0);
    const double t0 = e.time;
    std::size_t next_record = 0;
    std::vector<double> breaks(record_times);
    std::sort(breaks.begin(), breaks.end());

    while (e.time < t_end - 1e-12 * std::max(1.0, t_end)) {
        const double step = std::min(dt, t_end - e.time);
        for (std::size_t f = 0; f < test_functions.size(); ++f) {
            double mean = 0.0;
            for (Eigen::Index i = 0; i < e.size(); ++i)
                mean += test_functions[f](e.positions.row(i));
            acc[f] += step * mean / static_cast<double>(e.size());
        }
        stochastic_step(e, k, t, step);
        while (observer && next_record < breaks.size() && e.time >= breaks[next_record]) {
            observer(e);
            ++next_record;
        }
    }
    const double elapsed = e.time - t0;
    for (double& a : acc) a /= elapsed;
    return acc;
}

// Overdamped Langevin baseline: N independent Euler-Maruyama chains
// dX = -gradV dt + sqrt(2 dt) xi.
inline void langevin_step(ParticleEnsemble& e, const TargetModel& t, double dt,
                          double noise_scale = 1.0) {
    require(dt > 0.0, "langevin_step: dt must be positive");
    const Eigen::Index n = e.size(), d = e.dim();
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix drift(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        drift.row(i) = -t.grad_potential(e.positions.row(i).transpose()).transpose();
    e.grad_evals += n;
    Matrix xi(n, d);
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index i = 0; i < n; ++i) xi(i, c) = normal(e.rng);
    e.positions += dt * drift + noise_scale * std::sqrt(2.0 * dt) * xi;
    e.time += dt;
    detail::check_finite(e.positions, "langevin_step");
}

inline std::vector<double> evolve_langevin(ParticleEnsemble& e, const TargetModel& t,
                                           double t_end, double dt,
                                           const std::vector<TestFunction>& test_functions = {},
                                           const std::vector<double>& record_times = {},
                                           const ObserverFn& observer = nullptr) {
    require(t_end > e.time, "evolve_langevin: t_end must exceed current time");
    std::vector<double> acc(test_functions.size(), 0.0);
    const double t0 = e.time;
    std::size_t next_record = 0;
    std::vector<double> breaks(record_times);
    std::sort(breaks.begin(), breaks.end());

    while (e.time < t_end - 1e-12 * std::max(1.0, t_end)) {
        const double step = std::min(dt, t_end - e.time);
        for (std::size_t f = 0; f < test_functions.size(); ++f) {
            double mean = 0.0;
            for (Eigen::Index i = 0; i < e.size(); ++i)
                mean += test_functions[f](e.positions.row(i));
            acc[f] += step * mean / static_cast<double>(e.size());
        }
        langevin_step(e, t, step);
        while (observer && next_record < breaks.size() && e.time >= breaks[next_record]) {
            observer(e);
            ++next_record;
        }
    }
    const double elapsed = e.time - t0;
    for (double& a : acc) a /= elapsed;
    return acc;
}

}  // namespace steinflow
