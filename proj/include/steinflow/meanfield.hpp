#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "steinflow/core.hpp"
#include "steinflow/dynamics.hpp"
#include "steinflow/geometry.hpp"
#include "steinflow/kernels.hpp"
#include "steinflow/metrics.hpp"
#include "steinflow/targets.hpp"

namespace steinflow {

// d rho/dt = d/dx ( rho(x) int k(x,y) [rho'(y) + rho(y) V'(y)] dy ), with the
// bracket evaluated as pi (rho/pi)' so the grid restriction of pi is an exact
// stationary point, and a conservative divergence whose discrete total mass
// derivative is identically zero.
inline Vector stein_pde_rhs(const DensityField1D& rho, const KernelSpec& k, const TargetModel& t,
                            const Matrix& kmat) {
    const Grid1D& g = rho.grid;
    const Vector eta = flux_density(rho, t);
    const Vector u = kmat * g.weights.cwiseProduct(eta);
    return g.adjoint_gradient(rho.values.cwiseProduct(u));
}

inline Vector stein_pde_rhs(const DensityField1D& rho, const KernelSpec& k,
                            const TargetModel& t) {
    return stein_pde_rhs(rho, k, t, kernel_matrix(k, rho.grid));
}

// Quadrature of the Stein-Fisher information
//   I(rho|pi) = int int (rho/pi)'(y) k(y,z) (rho/pi)'(z) dpi(y) dpi(z),
// the dissipation rate of the KL divergence along the mean-field flow.
inline double stein_fisher_quadrature(const DensityField1D& rho, const KernelSpec& k,
                                      const TargetModel& t, const Matrix& kmat) {
    const Vector weighted = rho.grid.weights.cwiseProduct(flux_density(rho, t));
    return weighted.dot(kmat * weighted);
}

inline double stein_fisher_quadrature(const DensityField1D& rho, const KernelSpec& k,
                                      const TargetModel& t) {
    return stein_fisher_quadrature(rho, k, t, kernel_matrix(k, rho.grid));
}

struct PdeSeriesRow {
    double t = 0.0;
    double kl = 0.0;
    double stein_fisher = 0.0;
    double log_sobolev_ratio = 0.0;  // KL / I_Stein, recorded for inspection only
};

struct PdeRun {
    DensityField1D density;
    double time = 0.0;
    std::vector<PdeSeriesRow> series;
};

// RK4 time stepping of the mean-field equation, recording KL and the
// Stein-Fisher dissipation. Nonnegativity is enforced by clipping at zero
// with renormalization; clipped mass beyond 1e-10 aborts with an
// instability error (the honest signal that dt is too large for the grid).
inline PdeRun evolve_pde(const DensityField1D& rho0, const KernelSpec& k, const TargetModel& t,
                         double t_end, double dt, double record_every) {
    require(t_end >= 0.0 && dt > 0.0, "evolve_pde: bad horizon or dt");
    const Grid1D& g = rho0.grid;
    const Matrix kmat = kernel_matrix(k, g);

    auto rhs = [&](const Vector& r) {
        DensityField1D tmp{g, r};
        return stein_pde_rhs(tmp, k, t, kmat);
    };

    // trial step: catch an unstable dt before running the whole horizon
    {
        Vector trial = rho0.values + dt * rhs(rho0.values);
        if (!trial.allFinite() || trial.minCoeff() < -1e-3)
            throw InstabilityError("evolve_pde: trial step unstable; reduce dt");
    }

    PdeRun run;
    run.density = rho0;
    Vector r = rho0.values;
    double time = 0.0;

    auto record = [&]() {
        DensityField1D snapshot{g, r};
        const KlBreakdown klb = kl_quadrature(snapshot, t);
        const double fisher = stein_fisher_quadrature(snapshot, k, t, kmat);
        const double ratio = (fisher > 0.0) ? klb.kl / fisher : 0.0;
        run.series.push_back({time, klb.kl, fisher, ratio});
    };
    record();

    double next_record = record_every;
    while (time < t_end - 1e-12 * std::max(1.0, t_end)) {
        const double h = std::min(dt, t_end - time);
        const Vector k1 = rhs(r);
        const Vector k2 = rhs(r + 0.5 * h * k1);
        const Vector k3 = rhs(r + 0.5 * h * k2);
        const Vector k4 = rhs(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        time += h;
        if (!r.allFinite()) throw InstabilityError("evolve_pde: non-finite density; reduce dt");

        double clipped = 0.0;
        for (Eigen::Index m = 0; m < g.n; ++m) {
            if (r(m) < 0.0) {
                clipped += -r(m) * g.weights(m);
                r(m) = 0.0;
            }
        }
        if (clipped > 1e-10)
            throw InstabilityError("evolve_pde: clipped mass exceeds 1e-10; reduce dt");
        if (clipped > 0.0) r /= g.integrate(r);

        if (time >= next_record - 1e-12 || time >= t_end - 1e-12 * std::max(1.0, t_end)) {
            record();
            next_record += record_every;
        }
    }

    run.density = DensityField1D{g, r};
    run.time = time;
    return run;
}

// Finite-N particle runs against the mean-field solution from the same
// initial law: for each N, i.i.d. draws from rho0 (common uniforms across N,
// so larger ensembles extend smaller ones), deterministic SVGD to t_end, and
// exact W1 between the final empirical measure and the PDE density.
inline std::vector<std::pair<Eigen::Index, double>> particles_vs_pde(
    const std::vector<Eigen::Index>& ns, const KernelSpec& k, const TargetModel& t,
    const DensityField1D& rho0, double t_end, std::uint64_t seed,
    const IntegratorConfig& cfg = {}, double pde_dt = 2e-3,
    Eigen::Index reference_quantiles = 4096) {
    require(!ns.empty(), "particles_vs_pde: need at least one ensemble size");
    require(t.dim() == 1, "particles_vs_pde: 1D only");

    DensityField1D pde_final = rho0;
    if (t_end > 0.0) {
        PdeRun run = evolve_pde(rho0, k, t, t_end, pde_dt, t_end);
        pde_final = run.density;
    }
    std::vector<double> probs(static_cast<std::size_t>(reference_quantiles));
    for (std::size_t j = 0; j < probs.size(); ++j)
        probs[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(reference_quantiles);
    const std::vector<double> ref = pde_final.quantiles(probs);

    Eigen::Index n_max = 0;
    for (Eigen::Index n : ns) n_max = std::max(n_max, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> pool(static_cast<std::size_t>(n_max));
    for (auto& u : pool) u = unif(rng);

    std::vector<std::pair<Eigen::Index, double>> out;
    for (Eigen::Index n : ns) {
        std::vector<double> u(pool.begin(), pool.begin() + n);
        auto xs = rho0.quantiles(u);
        Matrix pos(n, 1);
        for (Eigen::Index i = 0; i < n; ++i) pos(i, 0) = xs[static_cast<std::size_t>(i)];
        ParticleEnsemble e = ParticleEnsemble::from_positions(std::move(pos), seed ^ 0x9e3779b9u);
        if (t_end > 0.0) evolve_deterministic(e, k, t, t_end, cfg);
        std::vector<double> final_pos(e.positions.data(), e.positions.data() + n);
        out.emplace_back(n, w1_1d(std::move(final_pos), ref));
    }
    return out;
}

}  // namespace steinflow
