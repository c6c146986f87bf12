// scratch probe, not part of the suite
#include <cstdio>
#include <random>

#include "steinflow/geometry.hpp"
#include "steinflow/meanfield.hpp"

using namespace steinflow;

int main() {
    auto gauss_target = std::make_shared<const TargetModel>(TargetModel::standard_normal(1));
    auto matern = KernelSpec::weighted_matern(gauss_target);
    auto gauss_k = KernelSpec::gaussian(1.0);

    {
        Grid1D g = Grid1D::uniform(-8.0, 8.0, 1024);
        auto r = stein_generator_gap(matern, *gauss_target, g, 256);
        std::printf("matern gap (n_basis=256, [-8,8]): %.6f\n", r.gap);
        std::printf("  spectrum head: %.4f %.4f %.4f %.4f\n", r.spectrum(0), r.spectrum(1),
                    r.spectrum(2), r.spectrum(3));
    }
    {
        Grid1D g = Grid1D::uniform(-6.0, 6.0, 1024);
        for (int nb : {128, 256, 512}) {
            auto r = stein_generator_gap(gauss_k, *gauss_target, g, nb);
            std::printf("gauss gap (n_basis=%d, [-6,6]): %.3e\n", nb, r.gap);
        }
    }
    {
        Grid1D g = default_grid(*gauss_target, 1024);
        std::printf("default grid: [%.1f, %.1f]\n", g.lo, g.hi);
        for (double x0 : {0.0, 2.0, 4.0, 6.0}) {
            auto psi = ScalarField1D::from_function(
                g, [&](double x) { return eval1(gauss_k, x0, x); });
            std::printf("rayleigh gauss section x0=%.0f: %.6e\n", x0,
                        rayleigh(psi, gauss_k, *gauss_target));
        }
        auto psi_lin = ScalarField1D::from_function(g, [](double x) { return x; });
        std::printf("rayleigh matern linear psi: %.6f\n",
                    rayleigh(psi_lin, matern, *gauss_target));
        auto psi_bump = ScalarField1D::from_function(
            g, [](double x) { return std::exp(-8.0 * (x - 0.5) * (x - 0.5)); });
        std::printf("rayleigh matern bump psi: %.6f\n",
                    rayleigh(psi_bump, matern, *gauss_target));
    }
    {
        // polynomial kernel identity
        Grid1D g = default_grid(*gauss_target, 1024);
        auto poly = KernelSpec::polynomial(false);
        std::mt19937_64 rng(5);
        for (double alpha : {0.5, 1.0, 2.0}) {
            TargetModel vt = TargetModel::gaussian(Vector::Zero(1),
                                                   Matrix::Identity(1, 1) / alpha);
            auto rho_m = TargetModel::gaussian(Vector::Constant(1, 0.3),
                                               Matrix::Identity(1, 1) * 0.8);
            DensityField1D rho = DensityField1D::from_target(rho_m, g);
            auto psi = ScalarField1D::from_function(
                g, [](double x) { return std::sin(0.7 * x) + 0.2 * x * x; });
            HessianSplit h = hessian_form(rho, psi, poly, vt);
            // oracle: 2 alpha m2 * (int psi' y rho)^2
            Vector p = g.derivative(psi.values);
            double m2 = 0.0, ca = 0.0;
            for (Eigen::Index m = 0; m < g.n; ++m) {
                m2 += g.weights(m) * g.nodes(m) * g.nodes(m) * rho.values(m);
                ca += g.weights(m) * g.nodes(m) * p(m) * rho.values(m);
            }
            const double oracle = 2.0 * alpha * m2 * ca * ca;
            std::printf("poly identity alpha=%.1f: hess=%.8f oracle=%.8f rel=%.2e\n", alpha,
                        h.total, oracle, std::abs(h.total - oracle) / std::abs(oracle));
            std::printf("  split check: |total-(reg+cost)| = %.2e\n",
                        std::abs(h.total - h.reg - h.cost));
        }
    }
    {
        // Hess^Reg for linear psi
        Grid1D g = default_grid(*gauss_target, 1024);
        DensityField1D rho = DensityField1D::from_target(*gauss_target, g);
        auto psi = ScalarField1D::from_function(g, [](double x) { return x; });
        for (const auto& [name, k] :
             std::vector<std::pair<const char*, KernelSpec>>{{"gauss", KernelSpec::gaussian(1.0)},
                                                             {"laplace", KernelSpec::laplace(1.0)}}) {
            HessianSplit h = hessian_form(rho, psi, k, *gauss_target);
            std::printf("HessReg linear psi %s: reg=%.6f cost=%.6f total=%.6f\n", name, h.reg,
                        h.cost, h.total);
        }
    }
    {
        // equilibrium residual
        for (const auto& [name, k] :
             std::vector<std::pair<const char*, KernelSpec>>{{"gauss", KernelSpec::gaussian(1.0)},
                                                             {"laplace", KernelSpec::laplace(1.0)}}) {
            for (int n : {512, 1024}) {
                Grid1D g = default_grid(*gauss_target, n);
                std::printf("q_eq_residual %s n=%d: %.3e\n", name, n,
                            q_equilibrium_residual(k, *gauss_target, g));
            }
        }
        // shifted density
        Grid1D g = default_grid(*gauss_target, 1024);
        auto shifted = TargetModel::gaussian(Vector::Constant(1, 0.7), Matrix::Identity(1, 1));
        DensityField1D rho = DensityField1D::from_target(shifted, g);
        std::printf("noneq residual shifted: %.3e\n",
                    nonequilibrium_residual(rho, gauss_k, *gauss_target));
    }
    {
        // geodesic conservation
        Grid1D g = Grid1D::uniform(-8.0, 8.0, 512);
        DensityField1D rho0 = DensityField1D::from_target(*gauss_target, g);
        auto psi0 = ScalarField1D::from_function(
            g, [](double x) { return 0.5 * std::tanh(x); });
        for (double dt : {1e-3, 5e-4}) {
            auto traj = geodesic_shoot(rho0, psi0, gauss_k, 0.5, dt, 100);
            double mass_drift = 0.0;
            for (const auto& r : traj.rho)
                mass_drift = std::max(mass_drift, std::abs(g.integrate(r) - 1.0));
            double sp_drift = 0.0;
            for (double s : traj.speed)
                sp_drift = std::max(sp_drift, std::abs(s - traj.speed.front()));
            std::printf("geodesic dt=%.0e: mass drift %.2e, speed rel drift %.3e\n", dt,
                        mass_drift, sp_drift / traj.speed.front());
        }
    }
    {
        // KL quadrature
        Grid1D g = default_grid(*gauss_target, 1024);
        DensityField1D pi_f = DensityField1D::from_target(*gauss_target, g);
        auto shifted = TargetModel::gaussian(Vector::Constant(1, 1.0), Matrix::Identity(1, 1));
        DensityField1D rho = DensityField1D::from_target(shifted, g);
        std::printf("KL(pi|pi)=%.2e  KL(N(1,1)|N(0,1))=%.8f\n",
                    kl_quadrature(pi_f, *gauss_target).kl, kl_quadrature(rho, *gauss_target).kl);
    }
    return 0;
}
