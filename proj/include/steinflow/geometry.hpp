#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "steinflow/core.hpp"
#include "steinflow/kernels.hpp"
#include "steinflow/linalg.hpp"
#include "steinflow/targets.hpp"

namespace steinflow {

// Uniform 1D quadrature grid with trapezoidal weights and a summation-by-parts
// difference operator: central differences inside, one-sided at the ends. The
// adjoint divergence built from it telescopes exactly, which is what makes the
// transport schemes conserve mass to round-off.
struct Grid1D {
    double lo = 0.0, hi = 1.0;
    Eigen::Index n = 2;
    Vector nodes;
    Vector weights;

    static Grid1D uniform(double lo, double hi, Eigen::Index n) {
        require(hi > lo, "Grid1D: hi must exceed lo");
        require(n >= 4, "Grid1D: need at least 4 nodes");
        Grid1D g;
        g.lo = lo;
        g.hi = hi;
        g.n = n;
        g.nodes = Vector::LinSpaced(n, lo, hi);
        const double dx = (hi - lo) / static_cast<double>(n - 1);
        g.weights = Vector::Constant(n, dx);
        g.weights(0) = 0.5 * dx;
        g.weights(n - 1) = 0.5 * dx;
        return g;
    }

    double dx() const { return (hi - lo) / static_cast<double>(n - 1); }

    bool matches(const Grid1D& o) const { return lo == o.lo && hi == o.hi && n == o.n; }

    // D f ~ f'
    Vector derivative(const Vector& f) const {
        require(f.size() == n, "derivative: size mismatch");
        const double h = dx();
        Vector g(n);
        g(0) = (f(1) - f(0)) / h;
        g(n - 1) = (f(n - 1) - f(n - 2)) / h;
        for (Eigen::Index m = 1; m < n - 1; ++m) g(m) = (f(m + 1) - f(m - 1)) / (2.0 * h);
        return g;
    }

    // -(1/w) D^T (w h) ~ h', with sum_m w_m out_m = 0 exactly (weak zero-flux
    // boundary: the end rows carry an O(h_end/dx) penalty term).
    Vector adjoint_gradient(const Vector& h) const {
        require(h.size() == n, "adjoint_gradient: size mismatch");
        const double step = dx();
        Vector out(n);
        out(0) = (h(0) + h(1)) / step;
        out(n - 1) = -(h(n - 2) + h(n - 1)) / step;
        for (Eigen::Index m = 1; m < n - 1; ++m) out(m) = (h(m + 1) - h(m - 1)) / (2.0 * step);
        return out;
    }

    double integrate(const Vector& f) const {
        require(f.size() == n, "integrate: size mismatch");
        return weights.dot(f);
    }
};

inline Grid1D default_grid(const TargetModel& t, Eigen::Index n = 1024, double n_std = 10.0) {
    auto [lo, hi] = t.domain_1d(n_std);
    return Grid1D::uniform(lo, hi, n);
}

// Probability density values on a grid. Construction normalizes the
// quadrature mass unless it is already 1 to round-off; the grid restriction
// of an exactly normalized target therefore keeps its values bit-for-bit,
// which makes it an exact fixed point of the transport schemes downstream.
struct DensityField1D {
    Grid1D grid;
    Vector values;

    static DensityField1D from_values(Grid1D g, Vector v, bool normalize = true) {
        require(v.size() == g.n, "DensityField1D: size mismatch");
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            require(v(i) > -1e-12, "DensityField1D: negative density");
            if (v(i) < 0.0) v(i) = 0.0;
        }
        DensityField1D f{std::move(g), std::move(v)};
        if (normalize) {
            const double m = f.mass();
            require(m > 0.0, "DensityField1D: zero mass");
            if (std::abs(m - 1.0) > 1e-12) f.values /= m;
        }
        return f;
    }

    static DensityField1D from_target(const TargetModel& t, const Grid1D& g) {
        require(t.dim() == 1, "DensityField1D: 1D target required");
        Vector v(g.n);
        for (Eigen::Index i = 0; i < g.n; ++i) v(i) = t.density1(g.nodes(i));
        return from_values(g, std::move(v));
    }

    double mass() const { return grid.integrate(values); }

    // Inverse-CDF draws; the CDF is the trapezoidal cumulative of the grid
    // density with linear inversion inside cells.
    std::vector<double> quantiles(const std::vector<double>& probs) const {
        const Eigen::Index n = grid.n;
        Vector cdf(n);
        cdf(0) = 0.0;
        const double dx = grid.dx();
        for (Eigen::Index m = 1; m < n; ++m)
            cdf(m) = cdf(m - 1) + 0.5 * dx * (values(m - 1) + values(m));
        const double total = cdf(n - 1);
        require(total > 0.0, "quantiles: zero mass");
        std::vector<double> out;
        out.reserve(probs.size());
        for (double p : probs) {
            const double u = std::clamp(p, 0.0, 1.0) * total;
            auto it = std::lower_bound(cdf.data(), cdf.data() + n, u);
            Eigen::Index m = std::clamp<Eigen::Index>(it - cdf.data(), 1, n - 1);
            const double seg = cdf(m) - cdf(m - 1);
            const double frac = (seg > 0.0) ? (u - cdf(m - 1)) / seg : 0.0;
            out.push_back(grid.nodes(m - 1) + frac * dx);
        }
        return out;
    }

    Matrix sample(Eigen::Index n_draws, std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> u(static_cast<std::size_t>(n_draws));
        for (auto& x : u) x = unif(rng);
        auto q = quantiles(u);
        Matrix out(n_draws, 1);
        for (Eigen::Index i = 0; i < n_draws; ++i) out(i, 0) = q[static_cast<std::size_t>(i)];
        return out;
    }
};

struct ScalarField1D {
    Grid1D grid;
    Vector values;

    static ScalarField1D from_values(Grid1D g, Vector v) {
        require(v.size() == g.n, "ScalarField1D: size mismatch");
        require(v.allFinite(), "ScalarField1D: non-finite values");
        return {std::move(g), std::move(v)};
    }

    template <typename F>
    static ScalarField1D from_function(const Grid1D& g, F&& f) {
        Vector v(g.n);
        for (Eigen::Index i = 0; i < g.n; ++i) v(i) = f(g.nodes(i));
        return from_values(g, std::move(v));
    }
};

// ---------------------------------------------------------------------------
// precomputed kernel tables on a grid

inline Matrix kernel_matrix(const KernelSpec& k, const Grid1D& g) {
    Matrix out(g.n, g.n);
    for (Eigen::Index i = 0; i < g.n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = eval1(k, g.nodes(i), g.nodes(j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

// G1(i,j) = d/dx k(x, y) at (x_i, x_j); zero on the diagonal by convention.
inline Matrix grad1_matrix(const KernelSpec& k, const Grid1D& g) {
    Matrix out(g.n, g.n);
    for (Eigen::Index i = 0; i < g.n; ++i)
        for (Eigen::Index j = 0; j < g.n; ++j) out(i, j) = grad1_1d(k, g.nodes(i), g.nodes(j));
    return out;
}

// The flux density rho' + V' rho, written as pi * (rho/pi)' so that the grid
// restriction of pi yields an exactly zero vector.
inline Vector flux_density(const DensityField1D& rho, const TargetModel& t) {
    const Grid1D& g = rho.grid;
    Vector ratio(g.n), pi_vals(g.n);
    for (Eigen::Index m = 0; m < g.n; ++m) {
        pi_vals(m) = t.density1(g.nodes(m));
        ratio(m) = rho.values(m) / pi_vals(m);
    }
    Vector d = g.derivative(ratio);
    return pi_vals.cwiseProduct(d);
}

// (T_{k,rho} phi)(x_i) = sum_j w_j k(x_i,x_j) phi(x_j) rho(x_j)
inline ScalarField1D t_k_rho(const KernelSpec& k, const DensityField1D& rho,
                             const ScalarField1D& phi) {
    require(rho.grid.matches(phi.grid), "t_k_rho: grid mismatch");
    const Grid1D& g = rho.grid;
    Vector weighted = g.weights.cwiseProduct(rho.values).cwiseProduct(phi.values);
    Vector out = kernel_matrix(k, g) * weighted;
    return ScalarField1D::from_values(g, std::move(out));
}

// ---------------------------------------------------------------------------
// Hessian quadratic form of the KL divergence along kernel-transport
// directions, with its entropy/data split. Derivatives that would land on a
// possibly non-smooth kernel are moved onto the smooth factors by integration
// by parts, so only k and its first-argument gradient (off-diagonal) enter.

struct HessianSplit {
    double total = 0.0;
    double reg = 0.0;   // entropy term
    double cost = 0.0;  // data term
};

namespace detail {

struct HessianWorkspace {
    Matrix kmat;   // k(x_i, x_j)
    Matrix gmat;   // d1 k(x_i, x_j)
    Vector pi_vals, vprime, vsecond;
};

inline HessianWorkspace hessian_workspace(const KernelSpec& k, const TargetModel& t,
                                          const Grid1D& g) {
    HessianWorkspace w;
    w.kmat = kernel_matrix(k, g);
    w.gmat = grad1_matrix(k, g);
    w.pi_vals.resize(g.n);
    w.vprime.resize(g.n);
    w.vsecond.resize(g.n);
    for (Eigen::Index m = 0; m < g.n; ++m) {
        w.pi_vals(m) = t.density1(g.nodes(m));
        w.vprime(m) = t.grad_potential1(g.nodes(m));
        w.vsecond(m) = t.d2_potential1(g.nodes(m));
    }
    return w;
}

inline HessianSplit hessian_form_impl(const DensityField1D& rho, const ScalarField1D& psi,
                                      const TargetModel& t, const HessianWorkspace& w) {
    const Grid1D& g = rho.grid;
    const Vector p = g.derivative(psi.values);
    const Vector wrp = g.weights.cwiseProduct(rho.values).cwiseProduct(p);
    const Vector field_b = w.kmat * wrp;  // int k(x,y) psi'(y) drho(y)
    const Vector field_a = w.gmat * wrp;  // int d1 k(x,y) psi'(y) drho(y)

    const Vector eta_total = flux_density(rho, t);
    const Vector eta_cost = w.vprime.cwiseProduct(rho.values);
    const Vector eta_reg = eta_total - eta_cost;

    auto nonequilibrium = [&](const Vector& eta) {
        const Vector j_k = w.kmat * g.weights.cwiseProduct(eta);
        const Vector j_g = w.gmat * g.weights.cwiseProduct(eta);
        double t1 = 0.0, t2 = 0.0;
        for (Eigen::Index m = 0; m < g.n; ++m) {
            t1 -= wrp(m) * j_k(m) * field_a(m);
            t2 += wrp(m) * j_g(m) * field_b(m);
        }
        return t1 + t2;
    };
    auto coupling = [&](const Vector& eta) {
        double s = 0.0;
        for (Eigen::Index m = 0; m < g.n; ++m)
            s += g.weights(m) * eta(m) * field_a(m) * field_b(m);
        return s;
    };

    double reg3 = 0.0, cost3 = 0.0;
    for (Eigen::Index m = 0; m < g.n; ++m) {
        const double wm = g.weights(m) * rho.values(m);
        reg3 += wm * field_a(m) * field_a(m);
        cost3 += wm * w.vsecond(m) * field_b(m) * field_b(m);
    }

    HessianSplit out;
    out.reg = nonequilibrium(eta_reg) + reg3 + coupling(eta_reg);
    out.cost = nonequilibrium(eta_cost) + cost3 + coupling(eta_cost);
    out.total = nonequilibrium(eta_total) + reg3 + cost3 + coupling(eta_total);
    return out;
}

}  // namespace detail

inline HessianSplit hessian_form(const DensityField1D& rho, const ScalarField1D& psi,
                                 const KernelSpec& k, const TargetModel& t) {
    require(rho.grid.matches(psi.grid), "hessian_form: grid mismatch");
    require(t.dim() == 1, "hessian_form: 1D only");
    auto w = detail::hessian_workspace(k, t, rho.grid);
    return detail::hessian_form_impl(rho, psi, t, w);
}

// Max over grid pairs (y,z) of the two Hessian contributions that are not
// part of the equilibrium expression. They vanish at rho = pi; evaluated at
// other densities they are bounded away from zero.
inline double nonequilibrium_residual(const DensityField1D& rho, const KernelSpec& k,
                                      const TargetModel& t) {
    const Grid1D& g = rho.grid;
    const Matrix kmat = kernel_matrix(k, g);
    const Matrix gmat = grad1_matrix(k, g);
    const Vector eta = flux_density(rho, t);
    const Vector j_k = kmat * g.weights.cwiseProduct(eta);
    const Vector j_g = gmat * g.weights.cwiseProduct(eta);
    double best = 0.0;
    for (Eigen::Index m = 0; m < g.n; ++m)
        for (Eigen::Index l = 0; l < g.n; ++l)
            best = std::max(best,
                            std::abs(j_k(m) * gmat(m, l)) + std::abs(j_g(m) * kmat(m, l)));
    return best;
}

inline double q_equilibrium_residual(const KernelSpec& k, const TargetModel& t,
                                     const Grid1D& grid) {
    return nonequilibrium_residual(DensityField1D::from_target(t, grid), k, t);
}

// ---------------------------------------------------------------------------
// spectral gap of the equilibrium Stein generator

struct SpectralGapResult {
    double gap = 0.0;
    Vector spectrum;  // ascending head of the constrained spectrum
};

// Galerkin approximation of inf { a(phi,phi) / Var_pi(phi) } with
// a(phi,psi) = int int phi'(y) k(y,z) psi'(z) dpi(y) dpi(z), over hat
// functions on an n_basis-interval sub-grid (the right-end hat is dropped so
// constants are excluded). Refining n_basis by doubling gives nested spaces,
// so the computed gap is nonincreasing in n_basis.
inline SpectralGapResult stein_generator_gap(const KernelSpec& k, const TargetModel& t,
                                             const Grid1D& grid, Eigen::Index n_basis) {
    require(t.dim() == 1, "stein_generator_gap: 1D only");
    require(n_basis >= 4 && n_basis <= grid.n, "stein_generator_gap: bad basis size");
    const Eigen::Index gn = grid.n, nb = n_basis;
    const double h = (grid.hi - grid.lo) / static_cast<double>(nb);

    auto hat = [&](Eigen::Index i, double x) {
        const double ti = grid.lo + h * static_cast<double>(i);
        return std::max(0.0, 1.0 - std::abs(x - ti) / h);
    };
    // representation-independent derivative: mean of the one-sided slopes,
    // one-sided at the domain ends
    auto hat_deriv = [&](Eigen::Index i, double x) {
        const double ti = grid.lo + h * static_cast<double>(i);
        auto slope_below = [&](double z) {
            if (z <= ti - h || z > ti + h) return 0.0;
            return (z <= ti) ? 1.0 / h : -1.0 / h;
        };
        auto slope_above = [&](double z) {
            if (z < ti - h || z >= ti + h) return 0.0;
            return (z < ti) ? 1.0 / h : -1.0 / h;
        };
        if (x <= grid.lo) return slope_above(x);
        if (x >= grid.hi) return slope_below(x);
        return 0.5 * (slope_below(x) + slope_above(x));
    };

    Vector wpi(gn);
    for (Eigen::Index m = 0; m < gn; ++m)
        wpi(m) = grid.weights(m) * t.density1(grid.nodes(m));

    Matrix u(gn, nb), ud(gn, nb);
    for (Eigen::Index m = 0; m < gn; ++m) {
        const double x = grid.nodes(m);
        for (Eigen::Index i = 0; i < nb; ++i) {
            u(m, i) = hat(i, x);
            ud(m, i) = hat_deriv(i, x);
        }
    }

    const Matrix kmat = kernel_matrix(k, grid);
    const Matrix wud = wpi.asDiagonal() * ud;
    Matrix a = wud.transpose() * (kmat * wud);
    a = 0.5 * (a + a.transpose());

    Matrix mass = u.transpose() * (wpi.asDiagonal() * u);
    const Vector mean_vec = u.transpose() * wpi;
    mass -= mean_vec * mean_vec.transpose();  // variance pairing excludes constants
    mass = 0.5 * (mass + mass.transpose());

    // diagonal equilibration keeps the pencil data well-scaled in the tails
    Vector scale(nb);
    for (Eigen::Index i = 0; i < nb; ++i) {
        require(mass(i, i) > 0.0, "stein_generator_gap: degenerate mass matrix");
        scale(i) = 1.0 / std::sqrt(mass(i, i));
    }
    Matrix a_s = scale.asDiagonal() * a * scale.asDiagonal();
    Matrix m_s = scale.asDiagonal() * mass * scale.asDiagonal();

    // Spectrally filtered whitening of the mass matrix. Hat combinations that
    // are nearly constant over the bulk of pi have variance at round-off
    // level; a Cholesky factor would amplify them into the computed spectrum,
    // so they are projected out instead.
    EigenSym mass_es = jacobi_eigen_sym(m_s);
    const double mu_max = mass_es.values(nb - 1);
    if (!(mu_max > 0.0))
        throw Error("stein_generator_gap: mass matrix numerically zero");
    Eigen::Index first_kept = nb;
    for (Eigen::Index i = 0; i < nb; ++i) {
        if (mass_es.values(i) > 1e-12 * mu_max) {
            first_kept = i;
            break;
        }
    }
    const Eigen::Index r = nb - first_kept;
    if (r < 2) throw Error("stein_generator_gap: basis collapsed under filtering");
    Matrix whitener(nb, r);
    for (Eigen::Index j = 0; j < r; ++j)
        whitener.col(j) =
            mass_es.vectors.col(first_kept + j) / std::sqrt(mass_es.values(first_kept + j));
    Matrix c = whitener.transpose() * a_s * whitener;
    c = 0.5 * (c + c.transpose());

    EigenSym es = jacobi_eigen_sym(c);
    SpectralGapResult out;
    out.gap = es.values(0);
    out.spectrum = es.values.head(std::min<Eigen::Index>(r, 16));
    return out;
}

// ---------------------------------------------------------------------------

// Rayleigh coefficient of a direction Psi at equilibrium:
//   Hess_pi(Psi,Psi) / int int Psi'(y) k(y,z) Psi'(z) dpi dpi.
inline double rayleigh(const ScalarField1D& psi, const KernelSpec& k, const TargetModel& t) {
    const Grid1D& g = psi.grid;
    DensityField1D pi_field = DensityField1D::from_target(t, g);
    const Vector p = g.derivative(psi.values);
    Vector wpp(g.n);
    for (Eigen::Index m = 0; m < g.n; ++m)
        wpp(m) = g.weights(m) * t.density1(g.nodes(m)) * p(m);
    const double denom = wpp.dot(kernel_matrix(k, g) * wpp);
    if (!(denom > 0.0))
        throw InvalidInputError("rayleigh: direction has zero kernel norm (constant field?)");
    return hessian_form(pi_field, psi, k, t).total / denom;
}

// Left side of the 1D equilibrium criterion: int V'' phi^2 dpi + int (phi')^2 dpi.
inline double be_1d(const ScalarField1D& phi, const TargetModel& t) {
    require(t.dim() == 1, "be_1d: 1D only");
    const Grid1D& g = phi.grid;
    const Vector d = g.derivative(phi.values);
    double acc = 0.0;
    for (Eigen::Index m = 0; m < g.n; ++m) {
        const double pi = t.density1(g.nodes(m));
        acc += g.weights(m) * pi *
               (t.d2_potential1(g.nodes(m)) * phi.values(m) * phi.values(m) + d(m) * d(m));
    }
    return acc;
}

// RKHS norm of phi for the target-weighted Matern kernel, through the
// H^1 characterization: with f = sqrt(pi) phi, returns int (f^2 + (f')^2) dx.
inline double matern_rkhs_norm(const ScalarField1D& phi, const TargetModel& t) {
    require(t.dim() == 1, "matern_rkhs_norm: 1D only");
    const Grid1D& g = phi.grid;
    Vector f(g.n);
    for (Eigen::Index m = 0; m < g.n; ++m)
        f(m) = std::sqrt(t.density1(g.nodes(m))) * phi.values(m);
    const Vector d = g.derivative(f);
    double acc = 0.0;
    for (Eigen::Index m = 0; m < g.n; ++m)
        acc += g.weights(m) * (f(m) * f(m) + d(m) * d(m));
    return acc;
}

// ---------------------------------------------------------------------------
// geodesic shooting for the coupled transport / Hamilton-Jacobi system
//   d rho/dt = -d/dx ( rho T_{k,rho} Psi' ),   d Psi/dt = -Psi' T_{k,rho} Psi'.
// The spatial operators form an adjoint pair under the quadrature inner
// product, so the semi-discrete flow conserves mass exactly and the speed
//   s(t) = int int Psi'(y) k(y,z) Psi'(z) drho drho
// up to the RK4 time-stepping error.

struct GeodesicTrajectory {
    Grid1D grid;
    std::vector<double> times;
    std::vector<Vector> rho;
    std::vector<Vector> psi;
    std::vector<double> speed;
};

inline GeodesicTrajectory geodesic_shoot(const DensityField1D& rho0, const ScalarField1D& psi0,
                                         const KernelSpec& k, double horizon, double dt,
                                         int record_stride = 1) {
    require(rho0.grid.matches(psi0.grid), "geodesic_shoot: grid mismatch");
    require(horizon > 0.0 && dt > 0.0, "geodesic_shoot: need positive horizon and dt");
    for (Eigen::Index m = 1; m + 1 < rho0.grid.n; ++m)
        require(rho0.values(m) > 0.0, "geodesic_shoot: rho0 must be positive on the interior");

    const Grid1D& g = rho0.grid;
    const Matrix kmat = kernel_matrix(k, g);

    auto velocity = [&](const Vector& r, const Vector& p) {
        return Vector(kmat * g.weights.cwiseProduct(r).cwiseProduct(p));
    };
    struct Deriv {
        Vector dr, dp;
    };
    auto rhs = [&](const Vector& r, const Vector& s) {
        const Vector p = g.derivative(s);
        const Vector vel = velocity(r, p);
        Deriv d;
        d.dr = -g.adjoint_gradient(r.cwiseProduct(vel));
        d.dp = -p.cwiseProduct(vel);
        return d;
    };
    auto speed_of = [&](const Vector& r, const Vector& s) {
        const Vector p = g.derivative(s);
        const Vector wrp = g.weights.cwiseProduct(r).cwiseProduct(p);
        return wrp.dot(kmat * wrp);
    };

    GeodesicTrajectory traj;
    traj.grid = g;
    Vector r = rho0.values, s = psi0.values;
    double time = 0.0;
    double step = dt;
    traj.times.push_back(time);
    traj.rho.push_back(r);
    traj.psi.push_back(s);
    traj.speed.push_back(speed_of(r, s));

    int halvings = 0;
    long step_count = 0;
    while (time < horizon - 1e-12 * horizon) {
        const double h = std::min(step, horizon - time);
        const Deriv k1 = rhs(r, s);
        const Deriv k2 = rhs(r + 0.5 * h * k1.dr, s + 0.5 * h * k1.dp);
        const Deriv k3 = rhs(r + 0.5 * h * k2.dr, s + 0.5 * h * k2.dp);
        const Deriv k4 = rhs(r + h * k3.dr, s + h * k3.dp);
        Vector r_new = r + (h / 6.0) * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
        Vector s_new = s + (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
        if (r_new.minCoeff() < -1e-12 || !r_new.allFinite() || !s_new.allFinite()) {
            step *= 0.5;
            if (++halvings > 40)
                throw NonconvergenceError("geodesic_shoot: persistent positivity failure", step,
                                          halvings);
            continue;
        }
        r = std::move(r_new);
        s = std::move(s_new);
        time += h;
        ++step_count;
        if (step_count % record_stride == 0 || time >= horizon - 1e-12 * horizon) {
            traj.times.push_back(time);
            traj.rho.push_back(r);
            traj.psi.push_back(s);
            traj.speed.push_back(speed_of(r, s));
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------

struct KlBreakdown {
    double kl = 0.0;
    double reg = 0.0;   // int rho log rho
    double cost = 0.0;  // int V drho
};

// KL(rho|pi) by quadrature with the 0 log 0 := 0 convention; since targets
// are stored normalized, kl = reg + cost exactly in the continuum.
inline KlBreakdown kl_quadrature(const DensityField1D& rho, const TargetModel& t) {
    require(t.dim() == 1, "kl_quadrature: 1D only");
    const Grid1D& g = rho.grid;
    KlBreakdown out;
    for (Eigen::Index m = 0; m < g.n; ++m) {
        const double r = rho.values(m);
        if (r <= 0.0) continue;
        const double x = g.nodes(m);
        const double v = t.potential1(x);
        out.kl += g.weights(m) * r * (std::log(r) + v);
        out.reg += g.weights(m) * r * std::log(r);
        out.cost += g.weights(m) * r * v;
    }
    return out;
}

}  // namespace steinflow
