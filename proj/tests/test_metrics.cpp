#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "steinflow/meanfield.hpp"
#include "steinflow/metrics.hpp"

using namespace steinflow;

namespace {

Matrix column(const std::vector<double>& v) {
    Matrix m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
    return m;
}

std::vector<double> random_points(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> out(n);
    for (auto& x : out) x = unif(rng);
    return out;
}

}  // namespace

TEST_CASE("w1_1d basics") {
    CHECK(w1_1d(std::vector<double>{0.0, 1.0}, {0.0, 1.0}) == 0.0);
    CHECK(w1_1d(std::vector<double>{0.0}, {1.0}) == 1.0);
    CHECK_THROWS_AS(w1_1d(std::vector<double>{}, {1.0}), InvalidInputError);

    // unequal sizes: {0} vs {0,1} couples half the mass across distance 1
    CHECK_THAT(w1_1d(std::vector<double>{0.0}, {0.0, 1.0}), Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("w1_1d agrees with the assignment oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_points(rng, 40, -2.0, 2.0);
        auto b = random_points(rng, 40, -1.0, 3.0);
        const double exact = w1_1d(a, b);
        const double assigned = w1_assignment(column(a), column(b));
        CHECK_THAT(exact, Catch::Matchers::WithinAbs(assigned, 1e-10));
    }
}

TEST_CASE("w1_assignment basics") {
    std::mt19937_64 rng(37);
    Matrix a(5, 2);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = std::uniform_real_distribution<>(-1, 1)(rng);
    CHECK(w1_assignment(a, a) == 0.0);

    // two points, crossing cheaper: brute force over both matchings
    Matrix x(2, 2), y(2, 2);
    x << 0.0, 0.0, 1.0, 0.0;
    y << 1.1, 0.0, -0.1, 0.0;
    const double direct = ((x.row(0) - y.row(0)).norm() + (x.row(1) - y.row(1)).norm()) / 2.0;
    const double crossed = ((x.row(0) - y.row(1)).norm() + (x.row(1) - y.row(0)).norm()) / 2.0;
    CHECK_THAT(w1_assignment(x, y), Catch::Matchers::WithinAbs(std::min(direct, crossed), 1e-14));

    Matrix b(3, 2);
    CHECK_THROWS_AS(w1_assignment(a, b), InvalidInputError);
}

TEST_CASE("metric axioms on random 1D triples") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_points(rng, 15, -2, 2);
        auto b = random_points(rng, 15, -2, 2);
        auto c = random_points(rng, 15, -2, 2);
        CHECK(w1_1d(a, a) == 0.0);
        CHECK(w1_1d(a, b) == w1_1d(b, a));
        CHECK(w1_1d(a, c) <= w1_1d(a, b) + w1_1d(b, c) + 1e-12);
    }
}

TEST_CASE("w1_1d translation invariance") {
    // dyadic data keeps the shifted differences exact
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<int> ints(-64, 64);
    std::vector<double> a(20), b(20);
    for (auto& x : a) x = ints(rng) / 16.0;
    for (auto& x : b) x = ints(rng) / 16.0;
    std::vector<double> as = a, bs = b;
    for (auto& x : as) x += 3.5;
    for (auto& x : bs) x += 3.5;
    CHECK(w1_1d(as, bs) == w1_1d(a, b));
}

TEST_CASE("sinkhorn approximates exact transport") {
    std::mt19937_64 rng(47);
    auto a = random_points(rng, 40, 0.0, 1.0);
    auto b = random_points(rng, 40, 0.8, 1.8);  // well-separated: W1 about 0.8

    SECTION("identical sets stay near zero") {
        auto r = w1_sinkhorn(column(a), column(a), 0.01, 4000);
        CHECK(r.cost >= 0.0);
        CHECK(r.cost <= 0.02);
    }

    SECTION("small epsilon approaches the exact 1D value") {
        const double exact = w1_1d(a, b);
        auto r = w1_sinkhorn(column(a), column(b), 0.005, 8000);
        CHECK(r.converged);
        CHECK_THAT(r.cost, Catch::Matchers::WithinRel(exact, 0.02));
    }

    SECTION("cost decreases toward the assignment value as epsilon shrinks") {
        std::mt19937_64 rng2(53);
        auto c = random_points(rng2, 64, 0.0, 1.0);
        auto d = random_points(rng2, 64, 0.7, 1.9);
        const double exact = w1_assignment(column(c), column(d));
        double prev = std::numeric_limits<double>::infinity();
        for (double eps : {0.2, 0.05, 0.02, 0.005}) {
            auto r = w1_sinkhorn(column(c), column(d), eps, 8000);
            CHECK(r.cost <= prev + 1e-6);
            prev = r.cost;
        }
        CHECK_THAT(prev, Catch::Matchers::WithinRel(exact, 0.02));
    }
}

TEST_CASE("stein fisher vanishes at equilibrium") {
    auto t = TargetModel::standard_normal(1);
    std::mt19937_64 rng(61);
    Matrix sample = t.sample(2000, rng);
    auto est = stein_fisher_detail(sample, KernelSpec::gaussian(1.0), t);
    CHECK(std::abs(est.value) <= 3.0 * est.std_error);
    CHECK(est.value >= -3.0 * est.std_error);
}

TEST_CASE("stein fisher U-statistic matches the quadrature oracle") {
    auto pi = TargetModel::standard_normal(1);
    auto rho_model = TargetModel::gaussian(Vector::Constant(1, 0.5), Matrix::Identity(1, 1));
    auto kernel = KernelSpec::gaussian(1.0);

    Grid1D grid = Grid1D::uniform(-10.0, 10.0, 2048);
    DensityField1D rho = DensityField1D::from_target(rho_model, grid);
    const double oracle = stein_fisher_quadrature(rho, kernel, pi);

    std::mt19937_64 rng(67);
    Matrix sample = rho_model.sample(10000, rng);
    auto est = stein_fisher_detail(sample, kernel, pi);
    CHECK(std::abs(est.value - oracle) <= 3.0 * est.std_error);
}

TEST_CASE("duplicating samples leaves the V-statistic unchanged") {
    auto t = TargetModel::standard_normal(1);
    std::mt19937_64 rng(71);
    Matrix sample = t.sample(200, rng);
    Matrix doubled(400, 1);
    doubled << sample, sample;
    auto kernel = KernelSpec::gaussian(0.8);
    const double v1 = stein_fisher_detail(sample, kernel, t, true).value;
    const double v2 = stein_fisher_detail(doubled, kernel, t, true).value;
    CHECK_THAT(v1, Catch::Matchers::WithinRel(v2, 1e-12));
}

TEST_CASE("stein fisher with the Laplace kernel excludes the diagonal") {
    // Off the diagonal the Laplace Stein kernel is classical, but its
    // distributional part (a delta on the diagonal from the kink) never
    // enters the pair sum: at equilibrium the population value of the
    // off-diagonal statistic is -(2/sigma) E[pi(X)], not zero.
    auto t = TargetModel::standard_normal(1);
    std::mt19937_64 rng(73);
    Matrix sample = t.sample(4000, rng);
    auto est = stein_fisher_detail(sample, KernelSpec::laplace(1.0), t);
    const double expected = -2.0 * (1.0 / (2.0 * std::sqrt(M_PI)));  // -(2/1) int pi^2
    CHECK(std::isfinite(est.value));
    CHECK(std::abs(est.value - expected) <= 3.0 * est.std_error);
}

TEST_CASE("histogram") {
    Histogram single = histogram({0.5, 0.7}, 1, 0.0, 2.0);
    CHECK(single.densities(0) == 0.5);

    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
    Histogram flat = histogram(grid, 10, 0.0, 1.0);
    for (int b = 0; b < 10; ++b)
        CHECK_THAT(flat.densities(b), Catch::Matchers::WithinRel(1.0, 1e-12));

    auto t = TargetModel::standard_normal(1);
    std::mt19937_64 rng(79);
    Matrix sample = t.sample(100000, rng);
    std::vector<double> xs(sample.data(), sample.data() + sample.rows());
    Histogram h = histogram(xs, 50, -4.0, 4.0);
    // compare against the normal pdf at bin centers, corrected for the
    // in-range normalization
    const double inside = 0.999936657516334;  // P(|Z| <= 4)
    double worst = 0.0;
    for (int b = 0; b < 50; ++b) {
        const double center = 0.5 * (h.edges(b) + h.edges(b + 1));
        const double pdf = std::exp(-0.5 * center * center) / std::sqrt(2.0 * M_PI) / inside;
        worst = std::max(worst, std::abs(h.densities(b) - pdf));
    }
    CHECK(worst <= 0.02);
}
