#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "steinflow/kernels.hpp"
#include "steinflow/linalg.hpp"

using namespace steinflow;

namespace {

Vector vec1(double x) { return Vector::Constant(1, x); }

// independent central-difference oracle for d/dx k(x,y) in 1D
double fd_grad1(const KernelSpec& k, double x, double y, double h = 1e-6) {
    return (eval1(k, x + h, y) - eval1(k, x - h, y)) / (2.0 * h);
}

}  // namespace

TEST_CASE("p-exponential evaluation") {
    auto gauss = KernelSpec::gaussian(1.0);
    CHECK(eval1(gauss, 0.7, 0.7) == 1.0);
    CHECK(eval1(gauss, -3.2, -3.2) == 1.0);

    auto laplace = KernelSpec::laplace(1.0);
    CHECK_THAT(eval1(laplace, 0.0, std::log(2.0)), Catch::Matchers::WithinAbs(0.5, 1e-15));

    // multi-d agrees with the radial profile
    Vector x(2), y(2);
    x << 1.0, 2.0;
    y << 1.0, 0.0;
    CHECK_THAT(eval(gauss, x, y), Catch::Matchers::WithinAbs(std::exp(-4.0), 1e-15));

    CHECK_THROWS_AS(eval1(gauss, std::nan(""), 0.0), InvalidInputError);
    CHECK_THROWS_AS(KernelSpec::p_exponential(2.5, 1.0), InvalidInputError);
    CHECK_THROWS_AS(KernelSpec::p_exponential(1.0, 0.0), InvalidInputError);
}

TEST_CASE("polynomial kernel") {
    auto poly = KernelSpec::polynomial(true);
    CHECK(eval1(poly, 2.0, 3.0) == 7.0);
    CHECK(eval1(KernelSpec::polynomial(false), 2.0, 3.0) == 6.0);
    CHECK(grad1_1d(poly, 2.0, 3.0) == 3.0);
    CHECK(cross_derivative_trace(poly, vec1(2.0), vec1(3.0)) == 1.0);
}

TEST_CASE("grad1 values and conventions") {
    auto gauss = KernelSpec::gaussian(1.0);
    auto laplace = KernelSpec::laplace(1.0);

    CHECK(grad1_1d(gauss, 0.3, 0.3) == 0.0);
    CHECK(grad1_1d(laplace, 0.3, 0.3) == 0.0);  // zero-at-diagonal convention

    const double expected = -2.0 * std::exp(-1.0);
    CHECK_THAT(grad1_1d(gauss, 1.0, 0.0), Catch::Matchers::WithinAbs(expected, 1e-14));
    CHECK_THAT(fd_grad1(gauss, 1.0, 0.0), Catch::Matchers::WithinAbs(expected, 1e-8));
}

TEST_CASE("gradient consistency against finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    auto target = std::make_shared<const TargetModel>(TargetModel::standard_normal(1));
    std::vector<KernelSpec> kernels = {
        KernelSpec::gaussian(0.8), KernelSpec::laplace(1.3), KernelSpec::p_exponential(0.7, 1.0),
        KernelSpec::weighted_matern(target), KernelSpec::polynomial(true),
        KernelSpec::weighted_sum({{0.5, KernelSpec::gaussian(1.0)},
                                  {2.0, KernelSpec::laplace(0.5)}})};
    for (const auto& k : kernels) {
        for (int trial = 0; trial < 50; ++trial) {
            double x = unif(rng), y = unif(rng);
            if (std::abs(x - y) <= 1e-3) continue;  // p<=1 kernels kink at the diagonal
            const double g = grad1_1d(k, x, y);
            const double fd = fd_grad1(k, x, y);
            CHECK_THAT(g, Catch::Matchers::WithinRel(fd, 1e-5) ||
                              Catch::Matchers::WithinAbs(fd, 1e-9));
        }
    }
}

TEST_CASE("cross derivative against finite differences") {
    auto kernels = {KernelSpec::gaussian(1.2), KernelSpec::laplace(0.9)};
    const double h = 1e-5;
    for (const auto& k : kernels) {
        for (double x : {-1.3, 0.2}) {
            for (double y : {0.9, 2.4}) {
                const double fd = (eval1(k, x + h, y + h) - eval1(k, x + h, y - h) -
                                   eval1(k, x - h, y + h) + eval1(k, x - h, y - h)) /
                                  (4.0 * h * h);
                CHECK_THAT(cross_derivative_trace(k, vec1(x), vec1(y)),
                           Catch::Matchers::WithinRel(fd, 1e-4));
            }
        }
    }
    // smooth case is defined on the diagonal, Laplace is not
    CHECK(cross_derivative_trace(KernelSpec::gaussian(2.0), vec1(1.0), vec1(1.0)) ==
          2.0 / 4.0);
    CHECK_THROWS_AS(cross_derivative_trace(KernelSpec::laplace(1.0), vec1(1.0), vec1(1.0)),
                    UnsupportedKernelError);
}

TEST_CASE("kernel symmetry") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    auto target = std::make_shared<const TargetModel>(TargetModel::standard_normal(1));
    std::vector<KernelSpec> kernels = {KernelSpec::gaussian(1.0), KernelSpec::laplace(0.7),
                                       KernelSpec::p_exponential(0.5, 1.5),
                                       KernelSpec::weighted_matern(target),
                                       KernelSpec::polynomial(false)};
    for (const auto& k : kernels)
        for (int i = 0; i < 200; ++i) {
            double x = unif(rng), y = unif(rng);
            CHECK(eval1(k, x, y) == eval1(k, y, x));
        }
}

TEST_CASE("weighted sum is exactly linear") {
    auto k1 = KernelSpec::gaussian(1.0);
    auto k2 = KernelSpec::laplace(2.0);
    auto sum = KernelSpec::weighted_sum({{0.3, k1}, {1.7, k2}});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        double x = unif(rng), y = unif(rng);
        CHECK(eval1(sum, x, y) == 0.3 * eval1(k1, x, y) + 1.7 * eval1(k2, x, y));
    }
}

TEST_CASE("weighted Matern closed form") {
    auto target = std::make_shared<const TargetModel>(TargetModel::standard_normal(1));
    auto k = KernelSpec::weighted_matern(target);
    for (double x : {-1.5, 0.0, 2.0}) {
        for (double y : {-0.5, 1.0}) {
            const double expected = std::exp(-std::abs(x - y)) /
                                    std::sqrt(target->density1(x) * target->density1(y));
            CHECK_THAT(eval1(k, x, y), Catch::Matchers::WithinRel(expected, 1e-13));
        }
    }
}

TEST_CASE("median heuristic bandwidth") {
    Matrix pts(3, 1);
    pts << 0.0, 1.0, 3.0;
    // pairwise distances {1,2,3}, median 2
    CHECK_THAT(median_bandwidth(pts, 2.0, 3),
               Catch::Matchers::WithinRel(2.0 / std::sqrt(std::log(3.0)), 1e-14));

    Matrix two(2, 1);
    two << 0.0, 1.0;
    CHECK_THAT(median_bandwidth(two, 1.0, 2),
               Catch::Matchers::WithinRel(1.0 / std::log(2.0), 1e-14));

    Matrix same = Matrix::Zero(4, 2);
    CHECK_THROWS_AS(median_bandwidth(same, 2.0, 4), DegenerateConfigurationError);
}

TEST_CASE("gram matrix") {
    auto gauss = KernelSpec::gaussian(1.0);
    Matrix one(1, 1);
    one << 0.4;
    CHECK(gram(gauss, one, 1.0)(0, 0) == 1.0);

    Matrix far(3, 1);
    far << 0.0, 100.0, 200.0;
    Matrix g = gram(gauss, far, 0.5);
    CHECK_THAT((g - 0.5 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(),
               Catch::Matchers::WithinAbs(0.0, 1e-300));

    // double-loop oracle on a random set
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Matrix pts(8, 1);
    for (int i = 0; i < 8; ++i) pts(i, 0) = unif(rng);
    Matrix gg = gram(gauss, pts, 1.0 / 8.0);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            const double oracle = std::exp(-std::pow(pts(i, 0) - pts(j, 0), 2)) / 8.0;
            CHECK_THAT(gg(i, j), Catch::Matchers::WithinAbs(oracle, 1e-14));
        }
}

TEST_CASE("gram matrices are PSD for every variant") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::uniform_int_distribution<int> size(2, 12);
    auto target = std::make_shared<const TargetModel>(TargetModel::standard_normal(1));
    std::vector<KernelSpec> kernels = {
        KernelSpec::gaussian(1.0), KernelSpec::laplace(1.0), KernelSpec::p_exponential(0.5, 2.0),
        KernelSpec::weighted_matern(target), KernelSpec::polynomial(true),
        KernelSpec::weighted_sum({{1.0, KernelSpec::polynomial(false)},
                                  {0.1, KernelSpec::gaussian(1.0)}})};
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size(rng);
        Matrix pts(n, 1);
        for (int i = 0; i < n; ++i) pts(i, 0) = unif(rng);
        for (const auto& k : kernels) {
            Matrix g = gram(k, pts, 1.0);
            const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
            CHECK(jacobi_eigen_sym(g).values(0) >= -1e-10 * scale);
        }
    }
}

TEST_CASE("gram square root") {
    CHECK((gram_sqrt(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-14);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    Matrix s = gram_sqrt(d);
    CHECK_THAT(s(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(s(1, 1), Catch::Matchers::WithinAbs(3.0, 1e-12));
    CHECK_THAT(s(0, 1), Catch::Matchers::WithinAbs(0.0, 1e-12));

    // residual check on a random PSD Gram matrix
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix pts(10, 1);
    for (int i = 0; i < 10; ++i) pts(i, 0) = normal(rng);
    Matrix g = gram(KernelSpec::gaussian(1.0), pts, 0.1);
    Matrix root = gram_sqrt(g);
    const double res = (root * root - g).norm();
    CHECK(res <= 1e-8 * (1.0 + g.norm()));
    CHECK((root - root.transpose()).cwiseAbs().maxCoeff() < 1e-14);

    Matrix asym = Matrix::Zero(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(gram_sqrt(asym), InvalidInputError);
}

TEST_CASE("grad1 antisymmetry for translation-invariant kernels") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (const auto& k : {KernelSpec::gaussian(0.9), KernelSpec::laplace(1.4)}) {
        for (int i = 0; i < 100; ++i) {
            double x = unif(rng), y = unif(rng);
            CHECK(grad1_1d(k, x, y) == -grad1_1d(k, y, x));
        }
    }
}
