#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "steinflow/core.hpp"

namespace steinflow {

// Target distribution pi = e^{-V} with V = -log(pi), stored fully normalized
// so that KL and Stein-Fisher diagnostics are absolute numbers. A plain
// Gaussian is kept as a one-component mixture.
class TargetModel {
public:
    enum class Kind { Gaussian, GaussianMixture };

    static TargetModel gaussian(Vector mean, Matrix cov) {
        return TargetModel(Kind::Gaussian, {1.0}, {std::move(mean)}, {std::move(cov)});
    }

    static TargetModel standard_normal(Eigen::Index d) {
        return gaussian(Vector::Zero(d), Matrix::Identity(d, d));
    }

    static TargetModel gaussian_mixture(std::vector<double> weights, std::vector<Vector> means,
                                        std::vector<Matrix> covs) {
        return TargetModel(Kind::GaussianMixture, std::move(weights), std::move(means),
                           std::move(covs));
    }

    // The two Gaussian-mixture benchmarks used throughout the experiments:
    // a 1D four-mode mixture with modes at +-2 and +-6, and a 2D six-mode
    // mixture with four tight modes and two wide ones.
    static TargetModel paper_1d() {
        auto mk = [](double mu) { return Vector::Constant(1, mu); };
        Matrix unit = Matrix::Identity(1, 1);
        return gaussian_mixture({0.25, 0.25, 0.25, 0.25}, {mk(2.0), mk(-2.0), mk(6.0), mk(-6.0)},
                                {unit, unit, unit, unit});
    }

    static TargetModel paper_2d() {
        auto mk = [](double a, double b) {
            Vector v(2);
            v << a, b;
            return v;
        };
        Matrix tight = 0.2 * Matrix::Identity(2, 2);
        Matrix wide = Matrix::Zero(2, 2);
        wide(0, 0) = 10.0;
        wide(1, 1) = 0.5;
        const double w = 1.0 / 6.0;
        return gaussian_mixture({w, w, w, w, w, w},
                                {mk(-5.0, -1.0), mk(-5.0, 1.0), mk(5.0, -1.0), mk(5.0, 1.0),
                                 mk(0.0, 1.0), mk(0.0, -1.0)},
                                {tight, tight, tight, tight, wide, wide});
    }

    Kind kind() const { return kind_; }
    Eigen::Index dim() const { return dim_; }
    Eigen::Index components() const { return static_cast<Eigen::Index>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<Vector>& means() const { return means_; }
    const std::vector<Matrix>& covariances() const { return covs_; }

    double log_density(const Vector& x) const {
        require(x.size() == dim_, "log_density: dimension mismatch");
        double m = -std::numeric_limits<double>::infinity();
        scratch_.resize(weights_.size());
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            scratch_[j] = log_weight_[j] + component_log_pdf(j, x);
            m = std::max(m, scratch_[j]);
        }
        double acc = 0.0;
        for (double l : scratch_) acc += std::exp(l - m);
        return m + std::log(acc);
    }

    double density(const Vector& x) const { return std::exp(log_density(x)); }

    // V(x) = -log pi(x); finite everywhere by the log-sum-exp evaluation.
    double potential(const Vector& x) const { return -log_density(x); }

    Vector grad_potential(const Vector& x) const {
        require(x.size() == dim_, "grad_potential: dimension mismatch");
        std::vector<double> logs(weights_.size());
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            logs[j] = log_weight_[j] + component_log_pdf(j, x);
            m = std::max(m, logs[j]);
        }
        double denom = 0.0;
        for (double l : logs) denom += std::exp(l - m);
        Vector g = Vector::Zero(dim_);
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            const double r = std::exp(logs[j] - m) / denom;
            g += r * (inv_covs_[j] * (x - means_[j]));
        }
        return g;
    }

    // Scalar fast paths for the 1D quadrature modules.
    double log_density1(double x) const {
        Vector v(1);
        v(0) = x;
        return log_density(v);
    }
    double density1(double x) const { return std::exp(log_density1(x)); }
    double potential1(double x) const { return -log_density1(x); }
    double grad_potential1(double x) const {
        require(dim_ == 1, "grad_potential1: 1D only");
        double a = 0.0, b = 0.0;  // responsibilities against d(log pdf)/dx
        std::vector<double> logs(weights_.size());
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            logs[j] = log_weight_[j] + component_log_pdf1(j, x);
            m = std::max(m, logs[j]);
        }
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            const double r = std::exp(logs[j] - m);
            a += r;
            b += r * (x - means_[j](0)) * inv_covs_[j](0, 0);
        }
        return b / a;
    }

    // V'' for 1D targets, through mixture responsibilities.
    double d2_potential1(double x) const {
        require(dim_ == 1, "d2_potential1: 1D only");
        std::vector<double> logs(weights_.size());
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            logs[j] = log_weight_[j] + component_log_pdf1(j, x);
            m = std::max(m, logs[j]);
        }
        double denom = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            const double r = std::exp(logs[j] - m);
            const double invvar = inv_covs_[j](0, 0);
            const double u = (x - means_[j](0)) * invvar;
            denom += r;
            s1 += r * (-u);                 // S'/S contribution
            s2 += r * (u * u - invvar);     // S''/S contribution
        }
        const double a = s1 / denom;
        const double b = s2 / denom;
        return -b + a * a;
    }

    // i.i.d. draws: categorical component choice, then a Gaussian draw.
    Matrix sample(Eigen::Index n, std::mt19937_64& rng) const {
        require(n >= 1, "sample: n must be >= 1");
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix out(n, dim_);
        Vector z(dim_);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = unif(rng);
            std::size_t j = 0;
            double acc = 0.0;
            for (; j + 1 < weights_.size(); ++j) {
                acc += weights_[j];
                if (u <= acc) break;
            }
            for (Eigen::Index c = 0; c < dim_; ++c) z(c) = normal(rng);
            out.row(i) = (means_[j] + chol_[j] * z).transpose();
        }
        return out;
    }

    // Truncation interval for 1D quadrature grids: all means padded by a
    // multiple of the largest component standard deviation.
    std::pair<double, double> domain_1d(double n_std = 10.0) const {
        require(dim_ == 1, "domain_1d: 1D only");
        double lo = means_[0](0), hi = means_[0](0), s = 0.0;
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            lo = std::min(lo, means_[j](0));
            hi = std::max(hi, means_[j](0));
            s = std::max(s, std::sqrt(covs_[j](0, 0)));
        }
        return {lo - n_std * s, hi + n_std * s};
    }

private:
    TargetModel(Kind kind, std::vector<double> weights, std::vector<Vector> means,
                std::vector<Matrix> covs)
        : kind_(kind), weights_(std::move(weights)), means_(std::move(means)),
          covs_(std::move(covs)) {
        require(!weights_.empty() && weights_.size() == means_.size() &&
                    weights_.size() == covs_.size(),
                "TargetModel: component count mismatch");
        dim_ = means_[0].size();
        double wsum = 0.0;
        for (double w : weights_) {
            require(w > 0.0, "TargetModel: weights must be positive");
            wsum += w;
        }
        require(std::abs(wsum - 1.0) < 1e-12, "TargetModel: weights must sum to 1");
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            require(means_[j].size() == dim_ && covs_[j].rows() == dim_ && covs_[j].cols() == dim_,
                    "TargetModel: component dimension mismatch");
            Eigen::LLT<Matrix> llt(covs_[j]);
            require(llt.info() == Eigen::Success, "TargetModel: covariance not SPD");
            chol_.push_back(llt.matrixL());
            inv_covs_.push_back(llt.solve(Matrix::Identity(dim_, dim_)));
            double log_det = 0.0;
            for (Eigen::Index i = 0; i < dim_; ++i) log_det += 2.0 * std::log(chol_[j](i, i));
            log_norm_.push_back(-0.5 * (static_cast<double>(dim_) * std::log(2.0 * M_PI) + log_det));
            log_weight_.push_back(std::log(weights_[j]));
        }
    }

    double component_log_pdf(std::size_t j, const Vector& x) const {
        Vector d = x - means_[j];
        return log_norm_[j] - 0.5 * d.dot(inv_covs_[j] * d);
    }
    double component_log_pdf1(std::size_t j, double x) const {
        const double d = x - means_[j](0);
        return log_norm_[j] - 0.5 * d * d * inv_covs_[j](0, 0);
    }

    Kind kind_;
    std::vector<double> weights_;
    std::vector<Vector> means_;
    std::vector<Matrix> covs_;
    std::vector<Matrix> chol_;
    std::vector<Matrix> inv_covs_;
    std::vector<double> log_norm_;
    std::vector<double> log_weight_;
    Eigen::Index dim_ = 0;
    mutable std::vector<double> scratch_;
};

}  // namespace steinflow
