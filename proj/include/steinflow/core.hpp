#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace steinflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVec = Eigen::RowVectorXd;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

class DegenerateConfigurationError : public Error {
public:
    explicit DegenerateConfigurationError(const std::string& msg) : Error(msg) {}
};

class UnsupportedKernelError : public Error {
public:
    explicit UnsupportedKernelError(const std::string& msg) : Error(msg) {}
};

// Non-finite state during time integration; carries the first offending
// particle index when known.
class NumericalBlowupError : public Error {
public:
    NumericalBlowupError(const std::string& msg, long index = -1)
        : Error(msg), particle_index(index) {}
    long particle_index;
};

// Step-count budget exhausted; carries stiffness diagnostics.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& msg, double last_dt_ = 0.0, long rejections_ = 0)
        : Error(msg), last_dt(last_dt_), rejections(rejections_) {}
    double last_dt;
    long rejections;
};

class InstabilityError : public Error {
public:
    explicit InstabilityError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidInputError(msg);
}

// FNV-1a, used for output manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace steinflow
