#pragma once

// Shared error types and small helpers used across the library.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bookmaker {

/// Invalid model or configuration data (bad probabilities, empty outcome set, ...).
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to converge or a tolerance is unreachable.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A required precomputation (eg. an envelope grid) is missing.
struct configuration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pricing policy produced a price the arrival model cannot handle.
struct policy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_probability(double p) { return p > 0.0 && p < 1.0; }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw validation_error(msg);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace bookmaker
