// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace layerlab {

inline constexpr double pi = 3.14159265358979323846;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid argument / precondition violation on caller-supplied data.
struct DomainError : Error {
    using Error::Error;
};

/// A time stepper or linear solve produced non-finite values.
struct SolverError : Error {
    using Error::Error;
};

/// Scenario data could not be evaluated or violates structural hypotheses.
struct ScenarioError : Error {
    using Error::Error;
};

/// Config file parsing / CLI usage problems.
struct ConfigError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

inline bool is_finite(double x) noexcept { return std::isfinite(x); }

inline bool all_finite(const std::vector<double>& v) noexcept {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// sqrt(1 + Z^2), the polynomial weight of the corrector decay estimates.
inline double z_weight(double Z) noexcept { return std::sqrt(1.0 + Z * Z); }

/// Wrap x into [0, L). Assumes L > 0.
inline double wrap_periodic(double x, double L) noexcept {
    double r = std::fmod(x, L);
    if (r < 0.0) r += L;
    return r;
}

inline bool nearly_equal(double a, double b, double rel = 1e-12, double abs = 1e-14) noexcept {
    double d = std::fabs(a - b);
    if (d <= abs) return true;
    return d <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace layerlab
