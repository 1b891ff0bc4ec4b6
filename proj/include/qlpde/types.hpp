#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlpde {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline bool is_unbounded(double v) { return std::isinf(v) && v > 0; }

/// Closed interval [lo, hi]. Zero width is allowed.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool empty() const { return hi < lo; }
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

inline bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

enum class Direction { plus, minus };

inline double direction_sign(Direction d) { return d == Direction::plus ? 1.0 : -1.0; }

inline const char* to_string(Direction d) { return d == Direction::plus ? "plus" : "minus"; }

/// Selects the serial reference loop or the OpenMP kernel.
enum class ExecPolicy { serial, parallel };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite evaluator output or evaluator failure.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Empty cross-sections, points outside their domain, inconsistent sets.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// The implicit step-extent condition is not satisfied.
class LocalityError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

std::string format_point(std::span<const double> p);

inline double norm1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace qlpde
