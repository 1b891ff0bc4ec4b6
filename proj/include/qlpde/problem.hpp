#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlpde/types.hpp"

namespace qlpde {

/// Axis-aligned box |x_j - center_j| <= half_width_j.
struct BoxDomain {
    std::vector<double> center;
    std::vector<double> half_widths;

    std::size_t dim() const { return center.size(); }
    Interval axis(std::size_t j) const { return {center[j] - half_widths[j], center[j] + half_widths[j]}; }
    std::vector<Interval> extents() const;
    bool contains(std::span<const double> p, double tol = 0.0) const;
    /// Smallest half width; the scalar a (or b) of the theory.
    double min_half_width() const;

    static BoxDomain uniform(std::vector<double> center, double half_width);
};

/// (x, y, out) -> out. C fills n*(m-1) entries row-major, entry i*(m-1)+l.
using FieldFn = std::function<void(std::span<const double> x, std::span<const double> y, std::span<double> out)>;
using InitialFn = std::function<void(std::span<const double> u, std::span<double> out)>;

struct CoefficientEvaluators {
    FieldFn C;
    FieldFn D;
};

struct InitialCondition {
    InitialFn I;
    double L_I = 0.0;
};

struct ConstantBundle {
    int m = 2;
    int n = 1;
    double L_C = 0.0;
    double L_D = 0.0;
    double M_norm_D = 0.0;
    double M_norm_C = 0.0;
    std::vector<double> M_C;
    std::vector<double> m_C;
    /// Set when the values come from sampling rather than analysis.
    bool estimated = false;
};

/// Checks the bundle's own invariants; throws ConfigError.
void check_bundle(const ConstantBundle& c);

struct ProblemSpec {
    std::string name;
    int m = 2;
    int n = 1;
    BoxDomain P1;
    BoxDomain P2;
    double a_bar = 0.0;
    CoefficientEvaluators coeffs;
    InitialCondition init;
    ConstantBundle constants;

    double a() const { return P1.min_half_width(); }
    double b() const { return P2.min_half_width(); }
    /// The initial hyperplane V as extents in x_1..x_{m-1}.
    std::vector<Interval> initial_extents() const;
};

/// Checked evaluation: non-finite output raises EvaluationError naming the point.
void eval_C(const ProblemSpec& spec, std::span<const double> x, std::span<const double> y, std::span<double> out);
void eval_D(const ProblemSpec& spec, std::span<const double> x, std::span<const double> y, std::span<double> out);
void eval_I(const ProblemSpec& spec, std::span<const double> u, std::span<double> out);

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    double declared = 0.0;
    double sampled = 0.0;
};

struct ValidationReport {
    std::vector<HypothesisCheck> checks;
    /// max over the sample of ||I(u) - y0||_inf.
    double M_I = 0.0;
    std::size_t points = 0;
    /// False when the grid was too large and random sampling was used.
    bool full_grid = true;

    bool passed() const;
    const HypothesisCheck* find(const std::string& name) const;
};

struct SamplingOptions {
    int samples_per_axis = 9;
    std::size_t max_points = std::size_t{1} << 18;
    std::uint64_t seed = 0;
};

ValidationReport validate_problem(const ProblemSpec& spec, const SamplingOptions& opts);
ValidationReport validate_problem(const ProblemSpec& spec, int samples_per_axis);

/// Sampled sup of ||I(u) - y0||_inf over V.
double initial_deviation(const ProblemSpec& spec, int samples_per_axis);

/// Sampled constants for a spec whose `constants` field is ignored. Norm
/// bounds and Lipschitz estimates are multiplied by `safety`; the C bounds
/// are widened about their midpoint by the same factor.
ConstantBundle estimate_constants(const ProblemSpec& spec, const SamplingOptions& opts, double safety);
ConstantBundle estimate_constants(const ProblemSpec& spec, int samples_per_axis, double safety);

/// Sampled 1-norm Lipschitz estimate of I over V.
double estimate_initial_lipschitz(const ProblemSpec& spec, int samples_per_axis);

}  // namespace qlpde
