#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlpde/types.hpp"

namespace qlpde {

using OdeFn = std::function<void(double t, std::span<const double> y, std::span<double> out)>;

struct OdeProblem {
    std::string name;
    int n = 1;
    OdeFn f;
    double L_f = 0.0;      // Lipschitz in y, 1-norm
    double M_norm_f = 0.0;  // sup of ||f||_inf on R
    double L_t = 0.0;      // Lipschitz in t
    double t0 = 0.0;
    std::vector<double> y0;
    double a = 1.0;
    double b = 1.0;
    double alpha = 1.0;

    /// min{a, b / M_norm_f}
    static double alpha_rule(double a, double b, double M_norm_f);
};

struct OdeBrackets {
    int N = 0;
    int n = 1;
    double alpha = 0.0;
    double t0 = 0.0;
    Direction direction = Direction::plus;
    double L_f = 0.0;
    /// Row-major [k][i], k = 0..2^N.
    std::vector<double> lower;
    std::vector<double> upper;
    /// Lipschitz inflation added to each sampled extremum at step k (index 0 unused).
    std::vector<double> inflation;
    std::size_t escapes = 0;
    std::vector<std::string> diagnostics;

    int steps() const { return 1 << N; }
    double step() const;
    double time(int k) const;
    double lo(int k, int i) const { return lower[static_cast<std::size_t>(k) * n + i]; }
    double hi(int k, int i) const { return upper[static_cast<std::size_t>(k) * n + i]; }
    double max_gap() const;
    double max_inflation() const;
};

OdeBrackets ode_bracket_solve(const OdeProblem& p, int N, int extremization_samples,
                              Direction direction = Direction::plus, ExecPolicy policy = ExecPolicy::serial);

struct OdeNestingReport {
    bool passed = true;
    double tolerance = 0.0;
    double worst_violation = 0.0;  // largest amount by which fine leaves coarse
    std::size_t checked = 0;
};

OdeNestingReport ode_verify_nesting(const OdeBrackets& coarse, const OdeBrackets& fine);

/// Classical RK4 from t0 with `steps` equal steps over alpha; row-major [k][i].
std::vector<double> rk4_trajectory(const OdeProblem& p, long long steps, Direction direction = Direction::plus);

struct OdeEnclosureReport {
    bool passed = true;
    double worst_margin = kUnbounded;  // min over nodes of distance to the nearer bound
    std::size_t checked = 0;
};

/// RK4 at step alpha/2^{N+refine} sampled at the bracket nodes.
OdeEnclosureReport ode_check_enclosure(const OdeProblem& p, const OdeBrackets& br, int refine = 4);

struct OdeGapRow {
    int N = 0;
    double gap = 0.0;
    double eps = 0.0;
    double bound = 0.0;
};

struct OdeGapDecay {
    std::vector<OdeGapRow> rows;
    /// gap(N+1)/gap(N) for consecutive rows.
    std::vector<double> ratios;
};

/// eps = L_t * dt + 2 * max inflation; the inflation enters the extremum spread directly.
OdeGapDecay ode_gap_decay(const OdeProblem& p, int N_lo, int N_hi, int extremization_samples,
                          Direction direction = Direction::plus);

/// Sampled Lipschitz constant of f in t over R.
double estimate_time_lipschitz(const OdeProblem& p, int samples_per_axis);

}  // namespace qlpde
