#pragma once

#include <string>
#include <vector>

#include "qlpde/problem.hpp"

namespace qlpde {

struct ConstantsReport {
    double c1 = 0.0;
    double c2 = 0.0;
    double theta = 0.0;
    double alpha_locality = kUnbounded;
    double alpha_bar = kUnbounded;
    double alpha_geom = kUnbounded;
    double alpha = 0.0;
    double L_I = 0.0;
    double M_I = 0.0;
    double L_f = 0.0;
    double L_Ufs = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double safety = 1.0;
    /// False when alpha was supplied and breaks the strict locality inequality;
    /// L_f and everything derived from it are then unbounded.
    bool locality_ok = true;
    std::vector<std::string> warnings;
};

struct GapSequence {
    int N = 0;
    std::vector<double> values;
};

struct LipschitzSequence {
    int N = 0;
    std::vector<double> values;
};

/// Indexed table[k][h] for k = 0..k_max, h = 0..h_max (h = 0 unused).
using CoeffTable = std::vector<std::vector<long double>>;

struct CoeffViolation {
    int k = 0;
    int h = 0;
    long double value = 0;
    long double bound = 0;
};

struct CoeffBoundReport {
    std::size_t checked = 0;
    std::vector<CoeffViolation> violations;
    bool passed() const { return violations.empty(); }
};

double theta(double c1);
double c1_of(const ConstantBundle& k);
double c2_of(const ConstantBundle& k);

/// Supremum of the alpha satisfying the locality inequality, or kUnbounded.
double locality_alpha(const ConstantBundle& k, double L_I);
/// Strict form of the locality inequality at a given alpha.
bool locality_holds(const ConstantBundle& k, double L_I, double alpha);

/// Throws LocalityError when the denominator is not positive.
double lipschitz_bound_Lf(const ConstantBundle& k, double L_I, double alpha);
double L_Ufs(const ConstantBundle& k, double L_f);

struct C1C2 {
    double C1 = 0.0;
    double C2 = 0.0;
};
C1C2 C1_C2(const ConstantBundle& k, double L_sup);

GapSequence gap_recursion(int N, double alpha, double C1, double C2);
/// Closed-form cap on the gap recursion at step k of 2^N.
double gap_closed_form(int N, int k, double alpha, double C1, double C2);

LipschitzSequence lipschitz_recursion(double L_I, int N, double alpha, const ConstantBundle& k);

CoeffTable poly_coeff_table(double gamma, int k_max, int h_max);
CoeffBoundReport verify_coeff_bounds(const CoeffTable& table, double gamma);

double ode_gap_bound(int n, double L_f, double M_norm_f, double alpha, int N, int k, double eps);

/// Full report at a fixed alpha.
ConstantsReport evaluate_constants(const ProblemSpec& spec, double alpha, double M_I);
/// alpha = min(safety*alpha_locality, alpha_bar, alpha_geom, a); throws
/// GeometryError when the result is not positive.
ConstantsReport choose_alpha(const ProblemSpec& spec, double safety, double M_I);
ConstantsReport choose_alpha(const ProblemSpec& spec, double safety = 0.9, int samples_per_axis = 33);

double alpha_bar(const ProblemSpec& spec, double M_I);
double alpha_geom(const ProblemSpec& spec);

}  // namespace qlpde
