#include "qlpde/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qlpde {

double theta(double c1) { return c1 > 0.0 ? 1.0 : 0.0; }

double c1_of(const ConstantBundle& k) { return k.n * k.L_D - (k.m - 1) * k.L_C; }

double c2_of(const ConstantBundle& k) { return k.n * (k.m - 1) * k.L_C; }

namespace {

// n(m-1) L_C (L_I + 1/n)
double locality_rate(const ConstantBundle& k, double L_I) { return c2_of(k) * (L_I + 1.0 / k.n); }

double locality_lhs(const ConstantBundle& k, double L_I, double alpha) {
    const double c1 = c1_of(k);
    return alpha * std::exp(theta(c1) * c1 * alpha) * locality_rate(k, L_I);
}

}  // namespace

double locality_alpha(const ConstantBundle& k, double L_I) {
    const double K = locality_rate(k, L_I);
    if (K <= 0.0) return kUnbounded;
    const double c1 = c1_of(k);
    if (c1 <= 0.0) return 1.0 / K;
    // lhs is increasing and lhs(1/K) = exp(c1/K) >= 1, so the root is in (0, 1/K].
    double lo = 0.0, hi = 1.0 / K;
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (locality_lhs(k, L_I, mid) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

bool locality_holds(const ConstantBundle& k, double L_I, double alpha) { return locality_lhs(k, L_I, alpha) < 1.0; }

double lipschitz_bound_Lf(const ConstantBundle& k, double L_I, double alpha) {
    const double c1 = c1_of(k);
    const double inv_n = 1.0 / k.n;
    const double denom = 1.0 - locality_lhs(k, L_I, alpha);
    if (!(denom > 0.0))
        throw LocalityError("locality condition violated at alpha=" + std::to_string(alpha) +
                            " (denominator " + std::to_string(denom) + ")");
    return (L_I + inv_n) * std::exp(c1 * alpha) / denom - inv_n;
}

double L_Ufs(const ConstantBundle& k, double L_f) {
    return std::max(L_f, k.M_norm_D + L_f * (k.m - 1) * k.M_norm_C);
}

C1C2 C1_C2(const ConstantBundle& k, double L) {
    double spread = 0.0;
    for (int l = 0; l < k.m - 1; ++l) spread += k.M_C[l] - k.m_C[l];
    C1C2 r;
    r.C1 = k.n * (k.m - 1) * k.L_C * L + k.n * k.L_D;
    const double lead = (k.m - 1) * k.L_C * L + k.L_D;
    // Keep 0 * inf = 0 when the prefactor vanishes.
    r.C2 = lead == 0.0 ? 0.0 : lead * (L * k.n * spread + 2.0 * k.n * k.M_norm_D + spread + 1.0);
    return r;
}

GapSequence gap_recursion(int N, double alpha, double C1, double C2) {
    GapSequence g;
    g.N = N;
    const long long steps = 1LL << N;
    const double h = alpha / static_cast<double>(steps);
    g.values.assign(steps + 1, 0.0);
    for (long long k = 1; k <= steps; ++k) g.values[k] = g.values[k - 1] * (1.0 + C1 * h) + C2 * h * h;
    return g;
}

double gap_closed_form(int N, int k, double alpha, double C1, double C2) {
    const double h = alpha / std::ldexp(1.0, N);
    if (C2 == 0.0) return 0.0;
    if (C1 == 0.0) return C2 * k * h * h;
    return C2 / C1 * std::expm1(C1 * alpha * k / std::ldexp(1.0, N)) * h;
}

LipschitzSequence lipschitz_recursion(double L_I, int N, double alpha, const ConstantBundle& k) {
    LipschitzSequence s;
    s.N = N;
    const long long steps = 1LL << N;
    const double h = alpha / static_cast<double>(steps);
    const double lin = 1.0 + (k.m - 1) * k.L_C * h + k.n * k.L_D * h;
    const double quad = k.n * (k.m - 1) * k.L_C * h;
    s.values.assign(steps + 1, L_I);
    for (long long j = 1; j <= steps; ++j) {
        const double L = s.values[j - 1];
        s.values[j] = L * lin + quad * L * L + k.L_D * h;
    }
    return s;
}

CoeffTable poly_coeff_table(double gamma, int k_max, int h_max) {
    if (k_max < 1 || h_max < 1) throw ConfigError("coefficient table needs k_max, h_max >= 1");
    if (gamma < 0.5) throw ConfigError("gamma must be at least 1/2");
    const long double g = gamma;
    CoeffTable t(k_max + 1, std::vector<long double>(h_max + 1, 0.0L));
    t[0][1] = 1.0L;
    for (int k = 1; k <= k_max; ++k) {
        const auto& p = t[k - 1];
        for (int h = 1; h <= h_max; ++h) {
            long double c = g * p[h];
            for (int j = 1; 2 * j < h; ++j) c += 2.0L * p[h - j] * p[j];
            if (h % 2 == 0) c += p[h / 2] * p[h / 2];
            if (!std::isfinite(static_cast<double>(c)))
                throw Error("coefficient table overflow at k=" + std::to_string(k) + " h=" + std::to_string(h));
            t[k][h] = c;
        }
    }
    return t;
}

CoeffBoundReport verify_coeff_bounds(const CoeffTable& table, double gamma) {
    CoeffBoundReport rep;
    const long double g = gamma;
    const long double tol = 64 * std::numeric_limits<long double>::epsilon();
    for (std::size_t k = 1; k < table.size(); ++k) {
        for (std::size_t h = 1; h < table[k].size(); ++h) {
            const long double kk = static_cast<long double>(k);
            const long double lead = std::pow(kk, static_cast<long double>(h - 1));
            const long double bound = gamma >= 1.0 ? lead * std::pow(g, static_cast<long double>(k * h))
                                                   : lead * std::pow(g, static_cast<long double>(k - 1));
            ++rep.checked;
            const long double v = table[k][h];
            if (v < 0.0L || v > bound * (1.0L + tol))
                rep.violations.push_back({static_cast<int>(k), static_cast<int>(h), v, bound});
        }
    }
    return rep;
}

double ode_gap_bound(int n, double L_f, double M_norm_f, double alpha, int N, int k, double eps) {
    const double dt = alpha / std::ldexp(1.0, N);
    const double C = 2.0 * n * L_f * M_norm_f;
    const double lead = C * dt + eps;
    const double t = alpha * k / std::ldexp(1.0, N);
    const double nL = n * L_f;
    if (nL == 0.0) return lead * t;
    return lead * std::expm1(nL * t) / nL;
}

double alpha_bar(const ProblemSpec& spec, double M_I) {
    const double a = spec.a();
    const double MD = spec.constants.M_norm_D;
    const double room = spec.b() - M_I;
    if (MD == 0.0) return room > 0.0 ? a : std::min(a, 0.0);
    return std::min(a, room / MD);
}

double alpha_geom(const ProblemSpec& spec) {
    double g = kUnbounded;
    for (int l = 0; l < spec.m - 1; ++l) {
        const double spread = spec.constants.M_C[l] - spec.constants.m_C[l];
        if (spread > 0.0) g = std::min(g, 2.0 * spec.a_bar / spread);
    }
    return g;
}

ConstantsReport evaluate_constants(const ProblemSpec& spec, double alpha, double M_I) {
    const ConstantBundle& k = spec.constants;
    ConstantsReport r;
    r.c1 = c1_of(k);
    r.c2 = c2_of(k);
    r.theta = theta(r.c1);
    r.L_I = spec.init.L_I;
    r.M_I = M_I;
    r.alpha_locality = locality_alpha(k, r.L_I);
    r.alpha_bar = alpha_bar(spec, M_I);
    r.alpha_geom = alpha_geom(spec);
    r.alpha = alpha;
    r.locality_ok = locality_holds(k, r.L_I, alpha);
    if (r.locality_ok) {
        r.L_f = lipschitz_bound_Lf(k, r.L_I, alpha);
        r.L_Ufs = L_Ufs(k, r.L_f);
        const C1C2 cc = C1_C2(k, r.L_f);
        r.C1 = cc.C1;
        r.C2 = cc.C2;
    } else {
        r.L_f = r.L_Ufs = r.C1 = r.C2 = kUnbounded;
        r.warnings.push_back("alpha does not satisfy the locality condition; L_f is unbounded");
    }
    if (alpha > r.alpha_bar * (1 + 1e-12)) r.warnings.push_back("alpha exceeds alpha_bar; range of P2 not guaranteed");
    if (alpha > r.alpha_geom * (1 + 1e-12)) r.warnings.push_back("alpha exceeds alpha_geom; cross-sections empty");
    if (alpha > spec.a() * (1 + 1e-12)) r.warnings.push_back("alpha exceeds a");
    if (k.estimated) r.warnings.push_back("constants are sampled estimates, not rigorous bounds");
    return r;
}

ConstantsReport choose_alpha(const ProblemSpec& spec, double safety, int samples_per_axis) {
    return choose_alpha(spec, safety, initial_deviation(spec, samples_per_axis));
}

ConstantsReport choose_alpha(const ProblemSpec& spec, double safety, double M_I) {
    if (!(safety > 0.0 && safety < 1.0)) throw ConfigError("alpha safety factor must lie in (0, 1)");
    const ConstantBundle& k = spec.constants;
    const double loc = locality_alpha(k, spec.init.L_I);
    const double alpha =
        std::min({is_unbounded(loc) ? kUnbounded : safety * loc, alpha_bar(spec, M_I), alpha_geom(spec), spec.a()});
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw GeometryError("domain degenerate: chosen alpha = " + std::to_string(alpha));
    ConstantsReport r = evaluate_constants(spec, alpha, M_I);
    r.safety = safety;
    return r;
}

}  // namespace qlpde
