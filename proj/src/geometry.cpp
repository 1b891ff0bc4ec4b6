#include "qlpde/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qlpde {

std::vector<Interval> StandardDomain::cross_section(double s) const {
    std::vector<Interval> out(lateral());
    for (int l = 0; l < lateral(); ++l) {
        const double lo = std::max(-a_bar + drift_hi(l) * s, P1_lateral[l].lo - x0[l]);
        const double hi = std::min(a_bar + drift_lo(l) * s, P1_lateral[l].hi - x0[l]);
        out[l] = {x0[l] + lo, x0[l] + hi};
    }
    return out;
}

double StandardDomain::step(int N) const { return alpha / std::ldexp(1.0, N); }

double StandardDomain::plane_coordinate(int N, int k) const { return x0[m() - 1] + sign() * k * step(N); }

StandardDomain build_domain(const ProblemSpec& spec, double alpha, Direction direction) {
    if (!(alpha > 0.0)) throw GeometryError("alpha must be positive");
    StandardDomain d;
    d.direction = direction;
    d.alpha = alpha;
    d.x0 = spec.P1.center;
    d.a_bar = spec.a_bar;
    d.M_C = spec.constants.M_C;
    d.m_C = spec.constants.m_C;
    d.P1_lateral.resize(spec.m - 1);
    for (int l = 0; l < spec.m - 1; ++l) d.P1_lateral[l] = spec.P1.axis(l);
    // Widths are affine in s, so checking both ends covers [0, alpha].
    for (double s : {0.0, alpha}) {
        const auto cs = d.cross_section(s);
        for (int l = 0; l < d.lateral(); ++l)
            if (cs[l].empty())
                throw GeometryError("empty cross-section on axis " + std::to_string(l + 1) + " at offset " +
                                    std::to_string(s));
    }
    const double xm_span = spec.P1.half_widths[spec.m - 1];
    if (alpha > xm_span * (1 + 1e-12)) throw GeometryError("alpha exceeds the x_m half width of P1");
    return d;
}

Hyperplane hyperplane(const StandardDomain& d, int N, int k) {
    if (N < 0 || k < 0 || k > (1LL << N)) throw GeometryError("hyperplane index out of range");
    Hyperplane p;
    p.N = N;
    p.k = k;
    p.offset = d.sign() * k * d.step(N);
    p.extents = d.cross_section(k == (1LL << N) ? d.alpha : k * d.step(N));
    return p;
}

bool cone_set_contains(const StandardDomain& d, int N, int /*k*/, std::span<const double> x,
                       std::span<const double> z, double tol) {
    const int m = d.m();
    const double h = d.step(N);
    const double s_z = d.sign() * (z[m - 1] - d.x0[m - 1]);
    if (s_z < -tol || s_z > d.alpha + tol) return false;
    const auto cs = d.cross_section(std::clamp(s_z, 0.0, d.alpha));
    // tau: distance travelled from z to x along the direction of travel.
    const double tau = d.sign() * (x[m - 1] - z[m - 1]);
    if (tau < -tol || tau > h + tol) return false;
    for (int l = 0; l < m - 1; ++l) {
        if (!cs[l].contains(z[l], tol)) return false;
        const double dz = z[l] - x[l];
        if (dz < -d.drift_hi(l) * tau - tol || dz > -d.drift_lo(l) * tau + tol) return false;
    }
    return true;
}

std::vector<Interval> cone_base_extents(const StandardDomain& d, int N, int k, std::span<const double> x) {
    const double h = d.step(N);
    const auto prev = hyperplane(d, N, k - 1).extents;
    std::vector<Interval> out(d.lateral());
    for (int l = 0; l < d.lateral(); ++l) {
        out[l].lo = std::max(x[l] - d.drift_hi(l) * h, prev[l].lo);
        out[l].hi = std::min(x[l] - d.drift_lo(l) * h, prev[l].hi);
    }
    return out;
}

RestrictedSet restricted_set_extents(const StandardDomain& d, int N, int k, std::span<const double> x,
                                     std::span<const double> M_Ci, std::span<const double> m_Ci) {
    const double h = d.step(N);
    RestrictedSet r;
    r.extents = cone_base_extents(d, N, k, x);
    for (int l = 0; l < d.lateral(); ++l) {
        const double hi_drift = d.direction == Direction::plus ? M_Ci[l] : -m_Ci[l];
        const double lo_drift = d.direction == Direction::plus ? m_Ci[l] : -M_Ci[l];
        r.extents[l].lo = std::max(r.extents[l].lo, x[l] - hi_drift * h);
        r.extents[l].hi = std::min(r.extents[l].hi, x[l] - lo_drift * h);
        Interval& e = r.extents[l];
        // Rounding can invert a point-sized interval by an ulp or two.
        if (e.empty() && e.lo - e.hi <= 1e-12 * std::max(1.0, std::abs(x[l]))) e.lo = e.hi = 0.5 * (e.lo + e.hi);
        if (e.empty()) r.empty = true;
    }
    return r;
}

double lemma31_box_distance(std::span<const Interval> box1, std::span<const Interval> box2) {
    if (box1.size() != box2.size()) throw GeometryError("box distance needs equal axis counts");
    double d = 0.0;
    for (std::size_t j = 0; j < box1.size(); ++j)
        d += std::max(std::abs(box1[j].lo - box2[j].lo), std::abs(box1[j].hi - box2[j].hi));
    return d;
}

}  // namespace qlpde
