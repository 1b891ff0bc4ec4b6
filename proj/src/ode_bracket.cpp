#include "qlpde/ode_bracket.hpp"

#include <algorithm>
#include <cmath>

#include "qlpde/constants.hpp"
#include "qlpde/parallel.hpp"

namespace qlpde {

double OdeProblem::alpha_rule(double a, double b, double M_norm_f) {
    if (M_norm_f <= 0.0) return a;
    return std::min(a, b / M_norm_f);
}

double OdeBrackets::step() const { return alpha / std::ldexp(1.0, N); }

double OdeBrackets::time(int k) const { return t0 + direction_sign(direction) * k * step(); }

double OdeBrackets::max_gap() const {
    double g = 0.0;
    for (std::size_t j = 0; j < lower.size(); ++j) g = std::max(g, upper[j] - lower[j]);
    return g;
}

double OdeBrackets::max_inflation() const {
    double r = 0.0;
    for (double v : inflation) r = std::max(r, v);
    return r;
}

OdeBrackets ode_bracket_solve(const OdeProblem& p, int N, int q, Direction direction, ExecPolicy policy) {
    if (N < 0) throw ConfigError("N must be nonnegative");
    if (q < 2) throw ConfigError("extremization needs at least 2 samples per axis");
    const int n = p.n;
    OdeBrackets br;
    br.N = N;
    br.n = n;
    br.alpha = p.alpha;
    br.t0 = p.t0;
    br.direction = direction;
    br.L_f = p.L_f;
    const int K = 1 << N;
    const double h = br.step();
    const double sg = direction_sign(direction);
    br.lower.assign(static_cast<std::size_t>(K + 1) * n, 0.0);
    br.upper = br.lower;
    br.inflation.assign(K + 1, 0.0);
    for (int i = 0; i < n; ++i) br.lower[i] = br.upper[i] = p.y0[i];

    const int dims = 1 + n;
    std::size_t count = 1;
    for (int a = 0; a < dims; ++a) count *= static_cast<std::size_t>(q);
    std::vector<double> values(count * n);

    bool reported = false;
    for (int k = 1; k <= K; ++k) {
        // R^{N,k}: time slab times the widened y box.
        std::vector<Interval> box(dims);
        const double ta = br.time(k - 1), tb = br.time(k);
        box[0] = {std::min(ta, tb), std::max(ta, tb)};
        double r_y = 0.0;
        bool escaped = std::abs(tb - p.t0) > p.a * (1 + 1e-12);
        for (int i = 0; i < n; ++i) {
            box[1 + i] = {br.lo(k - 1, i) - p.M_norm_f * h, br.hi(k - 1, i) + p.M_norm_f * h};
            r_y += box[1 + i].width() / (2.0 * (q - 1));
            if (box[1 + i].lo < p.y0[i] - p.b || box[1 + i].hi > p.y0[i] + p.b) escaped = true;
        }
        if (escaped) {
            ++br.escapes;
            if (!reported) {
                br.diagnostics.push_back("R^{N,k} leaves the definition box R at k=" + std::to_string(k) +
                                         " (alpha larger than the Picard rule allows)");
                reported = true;
            }
        }
        const double r_t = h / (2.0 * (q - 1));
        const double infl = p.L_f * r_y + p.L_t * r_t;
        br.inflation[k] = infl;

        for_each_index(count, policy, [&](std::size_t idx) {
            double pt[16];
            std::size_t rem = idx;
            for (int a = dims - 1; a >= 0; --a) {
                const int j = static_cast<int>(rem % q);
                rem /= q;
                pt[a] = j == q - 1 ? box[a].hi : box[a].lo + j * box[a].width() / (q - 1);
            }
            std::span<double> out(values.data() + idx * n, n);
            p.f(pt[0], std::span<const double>(pt + 1, n), out);
            if (!all_finite(out))
                throw EvaluationError("f returned a non-finite value at t=" + std::to_string(pt[0]));
        });

        for (int i = 0; i < n; ++i) {
            double fmax = -kUnbounded, fmin = kUnbounded;
            for (std::size_t idx = 0; idx < count; ++idx) {
                fmax = std::max(fmax, values[idx * n + i]);
                fmin = std::min(fmin, values[idx * n + i]);
            }
            fmax += infl;
            fmin -= infl;
            if (!escaped) {
                fmax = std::min(fmax, p.M_norm_f);
                fmin = std::max(fmin, -p.M_norm_f);
            }
            const std::size_t at = static_cast<std::size_t>(k) * n + i;
            const std::size_t prev = at - n;
            if (sg > 0) {
                br.lower[at] = br.lower[prev] + fmin * h;
                br.upper[at] = br.upper[prev] + fmax * h;
            } else {
                br.lower[at] = br.lower[prev] - fmax * h;
                br.upper[at] = br.upper[prev] - fmin * h;
            }
        }
    }
    return br;
}

OdeNestingReport ode_verify_nesting(const OdeBrackets& coarse, const OdeBrackets& fine) {
    if (fine.N != coarse.N + 1 || fine.n != coarse.n) throw ConfigError("nesting needs fine.N = coarse.N + 1");
    OdeNestingReport rep;
    rep.tolerance = 2.0 * fine.max_inflation() * fine.alpha * std::exp(fine.n * fine.L_f * fine.alpha);
    const double round = 1e-12;
    for (int k = 0; k <= coarse.steps(); ++k) {
        for (int i = 0; i < coarse.n; ++i) {
            const double below = coarse.lo(k, i) - fine.lo(2 * k, i);
            const double above = fine.hi(2 * k, i) - coarse.hi(k, i);
            rep.worst_violation = std::max({rep.worst_violation, below, above});
            ++rep.checked;
        }
    }
    rep.passed = rep.worst_violation <= rep.tolerance + round;
    return rep;
}

std::vector<double> rk4_trajectory(const OdeProblem& p, long long steps, Direction direction) {
    const int n = p.n;
    const double h = direction_sign(direction) * p.alpha / static_cast<double>(steps);
    std::vector<double> out(static_cast<std::size_t>(steps + 1) * n);
    std::vector<double> y(p.y0), k1(n), k2(n), k3(n), k4(n), tmp(n);
    std::copy(y.begin(), y.end(), out.begin());
    for (long long s = 0; s < steps; ++s) {
        const double t = p.t0 + s * h;
        p.f(t, y, k1);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        p.f(t + 0.5 * h, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        p.f(t + 0.5 * h, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        p.f(t + h, tmp, k4);
        for (int i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        std::copy(y.begin(), y.end(), out.begin() + (s + 1) * n);
    }
    return out;
}

OdeEnclosureReport ode_check_enclosure(const OdeProblem& p, const OdeBrackets& br, int refine) {
    const long long stride = 1LL << refine;
    const auto ref = rk4_trajectory(p, static_cast<long long>(br.steps()) * stride, br.direction);
    OdeEnclosureReport rep;
    for (int k = 0; k <= br.steps(); ++k) {
        for (int i = 0; i < br.n; ++i) {
            const double v = ref[static_cast<std::size_t>(k * stride) * br.n + i];
            const double margin = std::min(v - br.lo(k, i), br.hi(k, i) - v);
            rep.worst_margin = std::min(rep.worst_margin, margin);
            ++rep.checked;
        }
    }
    // RK4 at this step is accurate far below any bracket width we test.
    rep.passed = rep.worst_margin >= -1e-12;
    return rep;
}

OdeGapDecay ode_gap_decay(const OdeProblem& p, int N_lo, int N_hi, int q, Direction direction) {
    OdeGapDecay out;
    for (int N = N_lo; N <= N_hi; ++N) {
        const OdeBrackets br = ode_bracket_solve(p, N, q, direction);
        OdeGapRow row;
        row.N = N;
        row.gap = br.max_gap();
        row.eps = p.L_t * br.step() + 2.0 * br.max_inflation();
        row.bound = ode_gap_bound(p.n, p.L_f, p.M_norm_f, p.alpha, N, br.steps(), row.eps);
        out.rows.push_back(row);
    }
    for (std::size_t j = 1; j < out.rows.size(); ++j)
        out.ratios.push_back(out.rows[j - 1].gap > 0 ? out.rows[j].gap / out.rows[j - 1].gap : 0.0);
    return out;
}

double estimate_time_lipschitz(const OdeProblem& p, int q) {
    const int n = p.n;
    std::vector<double> y(n), f0(n), f1(n);
    double best = 0.0;
    const double dt = 2.0 * p.a / (q - 1);
    std::size_t combos = 1;
    for (int i = 0; i < n; ++i) combos *= static_cast<std::size_t>(q);
    for (std::size_t c = 0; c < combos; ++c) {
        std::size_t rem = c;
        for (int i = 0; i < n; ++i) {
            y[i] = p.y0[i] - p.b + static_cast<double>(rem % q) * 2.0 * p.b / (q - 1);
            rem /= q;
        }
        for (int j = 0; j + 1 < q; ++j) {
            const double t = p.t0 - p.a + j * dt;
            p.f(t, y, f0);
            p.f(t + dt, y, f1);
            for (int i = 0; i < n; ++i) best = std::max(best, std::abs(f1[i] - f0[i]) / dt);
        }
    }
    return best;
}

}  // namespace qlpde
