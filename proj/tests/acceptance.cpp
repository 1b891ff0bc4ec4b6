// Acceptance checks; one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qlpde/brackets.hpp"
#include "qlpde/catalog.hpp"
#include "qlpde/constants.hpp"
#include "qlpde/hyperbolic.hpp"
#include "qlpde/ode_bracket.hpp"
#include "qlpde/stepper.hpp"

using namespace qlpde;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
}

// sup over every layer and node of |f - exact|
double sup_error(const GridSolution& sol, const ExactFn& exact) {
    const int lat = sol.domain.lateral();
    std::vector<double> x(lat + 1), e(sol.n);
    double worst = 0.0;
    for (int k = 0; k <= sol.steps(); ++k) {
        const Lattice& L = sol.layers[k];
        x[lat] = sol.domain.plane_coordinate(sol.N, k);
        for (std::size_t j = 0; j < L.node_count(); ++j) {
            L.node_point(j, std::span<double>(x.data(), lat));
            exact(x, e);
            for (int i = 0; i < sol.n; ++i) worst = std::max(worst, std::abs(L.at(j)[i] - e[i]));
        }
    }
    return worst;
}

double final_y_error(const AugmentedSolution& s, const ExactFn& exact) {
    const int K = s.grid.steps();
    const Lattice& L = s.grid.layers[K];
    double x[2] = {0.0, s.grid.domain.plane_coordinate(s.grid.N, K)};
    std::vector<double> e(s.n);
    double worst = 0.0;
    for (std::size_t j = 0; j < L.node_count(); ++j) {
        L.node_point(j, std::span<double>(x, 1));
        exact(x, e);
        for (int i = 0; i < s.n; ++i) worst = std::max(worst, std::abs(L.at(j)[i] - e[i]));
    }
    return worst;
}

Outcome exact_class() {
    double worst = 0.0;
    for (const char* name : {"advection", "advection-2d"}) {
        const CatalogEntry& e = find_entry(name);
        const ProblemSpec p = e.make_pde();
        const double alpha = choose_alpha(p).alpha;
        for (int N = 0; N <= 8; ++N) {
            const int nodes = p.m == 2 ? default_node_schedule(N) : 17;
            worst = std::max(worst, sup_error(solve(p, alpha, N, nodes, Direction::plus), e.exact));
        }
    }
    return {worst <= 1e-10, fmt("sup error %.3g over N=0..8 (advection, advection-2d)", worst)};
}

Outcome burgers_convergence() {
    const CatalogEntry& e = find_entry("burgers");
    const ConvergenceReport r =
        refine_and_compare(e.make_pde(), 0.5, 4, 8, default_node_schedule, Direction::plus, &e.exact);
    std::string errs;
    for (const auto& row : r.rows) errs += fmt(" %.3g", row.error_exact);
    return {r.order_exact >= 0.8 && r.order_exact <= 1.2, fmt("order %.4f, errors", r.order_exact) + errs};
}

Outcome ode_bracketing() {
    const CatalogEntry& e = find_entry("ode-exponential");
    const OdeProblem p = e.make_ode();
    bool enclosed = true;
    double margin = kUnbounded;
    std::vector<OdeBrackets> all;
    for (int N = 0; N <= 10; ++N) {
        OdeBrackets br = ode_bracket_solve(p, N, 3);
        const OdeEnclosureReport enc = ode_check_enclosure(p, br);
        enclosed = enclosed && enc.passed;
        margin = std::min(margin, enc.worst_margin);
        double ex[1];
        for (int k = 0; k <= br.steps(); ++k) {
            e.ode_exact(br.time(k), ex);
            if (ex[0] < br.lo(k, 0) || ex[0] > br.hi(k, 0)) enclosed = false;
        }
        all.push_back(std::move(br));
    }
    const OdeGapDecay gd = ode_gap_decay(p, 1, 10, 3);
    bool bounded = true;
    for (const auto& r : gd.rows) bounded = bounded && r.gap <= r.bound;
    bool ratios = true;
    double rlo = kUnbounded, rhi = 0.0;
    for (std::size_t j = 0; j < gd.ratios.size(); ++j) {
        if (gd.rows[j + 1].N < 4) continue;
        rlo = std::min(rlo, gd.ratios[j]);
        rhi = std::max(rhi, gd.ratios[j]);
        ratios = ratios && gd.ratios[j] >= 0.4 && gd.ratios[j] <= 0.6;
    }
    bool nested = true;
    double worst = 0.0;
    for (int N = 0; N < 10; ++N) {
        const OdeNestingReport nr = ode_verify_nesting(all[N], all[N + 1]);
        nested = nested && nr.passed;
        worst = std::max(worst, nr.worst_violation);
    }
    return {enclosed && bounded && ratios && nested,
            fmt("enclosed %d (margin %.3g), gap<=bound %d, ratios N>=4 in [%.4f, %.4f], nesting %d (worst %.3g)",
                enclosed, margin, bounded, rlo, rhi, nested, worst)};
}

Outcome certification() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"burgers", "variable-advection"}) {
        const ProblemSpec p = find_entry(name).make_pde();
        const double alpha = choose_alpha(p).alpha;
        const StandardDomain d = build_domain(p, alpha, Direction::plus);
        const int nodes = default_node_schedule(5);
        std::vector<BracketField> fields;
        double margin = kUnbounded, nest = 0.0, slack = 0.0;
        bool enc = true, nested = true;
        for (int N = 3; N <= 5; ++N) {
            fields.push_back(compute_brackets(p, d, N, nodes, 3));
            const EnclosureReport er = verify_enclosure(fields.back(), solve(p, alpha, N, nodes, Direction::plus));
            enc = enc && er.passed;
            margin = std::min(margin, er.worst_margin);
            if (fields.size() > 1) {
                const NestingReport nr = verify_nesting(fields[fields.size() - 2], fields.back());
                nested = nested && nr.passed;
                nest = std::max(nest, nr.worst_violation);
                slack = std::max(slack, nr.slack);
            }
        }
        const GapDecayReport g = gap_decay(fields, p);
        ok = ok && enc && nested && g.within_bound;
        detail += fmt("%s: enclosure %d (margin %.3g), nesting %d (worst %.3g, slack %.3g), gap %.3g <= %.3g %d; ",
                      name, enc, margin, nested, nest, slack, g.rows.back().gap, g.rows.back().bound, g.within_bound);
    }
    return {ok, detail};
}

Outcome lipschitz_recursion_bound() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::uniform_int_distribution<int> nd(1, 3), md(2, 4);
    std::size_t violations = 0, checked = 0;
    for (int t = 0; t < 100; ++t) {
        ConstantBundle k;
        k.m = md(rng);
        k.n = nd(rng);
        k.L_C = u(rng);
        k.L_D = u(rng);
        k.M_C.assign(k.m - 1, 0.0);
        k.m_C.assign(k.m - 1, 0.0);
        const double LI = u(rng);
        const double loc = locality_alpha(k, LI);
        const double alpha = is_unbounded(loc) ? 1.0 : 0.9 * loc;
        const double Lf = lipschitz_bound_Lf(k, LI, alpha);
        for (int N = 0; N <= 12; ++N) {
            const LipschitzSequence s = lipschitz_recursion(LI, N, alpha, k);
            for (double v : s.values) {
                ++checked;
                if (v > Lf * (1 + 1e-12)) ++violations;
            }
        }
    }
    return {violations == 0, fmt("%zu violations in %zu recursion values over 100 tuples", violations, checked)};
}

Outcome coefficient_bounds() {
    std::size_t violations = 0, checked = 0;
    bool base = true;
    for (double g : {0.6, 0.9, 1.0, 1.01}) {
        const CoeffTable t = poly_coeff_table(g, 12, 20);
        const CoeffBoundReport r = verify_coeff_bounds(t, g);
        violations += r.violations.size();
        checked += r.checked;
        base = base && t[1][1] == static_cast<long double>(g) && t[1][2] == 1.0L;
        for (int h = 3; h <= 20; ++h) base = base && t[1][h] == 0.0L;
    }
    return {violations == 0 && base && checked == 4 * 12 * 20,
            fmt("%zu violations in %zu entries, base cases exact %d", violations, checked, base)};
}

Outcome hyperbolic_wave() {
    const CatalogEntry& e = find_entry("wave-system");
    const HyperbolicCase c = e.make_hyperbolic();
    const Reduction red = reduce(c.system, c.init, c.reduce);
    const EigenCheck ec = check_eigen_relation(c.system, 9);
    const double alpha = choose_alpha(red.spec).alpha;
    std::vector<int> Ns;
    std::vector<double> errs, grads;
    for (int N = 4; N <= 7; ++N) {
        const AugmentedSolution s = solve_hyperbolic(c.system, red, alpha, N, default_node_schedule(N));
        Ns.push_back(N);
        errs.push_back(final_y_error(s, e.exact));
        grads.push_back(gradient_consistency(s).max_discrepancy);
    }
    const double order = fit_order(Ns, errs);
    bool mono = true;
    for (std::size_t j = 1; j < grads.size(); ++j) mono = mono && grads[j] < grads[j - 1];
    const double eig = std::max(ec.eigen_residual, red.eigen_residual);
    return {order >= 0.8 && order <= 1.2 && mono && eig <= 1e-8,
            fmt("order %.4f, gradient discrepancy %.3g -> %.3g monotone %d, eigen residual %.3g over %zu points",
                order, grads.front(), grads.back(), mono, eig, ec.points + red.sample_points)};
}

Outcome burgers_residual() {
    const ProblemSpec p = find_entry("burgers").make_pde();
    std::vector<int> Ns;
    std::vector<double> res;
    for (int N = 4; N <= 8; ++N) {
        Ns.push_back(N);
        res.push_back(residual_check(p, solve(p, 0.5, N, default_node_schedule(N), Direction::plus)).max_residual);
    }
    const double order = fit_order(Ns, res);
    return {order >= 0.8, fmt("residual %.3g -> %.3g, order %.4f", res.front(), res.back(), order)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
        double limit_seconds;
    };
    const std::vector<Criterion> criteria = {
        {"exact-class reproduction", exact_class, 5.0},
        {"burgers convergence", burgers_convergence, 60.0},
        {"ode bracketing", ode_bracketing, 0.0},
        {"bracket certification", certification, 600.0},
        {"lipschitz recursion bound", lipschitz_recursion_bound, 0.0},
        {"coefficient bounds", coefficient_bounds, 0.0},
        {"hyperbolic reduction", hyperbolic_wave, 0.0},
        {"burgers residual", burgers_residual, 0.0},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string timing = fmt("%.2fs", s);
        if (c.limit_seconds > 0) {
            timing += fmt(" (limit %.0fs)", c.limit_seconds);
            if (s >= c.limit_seconds) o.pass = false;
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
