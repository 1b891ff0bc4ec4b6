#include <cmath>

#include "catch_amalgamated.hpp"
#include "qlpde/brackets.hpp"
#include "qlpde/catalog.hpp"
#include "qlpde/constants.hpp"

using namespace qlpde;
using Catch::Approx;

namespace {

using Span = std::span<const double>;
using Out = std::span<double>;

ProblemSpec growth_problem() {
    ProblemSpec p = find_entry("constant").make_pde();
    p.name = "growth";
    p.coeffs.C = [](Span, Span, Out o) { o[0] = 0.0; };
    p.coeffs.D = [](Span, Span y, Out o) { o[0] = y[0]; };
    p.constants.M_C = p.constants.m_C = {0.0};
    p.constants.M_norm_C = 0.0;
    p.constants.L_D = 1.0;
    p.constants.M_norm_D = 2.0;
    return p;
}

}  // namespace

TEST_CASE("constant problem brackets collapse onto the solution") {
    const ProblemSpec p = find_entry("constant").make_pde();
    const StandardDomain d = build_domain(p, 1.0, Direction::plus);
    const BracketField br = compute_brackets(p, d, 3, 9, 3);
    for (int k = 0; k <= br.steps(); ++k) {
        for (std::size_t j = 0; j < br.lower[k].node_count(); ++j) {
            CHECK(br.lower[k].at(j)[0] == Approx(1.0 + 0.25 * k / 8.0).epsilon(1e-15));
            CHECK(br.upper[k].at(j)[0] == br.lower[k].at(j)[0]);
        }
    }
    CHECK(br.max_gap() == 0.0);
    const GridSolution sol = solve(p, 1.0, 3, 9, Direction::plus);
    const EnclosureReport enc = verify_enclosure(br, sol);
    CHECK(enc.passed);
    CHECK(enc.worst_margin == Approx(0.0).margin(1e-15));
    const NestingReport nest = verify_nesting(br, compute_brackets(p, d, 4, 9, 3));
    CHECK(nest.passed);
    CHECK(nest.worst_violation == 0.0);
}

TEST_CASE("single-step bounds match a hand evaluation") {
    const ProblemSpec p = growth_problem();
    const StandardDomain d = build_domain(p, 0.25, Direction::plus);
    const BracketField br = compute_brackets(p, d, 0, 5, 3);
    // y box [0.5, 1.5], covering radius 0.125/2 + 1/4, D extrema inflated by L_D r
    const double r = 0.0625 + 0.25;
    const double upper = 1.0 + std::min(1.5 + r, 2.0) * 0.25;
    const double lower = 1.0 + std::max(0.5 - r, -2.0) * 0.25;
    for (std::size_t j = 0; j < br.upper[1].node_count(); ++j) {
        CHECK(br.upper[1].at(j)[0] == Approx(upper).epsilon(1e-15));
        CHECK(br.lower[1].at(j)[0] == Approx(lower).epsilon(1e-15));
        CHECK(std::exp(0.25) <= upper);
        CHECK(std::exp(0.25) >= lower);
    }
    CHECK(br.inflation[1] == Approx(r * 0.25));
}

TEST_CASE("brackets enclose the stepper solution") {
    for (const char* name : {"advection", "burgers", "variable-advection", "source-only"}) {
        INFO(name);
        const ProblemSpec p = find_entry(name).make_pde();
        const double alpha = choose_alpha(p, 0.9, 33).alpha;
        const StandardDomain d = build_domain(p, alpha, Direction::plus);
        for (int N = 0; N <= 5; ++N) {
            const int nodes = default_node_schedule(N);
            const EnclosureReport r =
                verify_enclosure(compute_brackets(p, d, N, nodes, 3), solve(p, alpha, N, nodes, Direction::plus));
            CHECK(r.passed);
        }
    }
}

TEST_CASE("brackets enclose the exact Burgers solution") {
    const CatalogEntry& e = find_entry("burgers");
    const ProblemSpec p = e.make_pde();
    const StandardDomain d = build_domain(p, 0.45, Direction::plus);
    const BracketField br = compute_brackets(p, d, 4, 65, 3);
    double x[2], ex[1];
    for (int k = 0; k <= br.steps(); ++k) {
        x[1] = d.plane_coordinate(4, k);
        for (std::size_t j = 0; j < br.lower[k].node_count(); ++j) {
            br.lower[k].node_point(j, std::span<double>(x, 1));
            e.exact(x, ex);
            CHECK(ex[0] >= br.lower[k].at(j)[0] - 1e-12);
            CHECK(ex[0] <= br.upper[k].at(j)[0] + 1e-12);
        }
    }
}

TEST_CASE("Burgers nesting holds with doubled extremization samples too") {
    const ProblemSpec p = find_entry("burgers").make_pde();
    const StandardDomain d = build_domain(p, 0.45, Direction::plus);
    for (int q : {3, 6}) {
        const NestingReport r = verify_nesting(compute_brackets(p, d, 3, 65, q), compute_brackets(p, d, 4, 65, q));
        CHECK(r.passed);
        CHECK(r.worst_violation <= r.slack);
    }
}

TEST_CASE("advection nesting") {
    const ProblemSpec p = find_entry("constant-advection").make_pde();
    const StandardDomain d = build_domain(p, 0.9, Direction::plus);
    const NestingReport r = verify_nesting(compute_brackets(p, d, 3, 65, 3), compute_brackets(p, d, 4, 65, 3));
    CHECK(r.passed);
}

TEST_CASE("Burgers gap decay obeys the closed-form bound") {
    const ProblemSpec p = find_entry("burgers").make_pde();
    const StandardDomain d = build_domain(p, 0.45, Direction::plus);
    std::vector<BracketField> fields;
    for (int N = 3; N <= 6; ++N) fields.push_back(compute_brackets(p, d, N, 129, 3));
    const GapDecayReport g = gap_decay(fields, p);
    CHECK(g.within_bound);
    for (std::size_t j = 0; j < g.ratios.size(); ++j) {
        if (g.rows[j].N < 4) continue;
        CHECK(g.ratios[j] >= 0.4);
        CHECK(g.ratios[j] <= 0.6);
    }
    const ConstantsReport cr = evaluate_constants(p, 0.45, 1.0);
    for (const auto& r : g.rows)
        CHECK(r.bound == Approx(gap_closed_form(r.N, 1 << r.N, 0.45, cr.C1, cr.C2)));
}

TEST_CASE("minus direction brackets") {
    const CatalogEntry& e = find_entry("burgers");
    const ProblemSpec p = e.make_pde();
    const StandardDomain d = build_domain(p, 0.3, Direction::minus);
    const BracketField br = compute_brackets(p, d, 3, 33, 3);
    const GridSolution sol = solve(p, 0.3, 3, 33, Direction::minus);
    CHECK(verify_enclosure(br, sol).passed);
    double x[2], ex[1];
    x[1] = -0.3;
    for (std::size_t j = 0; j < br.lower.back().node_count(); ++j) {
        br.lower.back().node_point(j, std::span<double>(x, 1));
        e.exact(x, ex);
        CHECK(ex[0] >= br.lower.back().at(j)[0] - 1e-12);
        CHECK(ex[0] <= br.upper.back().at(j)[0] + 1e-12);
    }
}

TEST_CASE("contradictory C bounds are reported") {
    ProblemSpec p = find_entry("constant-advection").make_pde();
    // the declared bounds exclude the actual speed C = 1
    p.constants.M_C = {0.5};
    p.constants.m_C = {0.5};
    const StandardDomain d = build_domain(p, 0.2, Direction::plus);
    CHECK_THROWS_AS(compute_brackets(p, d, 2, 17, 3), GeometryError);
}

TEST_CASE("bracket Lipschitz on layer 0 matches the data") {
    const ProblemSpec p = find_entry("burgers").make_pde();
    const StandardDomain d = build_domain(p, 0.45, Direction::plus);
    CHECK(bracket_lipschitz(compute_brackets(p, d, 1, 17, 3), 0) == Approx(1.0));
}
