#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "catch_amalgamated.hpp"
#include "qlpde/catalog.hpp"
#include "qlpde/constants.hpp"
#include "qlpde/ode_bracket.hpp"

using namespace qlpde;
using Catch::Approx;

namespace {

OdeProblem constant_field(double c) {
    OdeProblem p;
    p.name = "const";
    p.n = 1;
    p.f = [c](double, std::span<const double>, std::span<double> o) { o[0] = c; };
    p.L_f = 0.0;
    p.M_norm_f = std::abs(c);
    p.y0 = {0.5};
    p.a = 1.0;
    p.b = 2.0;
    p.alpha = 1.0;
    return p;
}

// Dense-output Dormand-Prince trajectory sampled at the bracket nodes.
std::vector<double> dopri_samples(const OdeProblem& p, const OdeBrackets& br) {
    using State = std::vector<double>;
    namespace ode = boost::numeric::odeint;
    State y = p.y0;
    std::vector<double> out;
    auto rhs = [&p](const State& s, State& d, double t) {
        d.resize(s.size());
        p.f(t, s, d);
    };
    std::vector<double> times;
    for (int k = 0; k <= br.steps(); ++k) times.push_back(br.time(k));
    ode::integrate_times(ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>()), rhs, y,
                         times.begin(), times.end(), 1e-3,
                         [&out](const State& s, double) { out.insert(out.end(), s.begin(), s.end()); });
    return out;
}

}  // namespace

TEST_CASE("zero field keeps both brackets at y0") {
    const OdeBrackets br = ode_bracket_solve(constant_field(0.0), 4, 3);
    for (int k = 0; k <= br.steps(); ++k) {
        CHECK(br.lo(k, 0) == 0.5);
        CHECK(br.hi(k, 0) == 0.5);
    }
    CHECK(br.max_gap() == 0.0);
}

TEST_CASE("constant field moves both brackets linearly") {
    const OdeBrackets br = ode_bracket_solve(constant_field(1.0), 3, 3);
    for (int k = 0; k <= br.steps(); ++k) {
        CHECK(br.lo(k, 0) == Approx(0.5 + k / 8.0).epsilon(1e-15));
        CHECK(br.hi(k, 0) == Approx(0.5 + k / 8.0).epsilon(1e-15));
    }
    const OdeNestingReport nest = ode_verify_nesting(br, ode_bracket_solve(constant_field(1.0), 4, 3));
    CHECK(nest.passed);
    CHECK(nest.worst_violation == 0.0);
}

TEST_CASE("exponential brackets enclose an independent integrator") {
    const OdeProblem p = find_entry("ode-exponential").make_ode();
    for (int N = 0; N <= 10; ++N) {
        const OdeBrackets br = ode_bracket_solve(p, N, 3);
        const std::vector<double> ref = dopri_samples(p, br);
        for (int k = 0; k <= br.steps(); ++k) {
            CHECK(ref[k] >= br.lo(k, 0) - 1e-12);
            CHECK(ref[k] <= br.hi(k, 0) + 1e-12);
            CHECK(ref[k] == Approx(std::exp(br.time(k))).epsilon(1e-10));
        }
        CHECK(ode_check_enclosure(p, br).passed);
    }
}

TEST_CASE("logistic and oscillator brackets enclose the exact solution") {
    for (const char* name : {"ode-logistic", "ode-forced", "ode-oscillator"}) {
        INFO(name);
        const CatalogEntry& e = find_entry(name);
        const OdeProblem p = e.make_ode();
        const OdeBrackets br = ode_bracket_solve(p, 6, 3);
        std::vector<double> ex(p.n);
        for (int k = 0; k <= br.steps(); ++k) {
            e.ode_exact(br.time(k), ex);
            for (int i = 0; i < p.n; ++i) {
                CHECK(ex[i] >= br.lo(k, i) - 1e-12);
                CHECK(ex[i] <= br.hi(k, i) + 1e-12);
            }
        }
    }
}

TEST_CASE("exponential gap decay and bound") {
    const OdeProblem p = find_entry("ode-exponential").make_ode();
    const OdeGapDecay gd = ode_gap_decay(p, 1, 10, 3);
    for (const auto& r : gd.rows) CHECK(r.gap <= r.bound);
    for (std::size_t j = 0; j < gd.ratios.size(); ++j) {
        if (gd.rows[j].N < 4) continue;
        CHECK(gd.ratios[j] >= 0.4);
        CHECK(gd.ratios[j] <= 0.6);
    }
}

TEST_CASE("exponential nesting within the reported tolerance") {
    const OdeProblem p = find_entry("ode-exponential").make_ode();
    const OdeNestingReport r = ode_verify_nesting(ode_bracket_solve(p, 3, 3), ode_bracket_solve(p, 4, 3));
    CHECK(r.passed);
    CHECK(r.worst_violation <= r.tolerance);
}

TEST_CASE("minus direction brackets the backward solution") {
    const OdeProblem p = find_entry("ode-exponential").make_ode();
    const OdeBrackets br = ode_bracket_solve(p, 6, 3, Direction::minus);
    for (int k = 0; k <= br.steps(); ++k) {
        const double t = br.time(k);
        CHECK(t <= 0.0);
        CHECK(std::exp(t) >= br.lo(k, 0) - 1e-12);
        CHECK(std::exp(t) <= br.hi(k, 0) + 1e-12);
    }
}

TEST_CASE("Picard alpha rule") {
    CHECK(OdeProblem::alpha_rule(1.0, 2.0, 3.0) == Approx(2.0 / 3.0));
    CHECK(OdeProblem::alpha_rule(1.0, 2.0, 0.0) == 1.0);
}

TEST_CASE("time Lipschitz estimate") {
    const OdeProblem p = find_entry("ode-forced").make_ode();
    CHECK(estimate_time_lipschitz(p, 65) == Approx(1.0).epsilon(0.01));
}
