#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "qlpde/catalog.hpp"
#include "qlpde/constants.hpp"

using namespace qlpde;
using Catch::Approx;

namespace {

ConstantBundle make(int m, int n, double L_C, double L_D) {
    ConstantBundle k;
    k.m = m;
    k.n = n;
    k.L_C = L_C;
    k.L_D = L_D;
    k.M_C.assign(m - 1, 0.0);
    k.m_C.assign(m - 1, 0.0);
    return k;
}

}  // namespace

TEST_CASE("locality is vacuous without C dependence") {
    CHECK(is_unbounded(locality_alpha(make(2, 1, 0.0, 3.0), 1.0)));
}

TEST_CASE("locality alpha for negative c1") {
    const ConstantBundle k = make(2, 1, 1.0, 0.0);
    CHECK(c1_of(k) == -1.0);
    CHECK(theta(c1_of(k)) == 0.0);
    CHECK(locality_alpha(k, 0.0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("locality alpha at c1 = 0") {
    const ConstantBundle k = make(3, 2, 1.0, 1.0);
    CHECK(c1_of(k) == 0.0);
    CHECK(locality_alpha(k, 1.0) == Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("locality alpha for positive c1 solves the implicit condition") {
    const ConstantBundle k = make(2, 2, 0.5, 1.0);
    REQUIRE(c1_of(k) > 0.0);
    const double a = locality_alpha(k, 0.5);
    CHECK(locality_holds(k, 0.5, 0.999 * a));
    CHECK_FALSE(locality_holds(k, 0.5, 1.001 * a));
}

TEST_CASE("L_f at alpha = 0 is L_I") { CHECK(lipschitz_bound_Lf(make(2, 1, 1.0, 1.0), 0.7, 0.0) == Approx(0.7)); }

TEST_CASE("L_f without C dependence is the pure exponential") {
    const ConstantBundle k = make(2, 2, 0.0, 0.5);
    const double want = (0.3 + 0.5) * std::exp(2 * 0.5 * 0.4) - 0.5;
    CHECK(lipschitz_bound_Lf(k, 0.3, 0.4) == Approx(want).epsilon(1e-14));
}

TEST_CASE("L_f worked value") {
    const double Lf = lipschitz_bound_Lf(make(2, 1, 1.0, 0.0), 0.0, 0.5);
    CHECK(Lf == Approx(2.0 * std::exp(-0.5) - 1.0).epsilon(1e-14));
    CHECK(Lf == Approx(0.21306).margin(1e-5));
}

TEST_CASE("L_f outside the locality region throws") {
    CHECK_THROWS_AS(lipschitz_bound_Lf(make(2, 1, 1.0, 0.0), 0.0, 1.0), LocalityError);
}

TEST_CASE("L_Ufs worked values") {
    ConstantBundle k = make(2, 1, 0.0, 0.0);
    CHECK(L_Ufs(k, 0.0) == 0.0);
    k.M_norm_C = 1.0;
    CHECK(L_Ufs(k, 1.0) == 1.0);
    ConstantBundle k3 = make(3, 1, 0.0, 0.0);
    k3.M_norm_C = 2.0;
    k3.M_norm_D = 1.0;
    CHECK(L_Ufs(k3, 0.2) == Approx(1.8));
}

TEST_CASE("C1 and C2 worked values") {
    const C1C2 z = C1_C2(make(2, 1, 0.0, 0.0), 0.0);
    CHECK(z.C1 == 0.0);
    CHECK(z.C2 == 0.0);
    ConstantBundle a = make(2, 1, 0.0, 1.0);
    a.M_norm_D = 1.0;
    a.M_C = a.m_C = {0.5};
    const C1C2 ca = C1_C2(a, 1.0);
    CHECK(ca.C1 == 1.0);
    CHECK(ca.C2 == 3.0);
    ConstantBundle b = make(2, 2, 1.0, 0.0);
    b.M_C = {1.0};
    b.m_C = {0.0};
    const C1C2 cb = C1_C2(b, 1.0);
    CHECK(cb.C1 == 2.0);
    CHECK(cb.C2 == 4.0);
}

TEST_CASE("gap recursion and closed form") {
    CHECK(gap_recursion(3, 1.0, 1.0, 0.0).values.back() == 0.0);
    const GapSequence one = gap_recursion(0, 1.0, 1.0, 1.0);
    CHECK(one.values[1] == 1.0);
    CHECK(one.values[1] <= gap_closed_form(0, 1, 1.0, 1.0, 1.0));
    CHECK(gap_closed_form(0, 1, 1.0, 1.0, 1.0) == Approx(std::exp(1.0) - 1.0));
    const GapSequence three = gap_recursion(3, 1.0, 1.0, 1.0);
    CHECK(three.values[8] <= gap_closed_form(3, 8, 1.0, 1.0, 1.0));
    CHECK(gap_closed_form(3, 8, 1.0, 1.0, 1.0) == Approx((std::exp(1.0) - 1.0) / 8.0));
    for (int k = 0; k <= 8; ++k) CHECK(three.values[k] <= gap_closed_form(3, k, 1.0, 1.0, 1.0) + 1e-15);
}

TEST_CASE("Lipschitz recursion worked values") {
    const LipschitzSequence flat = lipschitz_recursion(0.4, 3, 1.0, make(2, 1, 0.0, 0.0));
    for (double v : flat.values) CHECK(v == 0.4);
    const LipschitzSequence s = lipschitz_recursion(1.0, 0, 0.25, make(2, 1, 1.0, 0.0));
    CHECK(s.values[1] == Approx(1.5).epsilon(1e-15));
}

TEST_CASE("Lipschitz recursion stays below L_f for random admissible constants") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::uniform_int_distribution<int> nd(1, 3), md(2, 4);
    for (int t = 0; t < 20; ++t) {
        const ConstantBundle k = make(md(rng), nd(rng), u(rng), u(rng));
        const double LI = u(rng);
        const double loc = locality_alpha(k, LI);
        const double alpha = is_unbounded(loc) ? 1.0 : 0.9 * loc;
        const double Lf = lipschitz_bound_Lf(k, LI, alpha);
        for (int N = 0; N <= 10; ++N) {
            const LipschitzSequence s = lipschitz_recursion(LI, N, alpha, k);
            for (double v : s.values) CHECK(v <= Lf * (1 + 1e-12));
        }
    }
}

TEST_CASE("coefficient table base cases") {
    for (double g : {0.6, 1.0, 1.7}) {
        const CoeffTable t = poly_coeff_table(g, 3, 4);
        CHECK(t[1][1] == static_cast<long double>(g));
        CHECK(t[1][2] == 1.0L);
        CHECK(static_cast<double>(t[2][2]) == Approx(g + g * g).epsilon(1e-15));
    }
    const CoeffTable one = poly_coeff_table(1.0, 12, 3);
    for (int k = 1; k <= 12; ++k) CHECK(one[k][2] == static_cast<long double>(k));
    CHECK_THROWS_AS(poly_coeff_table(0.4, 3, 3), ConfigError);
}

TEST_CASE("coefficient table bounds hold") {
    for (double g : {0.6, 0.9, 1.0, 1.01}) {
        const CoeffBoundReport r = verify_coeff_bounds(poly_coeff_table(g, 12, 20), g);
        CHECK(r.checked == 12 * 20);
        CHECK(r.passed());
    }
    // equality at h = 1 for gamma = 1
    CHECK(poly_coeff_table(1.0, 5, 1)[5][1] == 1.0L);
}

TEST_CASE("ode gap bound worked values") {
    CHECK(ode_gap_bound(1, 1.0, 0.0, 1.0, 3, 8, 0.0) == 0.0);
    CHECK(ode_gap_bound(1, 1.0, 1.0, 1.0, 0, 1, 0.0) == Approx(2.0 * (std::exp(1.0) - 1.0)));
    CHECK(ode_gap_bound(1, 1.0, 1.0, 1.0, 4, 16, 0.0) ==
          Approx(0.5 * ode_gap_bound(1, 1.0, 1.0, 1.0, 3, 8, 0.0)).epsilon(1e-14));
}

TEST_CASE("alpha selection caps") {
    ProblemSpec p = find_entry("advection").make_pde();
    // only the a cap binds
    CHECK(choose_alpha(p, 0.9, 0.0).alpha == 1.0);

    ProblemSpec q = find_entry("constant").make_pde();
    q.P1 = BoxDomain::uniform({0.0, 0.0}, 10.0);
    q.constants.M_norm_D = 1.0;
    CHECK(alpha_bar(q, 0.5) == 0.5);
    CHECK(choose_alpha(q, 0.9, 0.5).alpha == 0.5);

    ProblemSpec r = find_entry("burgers").make_pde();
    r.constants.M_C = {1.0};
    r.constants.m_C = {-1.0};
    CHECK(alpha_geom(r) == 1.0);
}

TEST_CASE("burgers constants") {
    const ProblemSpec p = find_entry("burgers").make_pde();
    const ConstantsReport r = choose_alpha(p, 0.9, 1.0);
    CHECK(r.c1 == -1.0);
    CHECK(r.alpha_locality == Approx(0.5).epsilon(1e-12));
    CHECK(r.alpha == Approx(0.45).epsilon(1e-12));
    CHECK(r.locality_ok);
    CHECK(std::isfinite(r.L_f));
    const ConstantsReport over = evaluate_constants(p, 0.5, 1.0);
    CHECK_FALSE(over.locality_ok);
    CHECK(is_unbounded(over.L_f));
    CHECK_FALSE(over.warnings.empty());
}

TEST_CASE("degenerate domain is rejected") {
    ProblemSpec p = find_entry("constant").make_pde();
    CHECK_THROWS_AS(choose_alpha(p, 0.9, 1.0), GeometryError);
    CHECK_THROWS_AS(choose_alpha(p, 1.5, 0.0), ConfigError);
}
