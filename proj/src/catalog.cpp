#include "qlpde/catalog.hpp"

#include <cmath>
#include <numbers>

namespace qlpde {

namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

using Span = std::span<const double>;
using Out = std::span<double>;

ConstantBundle bundle(int m, int n, double L_C, double L_D, double M_D, double M_norm_C, std::vector<double> M_C,
                      std::vector<double> m_C) {
    ConstantBundle k;
    k.m = m;
    k.n = n;
    k.L_C = L_C;
    k.L_D = L_D;
    k.M_norm_D = M_D;
    k.M_norm_C = M_norm_C;
    k.M_C = std::move(M_C);
    k.m_C = std::move(m_C);
    return k;
}

ProblemSpec scalar_2d(std::string name, double a, double a_bar, double y0, double b) {
    ProblemSpec p;
    p.name = std::move(name);
    p.m = 2;
    p.n = 1;
    p.P1 = BoxDomain::uniform({0.0, 0.0}, a);
    p.P2 = BoxDomain::uniform({y0}, b);
    p.a_bar = a_bar;
    return p;
}

ProblemSpec advection(bool sine) {
    ProblemSpec p = scalar_2d(sine ? "constant-advection" : "advection", 1.0, 1.0, 0.0, 2.0);
    p.coeffs.C = [](Span, Span, Out o) { o[0] = 1.0; };
    p.coeffs.D = [](Span, Span, Out o) { o[0] = 0.0; };
    if (sine)
        p.init.I = [](Span u, Out o) { o[0] = std::sin(u[0]); };
    else
        p.init.I = [](Span u, Out o) { o[0] = u[0]; };
    p.init.L_I = 1.0;
    p.constants = bundle(2, 1, 0.0, 0.0, 0.0, 1.0, {1.0}, {1.0});
    return p;
}

ProblemSpec variable_advection() {
    ProblemSpec p = scalar_2d("variable-advection", 2.0, 1.0, 0.0, 1.5);
    p.coeffs.C = [](Span x, Span, Out o) { o[0] = 0.5 * x[0]; };
    p.coeffs.D = [](Span, Span, Out o) { o[0] = 0.0; };
    p.init.I = [](Span u, Out o) { o[0] = std::sin(u[0]); };
    p.init.L_I = 1.0;
    p.constants = bundle(2, 1, 0.5, 0.0, 0.0, 1.0, {1.0}, {-1.0});
    return p;
}

ProblemSpec burgers() {
    ProblemSpec p = scalar_2d("burgers", 1.0, 1.0, 0.0, 1.5);
    p.coeffs.C = [](Span, Span y, Out o) { o[0] = y[0]; };
    p.coeffs.D = [](Span, Span, Out o) { o[0] = 0.0; };
    p.init.I = [](Span u, Out o) { o[0] = u[0]; };
    p.init.L_I = 1.0;
    p.constants = bundle(2, 1, 1.0, 0.0, 0.0, 1.5, {1.5}, {-1.5});
    return p;
}

ProblemSpec source_only() {
    ProblemSpec p = scalar_2d("source-only", 1.0, 1.0, 1.0, 1.0);
    p.coeffs.C = [](Span, Span, Out o) { o[0] = 0.0; };
    p.coeffs.D = [](Span, Span y, Out o) { o[0] = -y[0]; };
    p.init.I = [](Span u, Out o) { o[0] = 1.0 + 0.5 * u[0]; };
    p.init.L_I = 0.5;
    p.constants = bundle(2, 1, 0.0, 1.0, 2.0, 0.0, {0.0}, {0.0});
    return p;
}

ProblemSpec advection_2d() {
    ProblemSpec p;
    p.name = "advection-2d";
    p.m = 3;
    p.n = 1;
    p.P1 = BoxDomain::uniform({0.0, 0.0, 0.0}, 1.0);
    p.P2 = BoxDomain::uniform({0.0}, 4.0);
    p.a_bar = 1.0;
    p.coeffs.C = [](Span, Span, Out o) {
        o[0] = 1.0;
        o[1] = 0.5;
    };
    p.coeffs.D = [](Span, Span, Out o) { o[0] = 0.0; };
    p.init.I = [](Span u, Out o) { o[0] = u[0] + 2.0 * u[1]; };
    p.init.L_I = 2.0;
    p.constants = bundle(3, 1, 0.0, 0.0, 0.0, 1.0, {1.0, 0.5}, {1.0, 0.5});
    return p;
}

ProblemSpec constant_field() {
    ProblemSpec p = scalar_2d("constant", 1.0, 1.0, 1.0, 1.0);
    p.coeffs.C = [](Span, Span, Out o) { o[0] = 0.5; };
    p.coeffs.D = [](Span, Span, Out o) { o[0] = 0.25; };
    p.init.I = [](Span, Out o) { o[0] = 1.0; };
    p.init.L_I = 0.0;
    p.constants = bundle(2, 1, 0.0, 0.0, 0.25, 0.5, {0.5}, {0.5});
    return p;
}

OdeProblem ode(std::string name, int n, OdeFn f, double L, double M, double L_t, std::vector<double> y0, double a,
               double b, double alpha) {
    OdeProblem p;
    p.name = std::move(name);
    p.n = n;
    p.f = std::move(f);
    p.L_f = L;
    p.M_norm_f = M;
    p.L_t = L_t;
    p.y0 = std::move(y0);
    p.a = a;
    p.b = b;
    p.alpha = alpha;
    return p;
}

HyperbolicSystem linear_system(std::string name, MatrixXd A, VectorXd T, MatrixXd L) {
    HyperbolicSystem s;
    s.name = std::move(name);
    s.n = static_cast<int>(A.rows());
    const int n = s.n;
    const MatrixXd Li = L.inverse();
    s.A = [A](const Vector2d&, const VectorXd&) { return A; };
    s.B = [n](const Vector2d&, const VectorXd&) { return VectorXd::Zero(n).eval(); };
    s.T = [T](const Vector2d&, const VectorXd&) { return T; };
    s.Lambda = [L](const Vector2d&, const VectorXd&) { return L; };
    s.Lambda_inv = [Li](const Vector2d&, const VectorXd&) { return Li; };
    s.dA = [n](const Vector2d&, const VectorXd&, int) { return MatrixXd::Zero(n, n).eval(); };
    s.dB = [n](const Vector2d&, const VectorXd&, int) { return VectorXd::Zero(n).eval(); };
    s.dLambda = [n](const Vector2d&, const VectorXd&, int) { return MatrixXd::Zero(n, n).eval(); };
    s.x0 = {0.0, 0.0};
    s.a = 1.0;
    s.a_bar = 1.0;
    s.y0.assign(n, 0.0);
    s.has_speed_bounds = true;
    s.speed_max = T.maxCoeff();
    s.speed_min = T.minCoeff();
    return s;
}

double wave_g(double u) { return 0.5 * std::sin(std::numbers::pi * u); }
double wave_dg(double u) { return 0.5 * std::numbers::pi * std::cos(std::numbers::pi * u); }

HyperbolicCase wave_system() {
    MatrixXd A(2, 2);
    A << 0, 1, 1, 0;
    VectorXd T(2);
    T << 1, -1;
    MatrixXd L(2, 2);
    L << 1, 1, -1, 1;
    L /= std::sqrt(2.0);
    HyperbolicCase c;
    c.system = linear_system("wave-system", A, T, L);
    c.system.b = 2.0;
    c.init.I = [](double u) { return Eigen::Vector2d(wave_g(u), 0.0).eval(); };
    c.init.dI = [](double u) { return Eigen::Vector2d(wave_dg(u), 0.0).eval(); };
    return c;
}

HyperbolicCase decoupled() {
    MatrixXd A(2, 2);
    A << 1, 0, 0, -0.5;
    VectorXd T(2);
    T << 1, -0.5;
    HyperbolicCase c;
    c.system = linear_system("decoupled-2system", A, T, MatrixXd::Identity(2, 2));
    c.system.b = 2.0;
    c.init.I = [](double u) { return Eigen::Vector2d(std::sin(u), std::cos(u)).eval(); };
    c.init.dI = [](double u) { return Eigen::Vector2d(std::cos(u), -std::sin(u)).eval(); };
    return c;
}

HyperbolicCase burgers_system() {
    HyperbolicSystem s;
    s.name = "burgers-system";
    s.n = 1;
    s.A = [](const Vector2d&, const VectorXd& y) { return MatrixXd::Constant(1, 1, y[0]); };
    s.B = [](const Vector2d&, const VectorXd&) { return VectorXd::Zero(1).eval(); };
    s.T = [](const Vector2d&, const VectorXd& y) { return VectorXd::Constant(1, y[0]); };
    s.Lambda = [](const Vector2d&, const VectorXd&) { return MatrixXd::Identity(1, 1).eval(); };
    s.Lambda_inv = s.Lambda;
    s.dA = [](const Vector2d&, const VectorXd&, int var) { return MatrixXd::Constant(1, 1, var == 2 ? 1.0 : 0.0); };
    s.dB = [](const Vector2d&, const VectorXd&, int) { return VectorXd::Zero(1).eval(); };
    s.dLambda = [](const Vector2d&, const VectorXd&, int) { return MatrixXd::Zero(1, 1).eval(); };
    s.x0 = {0.0, 0.0};
    s.a = 1.0;
    s.a_bar = 1.0;
    s.y0 = {0.0};
    s.b = 1.5;
    s.has_speed_bounds = true;
    s.speed_max = 1.5;
    s.speed_min = -1.5;
    HyperbolicCase c;
    c.system = s;
    c.init.I = [](double u) { return VectorXd::Constant(1, u); };
    c.init.dI = [](double) { return VectorXd::Constant(1, 1.0); };
    return c;
}

std::vector<CatalogEntry> build() {
    std::vector<CatalogEntry> v;
    auto pde = [&](std::string name, std::string doc, std::function<ProblemSpec()> make, ExactFn exact) {
        CatalogEntry e;
        e.name = std::move(name);
        e.doc = std::move(doc);
        e.kind = EntryKind::pde;
        e.make_pde = std::move(make);
        e.exact = std::move(exact);
        v.push_back(std::move(e));
    };
    auto odef = [&](std::string name, std::string doc, std::function<OdeProblem()> make, OdeExactFn exact) {
        CatalogEntry e;
        e.name = std::move(name);
        e.doc = std::move(doc);
        e.kind = EntryKind::ode;
        e.make_ode = std::move(make);
        e.ode_exact = std::move(exact);
        v.push_back(std::move(e));
    };
    auto hyp = [&](std::string name, std::string doc, std::function<HyperbolicCase()> make, ExactFn exact) {
        CatalogEntry e;
        e.name = std::move(name);
        e.doc = std::move(doc);
        e.kind = EntryKind::hyperbolic;
        e.make_hyperbolic = std::move(make);
        e.exact = std::move(exact);
        v.push_back(std::move(e));
    };

    pde("advection", "C = 1, D = 0, I(u) = u; exact y = x1 - x2", [] { return advection(false); },
        [](Span x, Out o) { o[0] = x[0] - x[1]; });
    pde("constant-advection", "C = 1, D = 0, I(u) = sin u; exact y = sin(x1 - x2)", [] { return advection(true); },
        [](Span x, Out o) { o[0] = std::sin(x[0] - x[1]); });
    pde("variable-advection", "C = x1/2, D = 0, I(u) = sin u; exact y = sin(x1 exp(-x2/2))", variable_advection,
        [](Span x, Out o) { o[0] = std::sin(x[0] * std::exp(-0.5 * x[1])); });
    pde("burgers", "inviscid Burgers C = y, D = 0, I(u) = u; exact y = x1/(1 + x2)", burgers,
        [](Span x, Out o) { o[0] = x[0] / (1.0 + x[1]); });
    pde("source-only", "C = 0, D = -y, I(u) = 1 + u/2; exact y = (1 + x1/2) exp(-x2)", source_only,
        [](Span x, Out o) { o[0] = (1.0 + 0.5 * x[0]) * std::exp(-x[1]); });
    pde("advection-2d", "m = 3, C = (1, 1/2), D = 0, I(u) = u1 + 2 u2; exact y = x1 + 2 x2 - 2 x3", advection_2d,
        [](Span x, Out o) { o[0] = (x[0] - x[2]) + 2.0 * (x[1] - 0.5 * x[2]); });
    pde("constant", "C = 1/2, D = 1/4, I = 1; exact y = 1 + x2/4", constant_field,
        [](Span x, Out o) { o[0] = 1.0 + 0.25 * x[1]; });

    odef("ode-exponential", "y' = y, y(0) = 1; exact e^t; alpha = 1 overrides the Picard rule",
         [] { return ode("ode-exponential", 1, [](double, Span y, Out o) { o[0] = y[0]; }, 1.0, 3.0, 0.0, {1.0}, 1.0,
                         2.0, 1.0); },
         [](double t, Out o) { o[0] = std::exp(t); });
    odef("ode-logistic", "y' = y(1 - y), y(0) = 1/2; exact 1/(1 + e^-t)",
         [] {
             return ode("ode-logistic", 1, [](double, Span y, Out o) { o[0] = y[0] * (1.0 - y[0]); }, 1.0, 0.25, 0.0,
                        {0.5}, 1.0, 0.5, 1.0);
         },
         [](double t, Out o) { o[0] = 1.0 / (1.0 + std::exp(-t)); });
    odef("ode-forced", "y' = -y + sin t, y(0) = 0; exact (sin t - cos t + e^-t)/2",
         [] {
             return ode("ode-forced", 1, [](double t, Span y, Out o) { o[0] = -y[0] + std::sin(t); }, 1.0, 2.0, 1.0,
                        {0.0}, 1.0, 1.0, 0.5);
         },
         [](double t, Out o) { o[0] = 0.5 * (std::sin(t) - std::cos(t) + std::exp(-t)); });
    odef("ode-oscillator", "y1' = y2, y2' = -y1, y(0) = (1, 0); exact (cos t, -sin t)",
         [] {
             return ode("ode-oscillator", 2,
                        [](double, Span y, Out o) {
                            o[0] = y[1];
                            o[1] = -y[0];
                        },
                        1.0, 2.0, 0.0, {1.0, 0.0}, 1.0, 1.0, 0.5);
         },
         [](double t, Out o) {
             o[0] = std::cos(t);
             o[1] = -std::sin(t);
         });

    hyp("wave-system", "A = [[0,1],[1,0]], B = 0, I = (g, 0) with g(u) = sin(pi u)/2; d'Alembert solution",
        wave_system, [](Span x, Out o) {
            const double l = wave_g(x[0] - x[1]);
            const double r = wave_g(x[0] + x[1]);
            o[0] = 0.5 * (l + r);
            o[1] = 0.5 * (l - r);
        });
    hyp("decoupled-2system", "A = diag(1, -1/2), B = 0, Lambda = I, I = (sin u, cos u)", decoupled,
        [](Span x, Out o) {
            o[0] = std::sin(x[0] - x[1]);
            o[1] = std::cos(x[0] + 0.5 * x[1]);
        });
    hyp("burgers-system", "scalar Burgers as a 1-system: A = [y], Lambda = [1], I(u) = u", burgers_system,
        [](Span x, Out o) { o[0] = x[0] / (1.0 + x[1]); });
    return v;
}

}  // namespace

const char* to_string(EntryKind k) {
    switch (k) {
        case EntryKind::pde: return "pde";
        case EntryKind::ode: return "ode";
        case EntryKind::hyperbolic: return "hyperbolic";
    }
    return "?";
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build();
    return entries;
}

const CatalogEntry& find_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw ConfigError("unknown problem: " + name);
}

}  // namespace qlpde
