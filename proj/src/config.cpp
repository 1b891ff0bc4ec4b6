#include "qlpde/config.hpp"

#include <filesystem>
#include <fstream>
#include <memory>

namespace qlpde {

namespace {

using nlohmann::json;

constexpr int kMaxVariables = 64;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

const json& require(const json& doc, const char* key) {
    if (!doc.contains(key)) bad(std::string("missing field '") + key + "'");
    return doc.at(key);
}

double number(const json& v, const char* key) {
    if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& v, const char* key) {
    if (!v.is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

std::vector<double> vector_of(const json& v, const char* key, std::size_t size) {
    if (!v.is_array() || v.size() != size)
        bad(std::string("field '") + key + "' must be an array of " + std::to_string(size) + " numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, key));
    return out;
}

/// A scalar applies to every axis.
std::vector<double> widths_of(const json& v, const char* key, std::size_t size) {
    if (v.is_number()) return std::vector<double>(size, v.get<double>());
    return vector_of(v, key, size);
}

std::vector<Polynomial> polys_of(const json& v, const char* key, std::size_t count, int variables) {
    if (!v.is_array() || v.size() != count)
        bad(std::string("field '") + key + "' must list " + std::to_string(count) + " polynomials");
    std::vector<Polynomial> out;
    for (const auto& p : v) out.push_back(parse_polynomial(p, variables));
    return out;
}

json polys_to_json(const std::vector<Polynomial>& ps) {
    json out = json::array();
    for (const auto& p : ps) {
        json terms = json::array();
        for (const auto& t : p.terms()) terms.push_back({{"coef", t.coef}, {"pow", t.pow}});
        out.push_back(terms);
    }
    return out;
}

json bundle_to_json(const ConstantBundle& k) {
    return {{"L_C", k.L_C},         {"L_D", k.L_D}, {"M_norm_D", k.M_norm_D}, {"M_norm_C", k.M_norm_C},
            {"M_C", k.M_C},         {"m_C", k.m_C}, {"estimated", k.estimated}};
}

ConstantBundle bundle_from_json(const json& c, int m, int n) {
    ConstantBundle k;
    k.m = m;
    k.n = n;
    k.L_C = number(require(c, "L_C"), "L_C");
    k.L_D = number(require(c, "L_D"), "L_D");
    k.M_norm_D = number(require(c, "M_norm_D"), "M_norm_D");
    k.M_norm_C = number(require(c, "M_norm_C"), "M_norm_C");
    k.M_C = vector_of(require(c, "M_C"), "M_C", m - 1);
    k.m_C = vector_of(require(c, "m_C"), "m_C", m - 1);
    check_bundle(k);
    return k;
}

// (x, y) -> polys evaluated on the concatenated vector.
FieldFn field_of(std::vector<Polynomial> polys) {
    auto ps = std::make_shared<const std::vector<Polynomial>>(std::move(polys));
    return [ps](std::span<const double> x, std::span<const double> y, std::span<double> out) {
        double v[kMaxVariables];
        std::copy(x.begin(), x.end(), v);
        std::copy(y.begin(), y.end(), v + x.size());
        const std::span<const double> all(v, x.size() + y.size());
        for (std::size_t i = 0; i < ps->size(); ++i) out[i] = (*ps)[i](all);
    };
}

ResolvedProblem parse_pde(const json& doc, const std::string& source, int estimate_samples) {
    ResolvedProblem r;
    r.kind = EntryKind::pde;
    r.source = source;
    bool replaced = false;
    if (doc.contains("catalog")) {
        const CatalogEntry& e = find_entry(doc.at("catalog").get<std::string>());
        if (e.kind != EntryKind::pde) bad("catalog entry '" + e.name + "' is not a pde problem");
        r.pde = e.make_pde();
        r.exact = e.exact;
        r.description["catalog"] = e.name;
    } else {
        const int m = integer(require(doc, "m"), "m");
        const int n = integer(require(doc, "n"), "n");
        if (m < 2 || n < 1 || m + n > kMaxVariables) bad("need m >= 2, n >= 1 and m + n <= 64");
        r.pde.m = m;
        r.pde.n = n;
        r.pde.name = "config";
        for (const char* key : {"x0", "a", "y0", "b", "a_bar", "C", "D", "I", "L_I"}) require(doc, key);
    }
    ProblemSpec& p = r.pde;
    const auto m = static_cast<std::size_t>(p.m);
    const auto n = static_cast<std::size_t>(p.n);
    if (doc.contains("name")) p.name = doc.at("name").get<std::string>();
    if (doc.contains("x0")) p.P1.center = vector_of(doc.at("x0"), "x0", m);
    if (doc.contains("a")) p.P1.half_widths = widths_of(doc.at("a"), "a", m);
    if (doc.contains("y0")) p.P2.center = vector_of(doc.at("y0"), "y0", n);
    if (doc.contains("b")) p.P2.half_widths = widths_of(doc.at("b"), "b", n);
    if (doc.contains("a_bar")) p.a_bar = number(doc.at("a_bar"), "a_bar");
    if (doc.contains("L_I")) p.init.L_I = number(doc.at("L_I"), "L_I");
    std::vector<Polynomial> C, D, I;
    if (doc.contains("C")) {
        C = polys_of(doc.at("C"), "C", n * (m - 1), p.m + p.n);
        p.coeffs.C = field_of(C);
        replaced = true;
    }
    if (doc.contains("D")) {
        D = polys_of(doc.at("D"), "D", n, p.m + p.n);
        p.coeffs.D = field_of(D);
        replaced = true;
    }
    if (doc.contains("I")) {
        I = polys_of(doc.at("I"), "I", n, p.m - 1);
        auto ps = std::make_shared<const std::vector<Polynomial>>(I);
        p.init.I = [ps](std::span<const double> u, std::span<double> out) {
            for (std::size_t i = 0; i < ps->size(); ++i) out[i] = (*ps)[i](u);
        };
        replaced = true;
    }
    if (replaced) r.exact = nullptr;
    if (!(p.a_bar > 0.0)) bad("a_bar must be positive");
    for (std::size_t l = 0; l + 1 < m; ++l)
        if (p.a_bar > p.P1.half_widths[l]) bad("a_bar exceeds the P1 half width on a lateral axis");

    if (doc.contains("constants")) {
        p.constants = bundle_from_json(doc.at("constants"), p.m, p.n);
    } else if (replaced || !doc.contains("catalog")) {
        const json est = doc.value("estimate", json::object());
        const int samples = est.value("samples", estimate_samples);
        const double safety = est.value("safety", 1.5);
        SamplingOptions so;
        so.samples_per_axis = samples;
        so.seed = est.value("seed", 0ULL);
        p.constants = estimate_constants(p, so, safety);
        r.description["estimate"] = {{"samples", samples}, {"safety", safety}, {"seed", so.seed}};
    }
    r.name = p.name;
    r.description["kind"] = "pde";
    r.description["name"] = p.name;
    r.description["source"] = source;
    r.description["m"] = p.m;
    r.description["n"] = p.n;
    r.description["x0"] = p.P1.center;
    r.description["a"] = p.P1.half_widths;
    r.description["y0"] = p.P2.center;
    r.description["b"] = p.P2.half_widths;
    r.description["a_bar"] = p.a_bar;
    r.description["L_I"] = p.init.L_I;
    r.description["constants"] = bundle_to_json(p.constants);
    if (!C.empty()) r.description["C"] = polys_to_json(C);
    if (!D.empty()) r.description["D"] = polys_to_json(D);
    if (!I.empty()) r.description["I"] = polys_to_json(I);
    r.description["has_exact"] = static_cast<bool>(r.exact);
    return r;
}

ResolvedProblem parse_ode(const json& doc, const std::string& source) {
    ResolvedProblem r;
    r.kind = EntryKind::ode;
    r.source = source;
    OdeProblem& p = r.ode;
    bool replaced = false;
    if (doc.contains("catalog")) {
        const CatalogEntry& e = find_entry(doc.at("catalog").get<std::string>());
        if (e.kind != EntryKind::ode) bad("catalog entry '" + e.name + "' is not an ode problem");
        p = e.make_ode();
        r.ode_exact = e.ode_exact;
        r.description["catalog"] = e.name;
    } else {
        for (const char* key : {"n", "f", "L_f", "M_norm_f", "y0", "a", "b"}) require(doc, key);
        p.name = "config";
        p.n = integer(doc.at("n"), "n");
        if (p.n < 1 || p.n + 1 > kMaxVariables) bad("ode needs 1 <= n <= 63");
        p.alpha = 0.0;
    }
    const auto n = static_cast<std::size_t>(p.n);
    std::vector<Polynomial> f;
    if (doc.contains("f")) {
        f = polys_of(doc.at("f"), "f", n, p.n + 1);
        auto ps = std::make_shared<const std::vector<Polynomial>>(f);
        p.f = [ps](double t, std::span<const double> y, std::span<double> out) {
            double v[kMaxVariables];
            v[0] = t;
            std::copy(y.begin(), y.end(), v + 1);
            const std::span<const double> all(v, y.size() + 1);
            for (std::size_t i = 0; i < ps->size(); ++i) out[i] = (*ps)[i](all);
        };
        replaced = true;
        r.ode_exact = nullptr;
    }
    if (doc.contains("name")) p.name = doc.at("name").get<std::string>();
    if (doc.contains("L_f")) p.L_f = number(doc.at("L_f"), "L_f");
    if (doc.contains("M_norm_f")) p.M_norm_f = number(doc.at("M_norm_f"), "M_norm_f");
    if (doc.contains("L_t")) p.L_t = number(doc.at("L_t"), "L_t");
    else if (replaced) p.L_t = estimate_time_lipschitz(p, 33);
    if (doc.contains("t0")) p.t0 = number(doc.at("t0"), "t0");
    if (doc.contains("y0")) p.y0 = vector_of(doc.at("y0"), "y0", n);
    if (doc.contains("a")) p.a = number(doc.at("a"), "a");
    if (doc.contains("b")) p.b = number(doc.at("b"), "b");
    if (doc.contains("alpha")) p.alpha = number(doc.at("alpha"), "alpha");
    if (!(p.alpha > 0.0)) p.alpha = OdeProblem::alpha_rule(p.a, p.b, p.M_norm_f);
    if (!(p.a > 0.0) || !(p.b > 0.0)) bad("ode needs a > 0 and b > 0");
    r.name = p.name;
    r.description["kind"] = "ode";
    r.description["name"] = p.name;
    r.description["source"] = source;
    r.description["n"] = p.n;
    r.description["t0"] = p.t0;
    r.description["y0"] = p.y0;
    r.description["a"] = p.a;
    r.description["b"] = p.b;
    r.description["alpha"] = p.alpha;
    r.description["L_f"] = p.L_f;
    r.description["M_norm_f"] = p.M_norm_f;
    r.description["L_t"] = p.L_t;
    if (!f.empty()) r.description["f"] = polys_to_json(f);
    r.description["has_exact"] = static_cast<bool>(r.ode_exact);
    return r;
}

ResolvedProblem parse_hyperbolic(const json& doc, const std::string& source) {
    ResolvedProblem r;
    r.kind = EntryKind::hyperbolic;
    r.source = source;
    const CatalogEntry& e = find_entry(require(doc, "catalog").get<std::string>());
    if (e.kind != EntryKind::hyperbolic) bad("catalog entry '" + e.name + "' is not a hyperbolic system");
    r.hyperbolic = e.make_hyperbolic();
    r.exact = e.exact;
    HyperbolicSystem& s = r.hyperbolic.system;
    if (doc.contains("name")) s.name = doc.at("name").get<std::string>();
    if (doc.contains("a")) s.a = number(doc.at("a"), "a");
    if (doc.contains("a_bar")) s.a_bar = number(doc.at("a_bar"), "a_bar");
    if (doc.contains("b")) s.b = number(doc.at("b"), "b");
    if (doc.contains("reduce")) {
        const json& rd = doc.at("reduce");
        r.hyperbolic.reduce.samples_per_axis = rd.value("samples", r.hyperbolic.reduce.samples_per_axis);
        r.hyperbolic.reduce.safety = rd.value("safety", r.hyperbolic.reduce.safety);
        r.hyperbolic.reduce.validation_samples = rd.value("validation_samples", r.hyperbolic.reduce.validation_samples);
    }
    r.name = s.name;
    r.description = {{"kind", "hyperbolic"},
                     {"catalog", e.name},
                     {"name", s.name},
                     {"source", source},
                     {"n", s.n},
                     {"x0", s.x0},
                     {"a", s.a},
                     {"a_bar", s.a_bar},
                     {"y0", s.y0},
                     {"b", s.b},
                     {"reduce",
                      {{"samples", r.hyperbolic.reduce.samples_per_axis},
                       {"safety", r.hyperbolic.reduce.safety},
                       {"validation_samples", r.hyperbolic.reduce.validation_samples}}},
                     {"has_exact", static_cast<bool>(r.exact)}};
    return r;
}

}  // namespace

Polynomial parse_polynomial(const json& terms, int variables) {
    if (!terms.is_array()) bad("a polynomial is an array of {coef, pow} terms");
    std::vector<Monomial> out;
    for (const auto& t : terms) {
        if (!t.is_object()) bad("polynomial term must be an object");
        Monomial mono;
        mono.coef = number(require(t, "coef"), "coef");
        if (t.contains("pow")) {
            if (!t.at("pow").is_array()) bad("field 'pow' must be an array of integers");
            for (const auto& p : t.at("pow")) mono.pow.push_back(integer(p, "pow"));
        }
        out.push_back(std::move(mono));
    }
    return Polynomial(variables, std::move(out));
}

ResolvedProblem parse_problem_config(const json& doc, const std::string& source, int estimate_samples) {
    if (!doc.is_object()) bad("document must be a JSON object");
    const std::string kind = doc.value("kind", std::string("pde"));
    try {
        if (kind == "pde") return parse_pde(doc, source, estimate_samples);
        if (kind == "ode") return parse_ode(doc, source);
        if (kind == "hyperbolic") return parse_hyperbolic(doc, source);
    } catch (const json::exception& e) {
        bad(e.what());
    }
    bad("unknown kind '" + kind + "'");
}

ResolvedProblem resolve_problem(const std::string& problem, int estimate_samples) {
    for (const auto& e : catalog()) {
        if (e.name != problem) continue;
        json doc = {{"catalog", e.name}, {"kind", to_string(e.kind)}};
        ResolvedProblem r = parse_problem_config(doc, "catalog", estimate_samples);
        r.description["doc"] = e.doc;
        return r;
    }
    if (!std::filesystem::is_regular_file(problem)) throw ConfigError("unknown problem: " + problem);
    std::ifstream in(problem);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + problem + ": " + e.what());
    }
    return parse_problem_config(doc, problem, estimate_samples);
}

}  // namespace qlpde
