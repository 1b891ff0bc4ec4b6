#include "qlpde/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "qlpde/brackets.hpp"
#include "qlpde/config.hpp"
#include "qlpde/constants.hpp"
#include "qlpde/parallel.hpp"
#include "qlpde/report.hpp"

namespace qlpde {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr struct {
    Command c;
    const char* name;
    const char* help;
} kCommands[] = {
    {Command::constants, "constants", "locality alpha, L_f, C1/C2 and hypothesis checks"},
    {Command::describe_domain, "describe-domain", "hyperplane extents of the standard domain"},
    {Command::solve, "solve", "characteristic stepper at one N"},
    {Command::certify, "certify", "bracket fields, enclosure, nesting and gap decay over an N range"},
    {Command::ode, "ode", "ODE brackets, enclosure, nesting and gap decay"},
    {Command::hyperbolic, "hyperbolic", "two-variable hyperbolic reduction and gradient check"},
    {Command::convergence, "convergence", "refinement study over an N range"},
    {Command::list, "list", "catalog problems"},
};

struct Range {
    int lo, hi;
};

Range default_range(Command c) {
    switch (c) {
        case Command::solve: return {5, 5};
        case Command::certify: return {3, 5};
        case Command::ode: return {1, 10};
        case Command::hyperbolic: return {4, 7};
        case Command::convergence: return {4, 8};
        case Command::describe_domain: return {3, 3};
        default: return {0, 0};
    }
}

Range resolve_range(const RunConfig& cfg) {
    Range r = default_range(cfg.command);
    if (cfg.N_lo >= 0) r = {cfg.N_lo, cfg.N_hi >= 0 ? cfg.N_hi : cfg.N_lo};
    const int cap = cfg.N_cap >= 0 ? cfg.N_cap : (cfg.command == Command::certify ? 6 : 10);
    if (r.lo < 0 || r.hi < r.lo) throw ConfigError("invalid N range");
    if (r.hi > cap)
        throw ConfigError("N = " + std::to_string(r.hi) + " exceeds the cap " + std::to_string(cap) + " for " +
                          to_string(cfg.command));
    return r;
}

fs::path output_dir(const RunConfig& cfg, const std::string& name) {
    std::string base = cfg.out_dir;
    if (base.empty()) {
        const char* env = std::getenv("QLPDE_OUT_DIR");
        base = env && *env ? env : "qlpde_out";
    }
    return fs::path(base) / name;
}

ExecPolicy policy_of(const RunConfig& cfg) { return cfg.serial ? ExecPolicy::serial : ExecPolicy::parallel; }

int nodes_for(const RunConfig& cfg, int N) { return cfg.nodes > 0 ? cfg.nodes : default_node_schedule(N); }

json strings(const std::vector<std::string>& v) { return json(v); }

json constants_json(const ConstantsReport& r) {
    return {{"c1", json_number(r.c1)},
            {"c2", json_number(r.c2)},
            {"theta", json_number(r.theta)},
            {"alpha_locality", json_number(r.alpha_locality)},
            {"alpha_bar", json_number(r.alpha_bar)},
            {"alpha_geom", json_number(r.alpha_geom)},
            {"alpha", json_number(r.alpha)},
            {"L_I", json_number(r.L_I)},
            {"M_I", json_number(r.M_I)},
            {"L_f", json_number(r.L_f)},
            {"L_Ufs", json_number(r.L_Ufs)},
            {"C1", json_number(r.C1)},
            {"C2", json_number(r.C2)},
            {"safety", json_number(r.safety)},
            {"locality_ok", r.locality_ok},
            {"warnings", strings(r.warnings)}};
}

ConstantsReport resolve_alpha(const ProblemSpec& spec, const RunConfig& cfg) {
    const double M_I = initial_deviation(spec, cfg.samples);
    if (cfg.alpha) return evaluate_constants(spec, *cfg.alpha, M_I);
    return choose_alpha(spec, cfg.safety, M_I);
}

json base_report(const RunConfig& cfg, const ResolvedProblem& p) {
    return {{"config", to_json(cfg)}, {"problem", p.description}};
}

void print_warnings(std::ostream& out, const std::vector<std::string>& w) {
    for (const auto& s : w) out << "warning: " << s << '\n';
}

std::vector<std::string> axis_names(const char* prefix, int count) {
    std::vector<std::string> v;
    for (int i = 0; i < count; ++i) v.push_back(std::string(prefix) + std::to_string(i + 1));
    return v;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Final-layer error against the exact solution.
double final_layer_error(const GridSolution& sol, const ExactFn& exact) {
    const int K = sol.steps();
    const Lattice& L = sol.layers[K];
    const int lat = sol.domain.lateral();
    std::vector<double> x(lat + 1), e(sol.n);
    x[lat] = sol.domain.plane_coordinate(sol.N, K);
    double worst = 0.0;
    for (std::size_t j = 0; j < L.node_count(); ++j) {
        L.node_point(j, std::span<double>(x.data(), lat));
        exact(x, e);
        for (int i = 0; i < sol.n; ++i) worst = std::max(worst, std::abs(L.at(j)[i] - e[i]));
    }
    return worst;
}

const ProblemSpec& need_pde(const ResolvedProblem& p, Command c) {
    if (p.kind != EntryKind::pde)
        throw ConfigError(std::string(to_string(c)) + " needs a pde problem; '" + p.name + "' is " + to_string(p.kind));
    return p.pde;
}

int cmd_list(std::ostream& out) {
    for (const auto& e : catalog())
        out << e.name << "  [" << to_string(e.kind) << (e.has_exact() ? ", exact" : "") << "]  " << e.doc << '\n';
    return 0;
}

int cmd_constants(const RunConfig& cfg, const ResolvedProblem& p, std::ostream& out) {
    json rep = base_report(cfg, p);
    const fs::path dir = output_dir(cfg, p.name);
    int status = 0;
    if (p.kind == EntryKind::ode) {
        const OdeProblem& o = p.ode;
        rep["ode"] = {{"alpha", o.alpha},
                      {"alpha_rule", json_number(OdeProblem::alpha_rule(o.a, o.b, o.M_norm_f))},
                      {"L_f", o.L_f},
                      {"M_norm_f", o.M_norm_f},
                      {"L_t", o.L_t}};
        out << "ode " << p.name << " alpha=" << format_double(o.alpha)
            << " alpha_rule=" << format_double(OdeProblem::alpha_rule(o.a, o.b, o.M_norm_f)) << '\n';
        write_json(dir / "constants.json", rep);
        return 0;
    }
    ProblemSpec spec;
    if (p.kind == EntryKind::hyperbolic) {
        const Reduction red = reduce(p.hyperbolic.system, p.hyperbolic.init, p.hyperbolic.reduce);
        spec = red.spec;
        rep["reduction"] = {{"eigen_residual", red.eigen_residual},
                            {"inverse_residual", red.inverse_residual},
                            {"sample_points", red.sample_points},
                            {"warnings", strings(red.warnings)}};
    } else {
        spec = p.pde;
    }
    SamplingOptions so;
    so.samples_per_axis = cfg.samples;
    so.seed = cfg.seed;
    const ValidationReport v = validate_problem(spec, so);
    json checks = json::array();
    for (const auto& c : v.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"declared", json_number(c.declared)},
                          {"sampled", json_number(c.sampled)}});
    rep["validation"] = {{"passed", v.passed()}, {"points", v.points}, {"full_grid", v.full_grid}, {"checks", checks}};
    const ConstantsReport r = resolve_alpha(spec, cfg);
    rep["constants"] = constants_json(r);
    write_json(dir / "constants.json", rep);
    out << "constants " << p.name << " c1=" << format_double(r.c1) << " alpha=" << format_double(r.alpha)
        << " L_f=" << format_double(r.L_f) << " C1=" << format_double(r.C1) << " C2=" << format_double(r.C2) << '\n';
    for (const auto& c : v.checks)
        if (!c.passed) {
            out << "hypothesis failed: " << c.name << " declared=" << format_double(c.declared)
                << " sampled=" << format_double(c.sampled) << '\n';
            status = 2;
        }
    print_warnings(out, r.warnings);
    return status;
}

int cmd_describe_domain(const RunConfig& cfg, const ResolvedProblem& p, std::ostream& out) {
    const ProblemSpec& spec = need_pde(p, cfg.command);
    const Range rg = resolve_range(cfg);
    const ConstantsReport cr = resolve_alpha(spec, cfg);
    const StandardDomain d = build_domain(spec, cr.alpha, cfg.direction);
    json planes = json::array();
    std::vector<double> s, lo, hi;
    for (int k = 0; k <= (1 << rg.hi); ++k) {
        const Hyperplane hp = hyperplane(d, rg.hi, k);
        json ext = json::array();
        for (const auto& e : hp.extents) ext.push_back({e.lo, e.hi});
        planes.push_back({{"k", k}, {"offset", hp.offset}, {"extents", ext}});
        s.push_back(hp.offset);
        lo.push_back(hp.extents[0].lo);
        hi.push_back(hp.extents[0].hi);
    }
    json rep = base_report(cfg, p);
    rep["alpha"] = cr.alpha;
    rep["direction"] = to_string(d.direction);
    rep["N"] = rg.hi;
    rep["step"] = d.step(rg.hi);
    rep["hyperplanes"] = planes;
    rep["warnings"] = strings(cr.warnings);
    const fs::path dir = output_dir(cfg, p.name);
    write_json(dir / "domain.json", rep);
    write_file(dir / "domain_lo.dat", plot_data(s, lo));
    write_file(dir / "domain_hi.dat", plot_data(s, hi));
    out << "domain " << p.name << " alpha=" << format_double(cr.alpha) << " N=" << rg.hi << " final extent ["
        << format_double(lo.back()) << ", " << format_double(hi.back()) << "]\n";
    print_warnings(out, cr.warnings);
    return 0;
}

int cmd_solve(const RunConfig& cfg, const ResolvedProblem& p, std::ostream& out) {
    const ProblemSpec& spec = need_pde(p, cfg.command);
    const Range rg = resolve_range(cfg);
    const int N = rg.hi;
    const ConstantsReport cr = resolve_alpha(spec, cfg);
    const int nodes = nodes_for(cfg, N);
    const GridSolution sol = solve(spec, cr.alpha, N, nodes, cfg.direction, policy_of(cfg));
    const int lat = spec.m - 1;
    const int K = sol.steps();
    const Lattice& L = sol.layers[K];
    std::vector<std::string> header = concat(axis_names("x", spec.m), axis_names("y", spec.n));
    if (p.exact) header = concat(concat(header, axis_names("exact", spec.n)), axis_names("error", spec.n));
    CsvTable csv(header);
    std::vector<double> x(spec.m), e(spec.n), row, px, py;
    x[lat] = sol.domain.plane_coordinate(N, K);
    for (std::size_t j = 0; j < L.node_count(); ++j) {
        L.node_point(j, std::span<double>(x.data(), lat));
        row.assign(x.begin(), x.end());
        const auto y = L.at(j);
        row.insert(row.end(), y.begin(), y.end());
        if (p.exact) {
            p.exact(x, e);
            row.insert(row.end(), e.begin(), e.end());
            for (int i = 0; i < spec.n; ++i) row.push_back(y[i] - e[i]);
        }
        csv.add_row(row);
        px.push_back(x[0]);
        py.push_back(y[0]);
    }
    const ResidualReport res = residual_check(spec, sol);
    json rep = base_report(cfg, p);
    rep["constants"] = constants_json(cr);
    rep["N"] = N;
    rep["nodes_per_axis"] = nodes;
    rep["step"] = sol.step();
    rep["range_violations"] = sol.range_violations;
    rep["residual"] = {{"max", res.max_residual}, {"points", res.points}};
    if (p.exact) rep["max_error"] = final_layer_error(sol, p.exact);
    rep["warnings"] = concat(cr.warnings, sol.warnings);
    const fs::path dir = output_dir(cfg, p.name);
    write_file(dir / "solution.csv", csv.str());
    if (lat == 1) write_file(dir / "solution.dat", plot_data(px, py));
    write_json(dir / "solve.json", rep);
    out << "solve " << p.name << " N=" << N << " nodes=" << nodes << " alpha=" << format_double(cr.alpha);
    if (p.exact) out << " max_error=" << format_double(rep["max_error"].get<double>());
    out << " residual=" << format_double(res.max_residual) << '\n';
    print_warnings(out, rep["warnings"].get<std::vector<std::string>>());
    return 0;
}

int cmd_certify(const RunConfig& cfg, const ResolvedProblem& p, std::ostream& out) {
    const ProblemSpec& spec = need_pde(p, cfg.command);
    const Range rg = resolve_range(cfg);
    const ConstantsReport cr = resolve_alpha(spec, cfg);
    const int nodes = nodes_for(cfg, rg.hi);
    const StandardDomain d = build_domain(spec, cr.alpha, cfg.direction);
    std::vector<BracketField> fields;
    json levels = json::array();
    bool ok = true;
    for (int N = rg.lo; N <= rg.hi; ++N) {
        const GridSolution sol = solve(spec, cr.alpha, N, nodes, cfg.direction, policy_of(cfg));
        fields.push_back(compute_brackets(spec, d, N, nodes, cfg.extremization, policy_of(cfg)));
        const EnclosureReport enc = verify_enclosure(fields.back(), sol);
        json lvl = {{"N", N},
                    {"max_gap", fields.back().max_gap()},
                    {"inflation", fields.back().cumulative_inflation(fields.back().steps())},
                    {"enclosure",
                     {{"passed", enc.passed},
                      {"worst_margin", json_number(enc.worst_margin)},
                      {"slack", enc.slack},
                      {"checked", enc.checked},
                      {"worst_location", enc.worst_location}}}};
        ok = ok && enc.passed;
        out << "certify " << p.name << " N=" << N << " gap=" << format_double(fields.back().max_gap())
            << " enclosure=" << (enc.passed ? "ok" : "FAILED") << " margin=" << format_double(enc.worst_margin);
        if (fields.size() > 1) {
            const NestingReport nest = verify_nesting(fields[fields.size() - 2], fields.back());
            lvl["nesting"] = {{"passed", nest.passed},
                              {"worst_violation", nest.worst_violation},
                              {"slack", nest.slack},
                              {"checked", nest.checked},
                              {"violations_beyond_zero", nest.violations_beyond_zero}};
            ok = ok && nest.passed;
            out << " nesting=" << (nest.passed ? "ok" : "FAILED");
        }
        out << '\n';
        levels.push_back(lvl);
    }
    const GapDecayReport gd = gap_decay(fields, spec);
    json rows = json::array();
    for (const auto& r : gd.rows)
        rows.push_back({{"N", r.N}, {"gap", r.gap}, {"bound", json_number(r.bound)}, {"inflation", r.inflation}});
    ok = ok && gd.within_bound;
    json rep = base_report(cfg, p);
    rep["constants"] = constants_json(cr);
    rep["nodes_per_axis"] = nodes;
    rep["levels"] = levels;
    rep["gap_decay"] = {{"rows", rows}, {"ratios", gd.ratios}, {"order", gd.order}, {"within_bound", gd.within_bound}};
    rep["passed"] = ok;
    const BracketField& fin = fields.back();
    const int lat = spec.m - 1;
    CsvTable csv(concat(concat(axis_names("x", lat), axis_names("lower", spec.n)), axis_names("upper", spec.n)));
    std::vector<double> row(lat);
    const Lattice& lo = fin.lower[fin.steps()];
    const Lattice& hi = fin.upper[fin.steps()];
    for (std::size_t j = 0; j < lo.node_count(); ++j) {
        row.resize(lat);
        lo.node_point(j, row);
        for (int i = 0; i < spec.n; ++i) row.push_back(lo.at(j)[i]);
        for (int i = 0; i < spec.n; ++i) row.push_back(hi.at(j)[i]);
        csv.add_row(row);
    }
    std::vector<double> Ns, gaps;
    for (const auto& r : gd.rows) {
        Ns.push_back(r.N);
        gaps.push_back(r.gap);
    }
    const fs::path dir = output_dir(cfg, p.name);
    write_json(dir / "certify.json", rep);
    write_file(dir / "brackets.csv", csv.str());
    write_file(dir / "gap.dat", plot_data(Ns, gaps));
    out << "gap decay order=" << format_double(gd.order) << " within_bound=" << (gd.within_bound ? "yes" : "no")
        << '\n';
    print_warnings(out, cr.warnings);
    return ok ? 0 : 2;
}

int cmd_ode(const RunConfig& cfg, const ResolvedProblem& pr, std::ostream& out) {
    if (pr.kind != EntryKind::ode) throw ConfigError("ode needs an ode problem; '" + pr.name + "' is " + to_string(pr.kind));
    OdeProblem p = pr.ode;
    if (cfg.alpha) p.alpha = *cfg.alpha;
    const Range rg = resolve_range(cfg);
    json levels = json::array();
    bool ok = true;
    std::vector<OdeBrackets> brs;
    for (int N = rg.lo; N <= rg.hi; ++N) {
        brs.push_back(ode_bracket_solve(p, N, cfg.extremization, cfg.direction, policy_of(cfg)));
        const OdeBrackets& br = brs.back();
        const OdeEnclosureReport enc = ode_check_enclosure(p, br);
        json lvl = {{"N", N},
                    {"max_gap", br.max_gap()},
                    {"max_inflation", br.max_inflation()},
                    {"escapes", br.escapes},
                    {"diagnostics", strings(br.diagnostics)},
                    {"enclosure", {{"passed", enc.passed}, {"worst_margin", json_number(enc.worst_margin)}, {"checked", enc.checked}}}};
        ok = ok && enc.passed;
        if (brs.size() > 1) {
            const OdeNestingReport nest = ode_verify_nesting(brs[brs.size() - 2], br);
            lvl["nesting"] = {{"passed", nest.passed},
                              {"tolerance", nest.tolerance},
                              {"worst_violation", nest.worst_violation},
                              {"checked", nest.checked}};
            ok = ok && nest.passed;
        }
        levels.push_back(lvl);
        out << "ode " << pr.name << " N=" << N << " gap=" << format_double(br.max_gap())
            << " enclosure=" << (enc.passed ? "ok" : "FAILED") << '\n';
    }
    const OdeGapDecay gd = ode_gap_decay(p, rg.lo, rg.hi, cfg.extremization, cfg.direction);
    json rows = json::array();
    for (const auto& r : gd.rows) {
        rows.push_back({{"N", r.N}, {"gap", r.gap}, {"eps", r.eps}, {"bound", json_number(r.bound)}});
        if (r.gap > r.bound * (1 + 1e-12)) ok = false;
    }
    json rep = base_report(cfg, pr);
    rep["alpha"] = p.alpha;
    rep["levels"] = levels;
    rep["gap_decay"] = {{"rows", rows}, {"ratios", gd.ratios}};
    rep["passed"] = ok;
    const OdeBrackets& fin = brs.back();
    std::vector<std::string> header = concat(concat({"t"}, axis_names("lower", p.n)), axis_names("upper", p.n));
    if (pr.ode_exact) header = concat(header, axis_names("exact", p.n));
    CsvTable csv(header);
    std::vector<double> row, e(p.n), ts, gaps;
    for (int k = 0; k <= fin.steps(); ++k) {
        row = {fin.time(k)};
        for (int i = 0; i < p.n; ++i) row.push_back(fin.lo(k, i));
        for (int i = 0; i < p.n; ++i) row.push_back(fin.hi(k, i));
        if (pr.ode_exact) {
            pr.ode_exact(fin.time(k), e);
            row.insert(row.end(), e.begin(), e.end());
        }
        csv.add_row(row);
    }
    for (const auto& r : gd.rows) {
        ts.push_back(r.N);
        gaps.push_back(r.gap);
    }
    const fs::path dir = output_dir(cfg, pr.name);
    write_json(dir / "ode.json", rep);
    write_file(dir / "ode_brackets.csv", csv.str());
    write_file(dir / "ode_gap.dat", plot_data(ts, gaps));
    return ok ? 0 : 2;
}

int cmd_hyperbolic(const RunConfig& cfg, const ResolvedProblem& pr, std::ostream& out) {
    if (pr.kind != EntryKind::hyperbolic)
        throw ConfigError("hyperbolic needs a hyperbolic system; '" + pr.name + "' is " + to_string(pr.kind));
    const HyperbolicSystem& sys = pr.hyperbolic.system;
    const Reduction red = reduce(sys, pr.hyperbolic.init, pr.hyperbolic.reduce);
    const Range rg = resolve_range(cfg);
    const ConstantsReport cr = resolve_alpha(red.spec, cfg);
    const int n = sys.n;
    json levels = json::array();
    std::vector<int> Ns;
    std::vector<double> errs;
    AugmentedSolution last;
    for (int N = rg.lo; N <= rg.hi; ++N) {
        const int nodes = nodes_for(cfg, N);
        AugmentedSolution sol = solve_hyperbolic(sys, red, cr.alpha, N, nodes, policy_of(cfg));
        const GradientReport g = gradient_consistency(sol);
        json lvl = {{"N", N},
                    {"nodes_per_axis", nodes},
                    {"gradient", {{"max", g.max_discrepancy}, {"dx1", g.dx1}, {"dx2", g.dx2}, {"points", g.points}}},
                    {"range_violations", sol.grid.range_violations}};
        out << "hyperbolic " << pr.name << " N=" << N << " gradient=" << format_double(g.max_discrepancy);
        if (pr.exact) {
            // the exact solution covers the y block only
            const int K = sol.grid.steps();
            const Lattice& L = sol.grid.layers[K];
            double x[2] = {0.0, sol.grid.domain.plane_coordinate(N, K)};
            std::vector<double> e(n);
            double worst = 0.0;
            for (std::size_t j = 0; j < L.node_count(); ++j) {
                L.node_point(j, std::span<double>(x, 1));
                pr.exact(x, e);
                for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(L.at(j)[i] - e[i]));
            }
            lvl["max_error"] = worst;
            Ns.push_back(N);
            errs.push_back(worst);
            out << " max_error=" << format_double(worst);
        }
        out << '\n';
        levels.push_back(lvl);
        last = std::move(sol);
    }
    json rep = base_report(cfg, pr);
    rep["reduction"] = {{"eigen_residual", red.eigen_residual},
                        {"inverse_residual", red.inverse_residual},
                        {"sample_points", red.sample_points},
                        {"warnings", strings(red.warnings)}};
    rep["constants"] = constants_json(cr);
    rep["levels"] = levels;
    if (!errs.empty()) rep["order"] = fit_order(Ns, errs);
    std::vector<std::string> header = concat(concat(concat({"x1", "x2"}, axis_names("y", n)), axis_names("p1_", n)),
                                             axis_names("p2_", n));
    CsvTable csv(header);
    const int K = last.grid.steps();
    const Lattice& L = last.grid.layers[K];
    std::vector<double> row;
    for (std::size_t j = 0; j < L.node_count(); ++j) {
        double x1[1];
        L.node_point(j, x1);
        row = {x1[0], last.grid.domain.plane_coordinate(last.grid.N, K)};
        for (int i = 0; i < n; ++i) row.push_back(L.at(j)[i]);
        for (int i = 0; i < n; ++i) row.push_back(last.p1[K].at(j)[i]);
        for (int i = 0; i < n; ++i) row.push_back(last.p2[K].at(j)[i]);
        csv.add_row(row);
    }
    const fs::path dir = output_dir(cfg, pr.name);
    write_json(dir / "hyperbolic.json", rep);
    write_file(dir / "hyperbolic.csv", csv.str());
    print_warnings(out, cr.warnings);
    return 0;
}

int cmd_convergence(const RunConfig& cfg, const ResolvedProblem& p, std::ostream& out) {
    const ProblemSpec& spec = need_pde(p, cfg.command);
    const Range rg = resolve_range(cfg);
    const ConstantsReport cr = resolve_alpha(spec, cfg);
    const NodeSchedule sched = [&cfg](int N) { return nodes_for(cfg, N); };
    const ExactFn* exact = p.exact ? &p.exact : nullptr;
    const ConvergenceReport rep_c =
        refine_and_compare(spec, cr.alpha, rg.lo, rg.hi, sched, cfg.direction, exact, policy_of(cfg));
    CsvTable csv({"N", "nodes", "h", "diff_prev", "error_exact"});
    json rows = json::array();
    std::vector<double> Ns, errs;
    for (const auto& r : rep_c.rows) {
        const double h = cr.alpha / (1 << r.N);
        const double vals[] = {double(r.N), double(r.nodes), h, r.diff_prev, r.error_exact};
        csv.add_row(vals);
        rows.push_back({{"N", r.N}, {"nodes", r.nodes}, {"h", h}, {"diff_prev", r.diff_prev}, {"error_exact", r.error_exact}});
        Ns.push_back(r.N);
        errs.push_back(rep_c.has_exact ? r.error_exact : r.diff_prev);
        out << "convergence " << p.name << " N=" << r.N << " nodes=" << r.nodes
            << " error=" << format_double(r.error_exact) << " diff=" << format_double(r.diff_prev)
            << " seconds=" << r.seconds << '\n';
    }
    json rep = base_report(cfg, p);
    rep["constants"] = constants_json(cr);
    rep["rows"] = rows;
    rep["has_exact"] = rep_c.has_exact;
    rep["order_exact"] = rep_c.order_exact;
    rep["order_diff"] = rep_c.order_diff;
    rep["exact_class"] = rep_c.exact_class;
    const fs::path dir = output_dir(cfg, p.name);
    write_file(dir / "convergence.csv", csv.str());
    write_file(dir / "convergence.dat", plot_data(Ns, errs));
    write_json(dir / "convergence.json", rep);
    out << "order exact=" << format_double(rep_c.order_exact) << " diff=" << format_double(rep_c.order_diff) << '\n';
    print_warnings(out, cr.warnings);
    return 0;
}

}  // namespace

const char* to_string(Command c) {
    for (const auto& k : kCommands)
        if (k.c == c) return k.name;
    return "?";
}

std::optional<Command> parse_command(const std::string& name) {
    for (const auto& k : kCommands)
        if (name == k.name) return k.c;
    return std::nullopt;
}

void parse_N_range(const std::string& text, int& lo, int& hi) {
    const auto dots = text.find("..");
    try {
        std::size_t used = 0;
        if (dots == std::string::npos) {
            lo = hi = std::stoi(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } else {
            const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
            lo = std::stoi(a, &used);
            if (used != a.size()) throw std::invalid_argument(text);
            hi = std::stoi(b, &used);
            if (used != b.size()) throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse N range '" + text + "'; expected N or lo..hi");
    }
    if (lo < 0 || hi < lo) throw ConfigError("invalid N range '" + text + "'");
}

json to_json(const RunConfig& c) {
    return {{"command", to_string(c.command)},
            {"problem", c.problem},
            {"N_lo", c.N_lo},
            {"N_hi", c.N_hi},
            {"N_cap", c.N_cap},
            {"nodes", c.nodes},
            {"alpha", c.alpha ? json(*c.alpha) : json("auto")},
            {"direction", to_string(c.direction)},
            {"samples", c.samples},
            {"extremization", c.extremization},
            {"safety", c.safety},
            {"estimate_samples", c.estimate_samples},
            {"threads", c.threads},
            {"seed", c.seed},
            {"serial", c.serial}};
}

int run(const RunConfig& cfg, std::ostream& out) {
    set_thread_count(cfg.threads);
    if (cfg.command == Command::list) return cmd_list(out);
    if (cfg.problem.empty()) throw ConfigError("--problem is required");
    const ResolvedProblem p = resolve_problem(cfg.problem, cfg.estimate_samples);
    switch (cfg.command) {
        case Command::constants: return cmd_constants(cfg, p, out);
        case Command::describe_domain: return cmd_describe_domain(cfg, p, out);
        case Command::solve: return cmd_solve(cfg, p, out);
        case Command::certify: return cmd_certify(cfg, p, out);
        case Command::ode: return cmd_ode(cfg, p, out);
        case Command::hyperbolic: return cmd_hyperbolic(cfg, p, out);
        case Command::convergence: return cmd_convergence(cfg, p, out);
        case Command::list: break;
    }
    return cmd_list(out);
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Characteristic solver and bracket certifier for quasilinear first-order PDE"};
    app.require_subcommand(1, 1);
    RunConfig cfg;
    std::string N_text, alpha_text = "auto", direction = "plus";
    for (const auto& k : kCommands) {
        CLI::App* sub = app.add_subcommand(k.name, k.help);
        if (k.c == Command::list) continue;
        sub->add_option("--problem", cfg.problem, "catalog name or JSON config path")->required();
        sub->add_option("--N", N_text, "refinement level N or range lo..hi");
        sub->add_option("--N-cap", cfg.N_cap, "hard cap on N");
        sub->add_option("--nodes", cfg.nodes, "lateral nodes per axis (default: schedule)");
        sub->add_option("--alpha", alpha_text, "auto or a value");
        sub->add_option("--direction", direction, "plus or minus");
        sub->add_option("--samples", cfg.samples, "validation samples per axis");
        sub->add_option("--extremization", cfg.extremization, "bracket extremization samples per axis");
        sub->add_option("--safety", cfg.safety, "alpha safety factor in (0, 1)");
        sub->add_option("--estimate-samples", cfg.estimate_samples, "samples for estimated constants");
        sub->add_option("--out", cfg.out_dir, "output directory (default $QLPDE_OUT_DIR or ./qlpde_out)");
        sub->add_option("--threads", cfg.threads, "worker cap");
        sub->add_option("--seed", cfg.seed, "sampling seed");
        sub->add_flag("--serial", cfg.serial, "use the single-threaded kernels");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code;
    }
    try {
        for (const auto* sub : app.get_subcommands()) cfg.command = *parse_command(sub->get_name());
        if (!N_text.empty()) parse_N_range(N_text, cfg.N_lo, cfg.N_hi);
        if (alpha_text != "auto") {
            try {
                std::size_t used = 0;
                cfg.alpha = std::stod(alpha_text, &used);
                if (used != alpha_text.size()) throw std::invalid_argument(alpha_text);
            } catch (const std::logic_error&) {
                throw ConfigError("--alpha must be 'auto' or a number");
            }
            if (!(*cfg.alpha > 0.0)) throw ConfigError("--alpha must be positive");
        }
        if (direction == "plus")
            cfg.direction = Direction::plus;
        else if (direction == "minus")
            cfg.direction = Direction::minus;
        else
            throw ConfigError("--direction must be plus or minus");
        return run(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qlpde
