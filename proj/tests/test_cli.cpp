#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "qlpde/cli.hpp"
#include "qlpde/config.hpp"
#include "qlpde/constants.hpp"
#include "qlpde/report.hpp"

using namespace qlpde;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qlpde");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qlpde_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("N range parsing") {
    int lo = 0, hi = 0;
    parse_N_range("5", lo, hi);
    CHECK(lo == 5);
    CHECK(hi == 5);
    parse_N_range("3..5", lo, hi);
    CHECK(lo == 3);
    CHECK(hi == 5);
    CHECK_THROWS_AS(parse_N_range("5..3", lo, hi), ConfigError);
    CHECK_THROWS_AS(parse_N_range("x", lo, hi), ConfigError);
    CHECK_THROWS_AS(parse_N_range("3..", lo, hi), ConfigError);
}

TEST_CASE("constants report matches direct module calls") {
    const fs::path dir = scratch("constants");
    const Run r = cli({"constants", "--problem", "burgers", "--out", dir.string()});
    REQUIRE(r.status == 0);
    const auto doc = load(dir / "burgers" / "constants.json");
    const ProblemSpec p = find_entry("burgers").make_pde();
    const ConstantsReport direct = choose_alpha(p, 0.9, 33);
    CHECK(doc["constants"]["c1"].get<double>() == direct.c1);
    CHECK(doc["constants"]["alpha"].get<double>() == direct.alpha);
    CHECK(doc["constants"]["L_f"].get<double>() == direct.L_f);
    CHECK(doc["validation"]["passed"].get<bool>());
    CHECK(doc["config"]["command"] == "constants");
    CHECK(doc["problem"]["name"] == "burgers");
}

TEST_CASE("solve on advection writes the exact final layer") {
    const fs::path dir = scratch("solve");
    const Run r = cli({"solve", "--problem", "advection", "--N", "5", "--out", dir.string()});
    REQUIRE(r.status == 0);
    std::ifstream in(dir / "advection" / "solution.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "x1,x2,y1,exact1,error1");
    int rows = 0;
    while (std::getline(in, line)) {
        double x1, x2, y;
        char c;
        std::istringstream s(line);
        s >> x1 >> c >> x2 >> c >> y;
        CHECK(y == Approx(x1 - x2).margin(1e-12));
        ++rows;
    }
    CHECK(rows == default_node_schedule(5));
    CHECK(load(dir / "advection" / "solve.json")["max_error"].get<double>() <= 1e-12);
}

TEST_CASE("certify burgers passes") {
    const fs::path dir = scratch("certify");
    const Run r = cli({"certify", "--problem", "burgers", "--N", "3..5", "--out", dir.string()});
    CHECK(r.status == 0);
    const auto doc = load(dir / "burgers" / "certify.json");
    CHECK(doc["passed"].get<bool>());
    CHECK(doc["gap_decay"]["rows"].size() == 3);
    CHECK(doc["levels"][0]["enclosure"]["passed"].get<bool>());
}

TEST_CASE("caps and bad input give nonzero status") {
    CHECK(cli({"certify", "--problem", "burgers", "--N", "7"}).status != 0);
    CHECK(cli({"solve", "--problem", "burgers", "--N", "11"}).status != 0);
    CHECK(cli({"solve", "--problem", "nope"}).status != 0);
    CHECK(cli({"solve", "--problem", "burgers", "--alpha", "abc"}).status != 0);
    CHECK(cli({"solve", "--problem", "burgers", "--direction", "up"}).status != 0);
    CHECK(cli({"ode", "--problem", "burgers"}).status != 0);
    const Run r = cli({"solve", "--problem", "burgers", "--alpha", "0.9"});
    CHECK(r.status != 0);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(cli({}).status != 0);
}

TEST_CASE("runs are byte-identical") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (const auto& dir : {a, b}) {
        REQUIRE(cli({"convergence", "--problem", "burgers", "--N", "3..5", "--out", dir.string()}).status == 0);
        REQUIRE(cli({"ode", "--problem", "ode-logistic", "--N", "1..5", "--out", dir.string()}).status == 0);
        REQUIRE(cli({"hyperbolic", "--problem", "wave-system", "--N", "3..4", "--out", dir.string()}).status == 0);
    }
    for (const char* f : {"burgers/convergence.csv", "burgers/convergence.json", "burgers/convergence.dat",
                          "ode-logistic/ode.json", "ode-logistic/ode_brackets.csv", "wave-system/hyperbolic.csv",
                          "wave-system/hyperbolic.json"}) {
        INFO(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("every documented config resolves") {
    const fs::path dir = fs::path(QLPDE_SOURCE_DIR) / "docs" / "configs";
    int count = 0;
    for (const auto& e : catalog()) {
        INFO(e.name);
        const fs::path f = dir / (e.name + ".json");
        REQUIRE(fs::exists(f));
        const ResolvedProblem r = resolve_problem(f.string());
        CHECK(r.kind == e.kind);
        CHECK(r.name == e.name);
        ++count;
    }
    CHECK(count == static_cast<int>(catalog().size()));
}

TEST_CASE("polynomial config matches the catalog problem") {
    const fs::path f = fs::path(QLPDE_SOURCE_DIR) / "docs" / "configs" / "burgers.json";
    const ResolvedProblem cfg = resolve_problem(f.string());
    const ProblemSpec cat = find_entry("burgers").make_pde();
    const double x[2] = {0.3, 0.1}, y[1] = {-0.7};
    double a[1], b[1];
    cfg.pde.coeffs.C(x, y, a);
    cat.coeffs.C(x, y, b);
    CHECK(a[0] == b[0]);
    CHECK(choose_alpha(cfg.pde, 0.9, 33).alpha == choose_alpha(cat, 0.9, 33).alpha);
}

TEST_CASE("malformed configs are rejected") {
    using nlohmann::json;
    CHECK_THROWS_AS(parse_problem_config(json::array(), "x"), ConfigError);
    CHECK_THROWS_AS(parse_problem_config({{"kind", "pde"}, {"m", 2}}, "x"), ConfigError);
    CHECK_THROWS_AS(parse_problem_config({{"kind", "what"}}, "x"), ConfigError);
    CHECK_THROWS_AS(parse_problem_config({{"kind", "ode"}, {"catalog", "burgers"}}, "x"), ConfigError);
    CHECK_THROWS_AS(parse_polynomial(json::array({{{"coef", 1.0}, {"pow", {1, 2, 3}}}}), 2), ConfigError);
    CHECK_THROWS_AS(parse_problem_config({{"kind", "pde"}, {"catalog", "burgers"}, {"a_bar", 3.0}}, "x"), ConfigError);
}

TEST_CASE("report formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(kUnbounded) == "inf");
    CHECK(json_number(-kUnbounded) == "-inf");
    CsvTable t({"a", "b"});
    const double row[] = {1.0, 0.5};
    t.add_row(row);
    CHECK(t.str() == "a,b\n1,0.5\n");
    const double bad[] = {1.0};
    CHECK_THROWS(t.add_row(bad));
    const double xs[] = {1.0, 2.0}, ys[] = {3.0, 4.0};
    CHECK(plot_data(xs, ys) == "1 3\n2 4\n");
}

TEST_CASE("list prints the catalog") {
    const Run r = cli({"list"});
    CHECK(r.status == 0);
    for (const char* name : {"advection", "variable-advection", "burgers", "source-only", "ode-exponential",
                             "ode-logistic", "wave-system", "decoupled-2system"})
        CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("environment variable selects the output directory") {
    const fs::path dir = scratch("env");
    setenv("QLPDE_OUT_DIR", dir.string().c_str(), 1);
    REQUIRE(cli({"describe-domain", "--problem", "burgers", "--N", "2"}).status == 0);
    unsetenv("QLPDE_OUT_DIR");
    const auto doc = load(dir / "burgers" / "domain.json");
    CHECK(doc["hyperplanes"].size() == 5);
    CHECK(fs::exists(dir / "burgers" / "domain_lo.dat"));
}
