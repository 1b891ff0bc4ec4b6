#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>

#include "qlpde/types.hpp"

namespace qlpde {

enum class Command { constants, describe_domain, solve, certify, ode, hyperbolic, convergence, list };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

struct RunConfig {
    Command command = Command::list;
    std::string problem;
    /// Inclusive refinement range; -1 selects the per-command default.
    int N_lo = -1;
    int N_hi = -1;
    /// Hard cap on N; -1 selects 10 (6 for certify).
    int N_cap = -1;
    /// Lateral nodes per axis; 0 selects the default schedule.
    int nodes = 0;
    std::optional<double> alpha;  // empty: auto
    Direction direction = Direction::plus;
    int samples = 33;          // validation and M_I sampling per axis
    int extremization = 3;     // bracket extremization samples per axis
    double safety = 0.9;       // alpha = safety * alpha_locality
    int estimate_samples = 9;  // used when a config asks for estimated constants
    std::string out_dir;       // empty: $QLPDE_OUT_DIR or ./qlpde_out
    int threads = 0;
    std::uint64_t seed = 0;
    bool serial = false;
};

/// "5" or "3..5".
void parse_N_range(const std::string& text, int& lo, int& hi);

nlohmann::json to_json(const RunConfig& cfg);

/// Exit status: 0 success, 2 when a checked invariant fails. Errors from the
/// library propagate as exceptions.
int run(const RunConfig& cfg, std::ostream& out);

/// Full command-line entry point: parses, runs and reports errors on `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qlpde
