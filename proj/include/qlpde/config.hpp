#pragma once

#include <json.hpp>
#include <string>

#include "qlpde/catalog.hpp"
#include "qlpde/polynomial.hpp"

namespace qlpde {

/// A problem resolved from a catalog name or a configuration file.
struct ResolvedProblem {
    EntryKind kind = EntryKind::pde;
    std::string name;
    std::string source;  // "catalog" or the config path
    ProblemSpec pde;
    OdeProblem ode;
    HyperbolicCase hyperbolic;
    ExactFn exact;
    OdeExactFn ode_exact;
    /// Everything that defines the problem, for embedding in reports.
    nlohmann::json description;
};

/// `problem` is a catalog name or a path to a JSON configuration file.
ResolvedProblem resolve_problem(const std::string& problem, int estimate_samples = 9);

/// Parses a configuration document. Throws ConfigError on any malformed field.
ResolvedProblem parse_problem_config(const nlohmann::json& doc, const std::string& source, int estimate_samples = 9);

/// {"coef": c, "pow": [..]} terms of a polynomial in `variables` unknowns.
Polynomial parse_polynomial(const nlohmann::json& terms, int variables);

}  // namespace qlpde
