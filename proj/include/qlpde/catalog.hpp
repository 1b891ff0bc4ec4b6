#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qlpde/hyperbolic.hpp"
#include "qlpde/ode_bracket.hpp"
#include "qlpde/problem.hpp"
#include "qlpde/stepper.hpp"

namespace qlpde {

enum class EntryKind { pde, ode, hyperbolic };

const char* to_string(EntryKind k);

struct HyperbolicCase {
    HyperbolicSystem system;
    HyperbolicInit init;
    ReduceOptions reduce;
};

/// Exact ODE solution at time t.
using OdeExactFn = std::function<void(double t, std::span<double> out)>;

struct CatalogEntry {
    std::string name;
    std::string doc;
    EntryKind kind = EntryKind::pde;
    std::function<ProblemSpec()> make_pde;
    std::function<OdeProblem()> make_ode;
    std::function<HyperbolicCase()> make_hyperbolic;
    /// PDE and hyperbolic entries: x is the m-vector (x_m is the evolution
    /// variable), out has the n solution components.
    ExactFn exact;
    OdeExactFn ode_exact;

    bool has_exact() const { return static_cast<bool>(exact) || static_cast<bool>(ode_exact); }
};

const std::vector<CatalogEntry>& catalog();

/// Throws ConfigError for unknown names.
const CatalogEntry& find_entry(const std::string& name);

}  // namespace qlpde
