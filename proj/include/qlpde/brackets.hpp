#pragma once

#include <string>
#include <vector>

#include "qlpde/constants.hpp"
#include "qlpde/geometry.hpp"
#include "qlpde/lattice.hpp"
#include "qlpde/stepper.hpp"

namespace qlpde {

struct BracketField {
    StandardDomain domain;
    int N = 0;
    int nodes_per_axis = 0;
    int n = 0;
    int samples = 0;
    std::vector<Lattice> lower;  // k = 0..2^N
    std::vector<Lattice> upper;
    /// Largest amount the Lipschitz inflation of the D and C extrema added to a
    /// bound on layer k (index 0 is zero).
    std::vector<double> inflation;
    /// Curvature slack of the layer k-1 bound lattices read while building
    /// layer k; covers reconstruction between nodes (index 0 is zero).
    std::vector<double> interpolation;

    int steps() const { return 1 << N; }
    double max_gap(int k) const;
    double max_gap() const;
    /// Sum of per-layer inflation up to and including layer k.
    double cumulative_inflation(int k) const;
    double cumulative_interpolation(int k) const;
};

BracketField compute_brackets(const ProblemSpec& spec, const StandardDomain& d, int N, int nodes_per_axis,
                              int extremization_samples, ExecPolicy policy = ExecPolicy::parallel);

/// Single-threaded, allocation-heavy version kept as the reference for the kernel.
BracketField compute_brackets_reference(const ProblemSpec& spec, const StandardDomain& d, int N, int nodes_per_axis,
                                        int extremization_samples);

struct EnclosureReport {
    bool passed = true;
    /// min over nodes and components of min(f - lower, upper - f); negative means a violation.
    double worst_margin = kUnbounded;
    double slack = 0.0;
    std::size_t checked = 0;
    std::string worst_location;
};

/// Rounding-level slack only: the enclosure holds exactly in exact arithmetic.
EnclosureReport verify_enclosure(const BracketField& br, const GridSolution& sol);

struct NestingReport {
    bool passed = true;
    /// Largest amount by which a fine bound leaves the coarse one.
    double worst_violation = 0.0;
    double slack = 0.0;
    std::size_t checked = 0;
    std::size_t violations_beyond_zero = 0;
};

NestingReport verify_nesting(const BracketField& coarse, const BracketField& fine);

struct GapRow {
    int N = 0;
    double gap = 0.0;
    double bound = 0.0;
    double inflation = 0.0;
};

struct GapDecayReport {
    std::vector<GapRow> rows;
    std::vector<double> ratios;
    double order = 0.0;
    bool within_bound = true;
};

/// Bound uses the closed form with (C1, C2) evaluated at L_f.
GapDecayReport gap_decay(const std::vector<BracketField>& fields, const ProblemSpec& spec);

/// Largest neighbour quotient over both bound lattices on layer k.
double bracket_lipschitz(const BracketField& br, int k);

}  // namespace qlpde
