#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlpde/geometry.hpp"
#include "qlpde/lattice.hpp"
#include "qlpde/problem.hpp"

namespace qlpde {

struct GridSolution {
    StandardDomain domain;
    int N = 0;
    int nodes_per_axis = 0;
    int n = 0;
    std::vector<Lattice> layers;  // k = 0..2^N
    /// Stored values found outside P2 (beyond a small tolerance).
    std::size_t range_violations = 0;
    std::vector<std::string> warnings;

    int steps() const { return 1 << N; }
    double step() const { return domain.step(N); }
};

/// Relative tolerance for points that land just outside a layer's extents.
inline constexpr double kClampTolerance = 1e-9;

/// Lattice over hyperplane k of refinement N.
Lattice make_layer(const StandardDomain& d, int N, int k, int nodes_per_axis, int components);

Lattice sample_initial_layer(const ProblemSpec& spec, const StandardDomain& d, int nodes_per_axis);

/// One step of the characteristic scheme from layer k-1 to layer k.
/// The parallel policy runs the OpenMP kernel; serial runs the same kernel on
/// one thread.
Lattice step_layer(const ProblemSpec& spec, const StandardDomain& d, int N, int k, const Lattice& prev,
                   ExecPolicy policy = ExecPolicy::parallel);

/// Straightforward single-threaded version kept as the reference for the kernel.
Lattice step_layer_reference(const ProblemSpec& spec, const StandardDomain& d, int N, int k, const Lattice& prev);

GridSolution solve(const ProblemSpec& spec, double alpha, int N, int nodes_per_axis, Direction direction,
                   ExecPolicy policy = ExecPolicy::parallel);

/// Multilinear within the two neighbouring layers, linear between them.
std::vector<double> evaluate_solution(const GridSolution& sol, std::span<const double> x);

/// Exact solution, x is an m-vector.
using ExactFn = std::function<void(std::span<const double> x, std::span<double> out)>;
using NodeSchedule = std::function<int(int N)>;

/// max(2^{N+2}, 32) + 1: keeps accumulated interpolation error 2^N dx^2 at O(2^-N).
int default_node_schedule(int N);

struct RefinementRow {
    int N = 0;
    int nodes = 0;
    /// Sup difference against the previous N on this run's final-layer nodes.
    double diff_prev = 0.0;
    /// Sup error against the exact solution on the final layer (if known).
    double error_exact = 0.0;
    double seconds = 0.0;
};

struct ConvergenceReport {
    std::vector<RefinementRow> rows;
    bool has_exact = false;
    /// Least-squares slope of -log2(error) against N.
    double order_exact = 0.0;
    double order_diff = 0.0;
    /// All errors at rounding level.
    bool exact_class = false;
};

/// Least-squares slope of -log2(y) against x; skips nonpositive values.
double fit_order(std::span<const int> x, std::span<const double> y);

ConvergenceReport refine_and_compare(const ProblemSpec& spec, double alpha, int N_lo, int N_hi,
                                     const NodeSchedule& nodes, Direction direction, const ExactFn* exact,
                                     ExecPolicy policy = ExecPolicy::parallel);

struct ResidualReport {
    double max_residual = 0.0;
    std::size_t points = 0;
};

/// Central differences of the discrete solution substituted into the PDE.
ResidualReport residual_check(const ProblemSpec& spec, const GridSolution& sol, int stencil_width = 1);

/// Largest neighbour quotient of any component on layer k.
double layer_lipschitz(const GridSolution& sol, int k);

}  // namespace qlpde
