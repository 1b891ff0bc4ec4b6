#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qlpde/types.hpp"

namespace qlpde {

/// Uniform tensor lattice over an axis-aligned box carrying a fixed number of
/// components per node. Node (j_0, ..., j_{d-1}) sits at
/// lo_l + j_l * (hi_l - lo_l) / (nodes - 1); the last axis varies fastest.
/// Off-node values are reconstructed by multilinear interpolation with the
/// query clamped to the box.
class Lattice {
public:
    static constexpr int kMaxAxes = 8;

    Lattice() = default;
    Lattice(std::vector<Interval> extents, int nodes_per_axis, int components);

    int axes() const { return static_cast<int>(extents_.size()); }
    int nodes_per_axis() const { return nodes_; }
    int components() const { return components_; }
    std::size_t node_count() const { return node_count_; }
    const std::vector<Interval>& extents() const { return extents_; }

    double spacing(int axis) const;
    double coord(int axis, int j) const;
    void node_index(std::size_t linear, std::span<int> multi) const;
    std::size_t linear_index(std::span<const int> multi) const;
    void node_point(std::size_t linear, std::span<double> out) const;

    std::span<double> at(std::size_t linear) {
        return {values_.data() + linear * components_, static_cast<std::size_t>(components_)};
    }
    std::span<const double> at(std::size_t linear) const {
        return {values_.data() + linear * components_, static_cast<std::size_t>(components_)};
    }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Multilinear interpolation of every component at `point`.
    void interpolate(std::span<const double> point, std::span<double> out) const;
    double interpolate(std::span<const double> point, int component) const;

    /// Exact maximum / minimum of the interpolant of one component over a
    /// sub-box. The box is clamped to the lattice extents.
    double max_over_box(std::span<const Interval> box, int component) const;
    double min_over_box(std::span<const Interval> box, int component) const;

    /// Largest neighbour difference quotient of one component along any axis;
    /// this is the 1-norm Lipschitz constant of the interpolant.
    double lipschitz_estimate(int component) const;

    /// Sum over axes of max |second difference| / 8: the usual bound on how far
    /// the interpolant of smooth data can sit from the data between nodes.
    /// Zero on affine data.
    double curvature_slack(int component) const;

    /// Position of `point` in lattice units clamped to [0, nodes-1].
    double fractional_index(int axis, double x) const;

private:
    /// Corner nodes and weights of the cell containing `point`; zero weights dropped.
    int corners(std::span<const double> point, std::size_t* idx, double* weight) const;

    template <class Reduce>
    double reduce_over_box(std::span<const Interval> box, int component, double init, Reduce r) const;

    std::vector<Interval> extents_;
    int nodes_ = 0;
    int components_ = 0;
    std::size_t node_count_ = 0;
    std::vector<std::size_t> strides_;
    std::vector<double> values_;
};

}  // namespace qlpde
