#pragma once

#include <span>
#include <vector>

#include "qlpde/problem.hpp"

namespace qlpde {

/// The trapezoidal region S_+ (above V) or S_- (below V). Offsets s below are
/// unsigned distances |x_m - x_0m| in [0, alpha].
struct StandardDomain {
    Direction direction = Direction::plus;
    double alpha = 0.0;
    std::vector<double> x0;  // m entries
    double a_bar = 0.0;
    std::vector<double> M_C;
    std::vector<double> m_C;
    std::vector<Interval> P1_lateral;  // P1 extents in x_1..x_{m-1}

    int m() const { return static_cast<int>(x0.size()); }
    int lateral() const { return m() - 1; }
    double sign() const { return direction_sign(direction); }
    /// Drift bounds in the direction of travel: the l-th lateral coordinate of a
    /// characteristic moves by an amount in [drift_lo*s, drift_hi*s].
    double drift_hi(int l) const { return direction == Direction::plus ? M_C[l] : -m_C[l]; }
    double drift_lo(int l) const { return direction == Direction::plus ? m_C[l] : -M_C[l]; }
    /// Lateral cross-section at offset s, clipped to P1.
    std::vector<Interval> cross_section(double s) const;
    double step(int N) const;
    /// x_m of hyperplane k at refinement N.
    double plane_coordinate(int N, int k) const;
};

struct Hyperplane {
    int N = 0;
    int k = 0;
    double offset = 0.0;  // signed x_m - x_0m
    std::vector<Interval> extents;
};

/// Throws GeometryError if any cross-section on [0, alpha] is empty.
StandardDomain build_domain(const ProblemSpec& spec, double alpha, Direction direction);

Hyperplane hyperplane(const StandardDomain& d, int N, int k);

/// Membership of z (m-vector) in the cone S^{N,k}_x below (plus) or above
/// (minus) the point x (m-vector on V^{N,k}).
bool cone_set_contains(const StandardDomain& d, int N, int k, std::span<const double> x, std::span<const double> z,
                       double tol = 1e-12);

/// Lateral extents of S^{N,k}_x intersected with V^{N,k-1}; x is lateral only.
std::vector<Interval> cone_base_extents(const StandardDomain& d, int N, int k, std::span<const double> x);

struct RestrictedSet {
    std::vector<Interval> extents;
    bool empty = false;
};

/// V^{N,k-1}_{res,i,x} from the local bounds of C_il over P^{N,k}_x.
/// x is lateral only; M_Ci, m_Ci hold m-1 entries.
RestrictedSet restricted_set_extents(const StandardDomain& d, int N, int k, std::span<const double> x,
                                     std::span<const double> M_Ci, std::span<const double> m_Ci);

double lemma31_box_distance(std::span<const Interval> box1, std::span<const Interval> box2);

}  // namespace qlpde
