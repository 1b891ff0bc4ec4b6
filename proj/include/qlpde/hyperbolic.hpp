#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "qlpde/problem.hpp"
#include "qlpde/stepper.hpp"

namespace qlpde {

using MatFn = std::function<Eigen::MatrixXd(const Eigen::Vector2d& x, const Eigen::VectorXd& y)>;
using VecFn = std::function<Eigen::VectorXd(const Eigen::Vector2d& x, const Eigen::VectorXd& y)>;
/// Partial derivative with respect to variable `var`: 0, 1 for x_1, x_2 and 2 + s for y_s.
using MatDerivFn = std::function<Eigen::MatrixXd(const Eigen::Vector2d& x, const Eigen::VectorXd& y, int var)>;
using VecDerivFn = std::function<Eigen::VectorXd(const Eigen::Vector2d& x, const Eigen::VectorXd& y, int var)>;

/// dy/dx_2 + A(x, y) dy/dx_1 = B(x, y) with left eigenvectors Lambda A = T Lambda.
struct HyperbolicSystem {
    std::string name;
    int n = 1;
    MatFn A;
    VecFn B;
    VecFn T;  // diagonal entries tau^i
    MatFn Lambda;
    MatFn Lambda_inv;
    MatDerivFn dA;
    VecDerivFn dB;
    MatDerivFn dLambda;

    std::vector<double> x0{0.0, 0.0};
    double a = 1.0;      // P1 half width
    double a_bar = 1.0;  // half width of V
    std::vector<double> y0;
    double b = 1.0;  // half width of the augmented P2 box
    /// Centre of the gradient unknowns in the augmented box (3n-vector tail); zero if empty.
    std::vector<double> p_center;
    /// Optional exact bounds on the speeds tau^i over P.
    bool has_speed_bounds = false;
    double speed_max = 0.0;
    double speed_min = 0.0;
};

struct HyperbolicInit {
    std::function<Eigen::VectorXd(double u)> I;
    std::function<Eigen::VectorXd(double u)> dI;
};

struct ReduceOptions {
    int samples_per_axis = 3;
    double safety = 1.5;
    int validation_samples = 3;
};

struct Reduction {
    ProblemSpec spec;  // m = 2, 3n unknowns ordered (y, pbar_1, pbar_2)
    double eigen_residual = 0.0;    // max ||Lambda A - T Lambda||_max over the sample
    double inverse_residual = 0.0;  // max ||Lambda Lambda^-1 - I||_max
    std::size_t sample_points = 0;
    std::vector<std::string> warnings;
};

/// Reduction to the core form. Throws GeometryError when Lambda is singular
/// at a sample point and ConfigError when the eigen relation fails.
Reduction reduce(const HyperbolicSystem& sys, const HyperbolicInit& init, const ReduceOptions& opts = {});

struct AugmentedSolution {
    GridSolution grid;  // 3n components
    int n = 1;
    /// p_r = Lambda^{-1} pbar_r per layer and node, n components each.
    std::vector<Lattice> p1;
    std::vector<Lattice> p2;
};

AugmentedSolution solve_hyperbolic(const HyperbolicSystem& sys, const Reduction& red, double alpha, int N,
                                   int nodes_per_axis, ExecPolicy policy = ExecPolicy::parallel);

struct GradientReport {
    double max_discrepancy = 0.0;  // max of the two below
    double dx1 = 0.0;              // |dy/dx_1 - p_1|
    double dx2 = 0.0;              // |dy/dx_2 - p_2|
    std::size_t points = 0;
};

GradientReport gradient_consistency(const AugmentedSolution& sol);

/// Eigen relation and inverse residuals on a grid over P1 x (y box).
struct EigenCheck {
    double eigen_residual = 0.0;
    double inverse_residual = 0.0;
    double worst_det_deviation = 0.0;
    std::size_t points = 0;
};
EigenCheck check_eigen_relation(const HyperbolicSystem& sys, int samples_per_axis);

}  // namespace qlpde
