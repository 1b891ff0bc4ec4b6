#include "qlpde/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "qlpde/parallel.hpp"

namespace qlpde {

namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

struct Unpacked {
    Vector2d x;
    VectorXd y, pb1, pb2;
};

Unpacked unpack(int n, std::span<const double> x, std::span<const double> Y) {
    Unpacked u;
    u.x = Vector2d(x[0], x[1]);
    u.y = Eigen::Map<const VectorXd>(Y.data(), n);
    u.pb1 = Eigen::Map<const VectorXd>(Y.data() + n, n);
    u.pb2 = Eigen::Map<const VectorXd>(Y.data() + 2 * n, n);
    return u;
}

void require_size(const MatrixXd& M, int rows, int cols, const char* what) {
    if (M.rows() != rows || M.cols() != cols)
        throw ConfigError(std::string("hyperbolic evaluator ") + what + " returned the wrong shape");
}

// Total derivative of Lambda along x_r given p_{.r}.
MatrixXd lambda_total(const HyperbolicSystem& s, const Vector2d& x, const VectorXd& y, const VectorXd& p, int r) {
    MatrixXd out = s.dLambda(x, y, r);
    for (int k = 0; k < s.n; ++k) out += s.dLambda(x, y, 2 + k) * p[k];
    return out;
}

VectorXd source_C(const HyperbolicSystem& s, const Vector2d& x, const VectorXd& y, const VectorXd& p_r,
                  const VectorXd& p1, int r) {
    VectorXd out = s.dB(x, y, r) - s.dA(x, y, r) * p1;
    for (int k = 0; k < s.n; ++k) out += p_r[k] * (s.dB(x, y, 2 + k) - s.dA(x, y, 2 + k) * p1);
    return out;
}

void augmented_D(const HyperbolicSystem& s, std::span<const double> x, std::span<const double> Y,
                 std::span<double> out) {
    const int n = s.n;
    const Unpacked u = unpack(n, x, Y);
    const MatrixXd Li = s.Lambda_inv(u.x, u.y);
    const MatrixXd L = s.Lambda(u.x, u.y);
    const VectorXd T = s.T(u.x, u.y);
    const VectorXd p1 = Li * u.pb1;
    const VectorXd p2 = Li * u.pb2;
    const VectorXd dy = p2 + T.cwiseProduct(p1);
    const VectorXd d1 = lambda_total(s, u.x, u.y, p2, 1) * p1 + T.cwiseProduct(lambda_total(s, u.x, u.y, p1, 0) * p1) +
                        L * source_C(s, u.x, u.y, p1, p1, 0);
    const VectorXd d2 = lambda_total(s, u.x, u.y, p2, 1) * p2 + T.cwiseProduct(lambda_total(s, u.x, u.y, p1, 0) * p2) +
                        L * source_C(s, u.x, u.y, p2, p1, 1);
    for (int i = 0; i < n; ++i) {
        out[i] = dy[i];
        out[n + i] = d1[i];
        out[2 * n + i] = d2[i];
    }
}

void augmented_C(const HyperbolicSystem& s, std::span<const double> x, std::span<const double> Y,
                 std::span<double> out) {
    const int n = s.n;
    const Unpacked u = unpack(n, x, Y);
    const VectorXd T = s.T(u.x, u.y);
    for (int j = 0; j < 3 * n; ++j) out[j] = T[j % n];
}

void check_system(const HyperbolicSystem& s) {
    if (s.n < 1) throw ConfigError("hyperbolic system needs n >= 1");
    if (!s.A || !s.B || !s.T || !s.Lambda || !s.Lambda_inv || !s.dA || !s.dB || !s.dLambda)
        throw ConfigError("hyperbolic system " + s.name + " is missing an evaluator");
    if (s.x0.size() != 2) throw ConfigError("hyperbolic system needs a 2-vector x0");
    if (static_cast<int>(s.y0.size()) != s.n) throw ConfigError("hyperbolic system y0 has the wrong length");
    if (!s.p_center.empty() && static_cast<int>(s.p_center.size()) != 2 * s.n)
        throw ConfigError("hyperbolic system p_center must have 2n entries");
    if (!(s.a > 0) || !(s.b > 0) || !(s.a_bar > 0) || s.a_bar > s.a)
        throw ConfigError("hyperbolic system needs 0 < a_bar <= a and b > 0");
}

}  // namespace

EigenCheck check_eigen_relation(const HyperbolicSystem& s, int samples_per_axis) {
    check_system(s);
    const int q = std::max(2, samples_per_axis);
    const int d = 2 + s.n;
    std::vector<Interval> box;
    for (int j = 0; j < 2; ++j) box.push_back({s.x0[j] - s.a, s.x0[j] + s.a});
    for (int i = 0; i < s.n; ++i) box.push_back({s.y0[i] - s.b, s.y0[i] + s.b});
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) total *= q;
    EigenCheck out;
    out.points = total;
    std::vector<int> idx(d);
    for (std::size_t lin = 0; lin < total; ++lin) {
        std::size_t r = lin;
        for (int j = d - 1; j >= 0; --j) {
            idx[j] = static_cast<int>(r % q);
            r /= q;
        }
        auto at = [&](int j) { return box[j].lo + box[j].width() * idx[j] / (q - 1); };
        const Vector2d x(at(0), at(1));
        VectorXd y(s.n);
        for (int i = 0; i < s.n; ++i) y[i] = at(2 + i);
        const MatrixXd A = s.A(x, y);
        const MatrixXd L = s.Lambda(x, y);
        const MatrixXd Li = s.Lambda_inv(x, y);
        const VectorXd T = s.T(x, y);
        require_size(A, s.n, s.n, "A");
        require_size(L, s.n, s.n, "Lambda");
        require_size(Li, s.n, s.n, "Lambda_inv");
        const double det = L.determinant();
        if (!std::isfinite(det) || std::abs(det) < 1e-12) {
            std::vector<double> pt(d);
            for (int j = 0; j < d; ++j) pt[j] = at(j);
            throw GeometryError("eigenvector matrix is singular at " + format_point(pt));
        }
        const MatrixXd rel = L * A - T.asDiagonal() * L;
        const double scale = std::max(1.0, L.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff());
        out.eigen_residual = std::max(out.eigen_residual, rel.cwiseAbs().maxCoeff() / scale);
        out.inverse_residual =
            std::max(out.inverse_residual, (L * Li - MatrixXd::Identity(s.n, s.n)).cwiseAbs().maxCoeff());
        out.worst_det_deviation = std::max(out.worst_det_deviation, std::abs(std::abs(det) - 1.0));
    }
    return out;
}

Reduction reduce(const HyperbolicSystem& sys, const HyperbolicInit& init, const ReduceOptions& opts) {
    check_system(sys);
    if (!init.I || !init.dI) throw ConfigError("hyperbolic initial data needs I and I'");
    const EigenCheck ec = check_eigen_relation(sys, opts.validation_samples);
    if (ec.eigen_residual > 1e-8) throw ConfigError("Lambda A != T Lambda for system " + sys.name);
    if (ec.inverse_residual > 1e-10) throw ConfigError("Lambda_inv is not the inverse of Lambda for system " + sys.name);

    Reduction red;
    red.eigen_residual = ec.eigen_residual;
    red.inverse_residual = ec.inverse_residual;
    red.sample_points = ec.points;
    const int n = sys.n;
    auto s = std::make_shared<HyperbolicSystem>(sys);
    auto in = std::make_shared<HyperbolicInit>(init);

    ProblemSpec& p = red.spec;
    p.name = sys.name;
    p.m = 2;
    p.n = 3 * n;
    p.P1 = BoxDomain::uniform(sys.x0, sys.a);
    std::vector<double> c2(sys.y0);
    if (sys.p_center.empty())
        c2.resize(3 * n, 0.0);
    else
        c2.insert(c2.end(), sys.p_center.begin(), sys.p_center.end());
    p.P2 = BoxDomain::uniform(c2, sys.b);
    p.a_bar = sys.a_bar;
    p.coeffs.C = [s](std::span<const double> x, std::span<const double> y, std::span<double> out) {
        augmented_C(*s, x, y, out);
    };
    p.coeffs.D = [s](std::span<const double> x, std::span<const double> y, std::span<double> out) {
        augmented_D(*s, x, y, out);
    };
    const double x2 = sys.x0[1];
    p.init.I = [s, in, n, x2](std::span<const double> u, std::span<double> out) {
        const Vector2d x(u[0], x2);
        const VectorXd y = in->I(u[0]);
        const VectorXd dy = in->dI(u[0]);
        const MatrixXd L = s->Lambda(x, y);
        const VectorXd pb1 = L * dy;
        const VectorXd pb2 = L * (s->B(x, y) - s->A(x, y) * dy);
        for (int i = 0; i < n; ++i) {
            out[i] = y[i];
            out[n + i] = pb1[i];
            out[2 * n + i] = pb2[i];
        }
    };
    p.init.L_I = opts.safety * estimate_initial_lipschitz(p, 129);

    SamplingOptions so;
    so.samples_per_axis = opts.samples_per_axis;
    p.constants = estimate_constants(p, so, opts.safety);
    if (sys.has_speed_bounds) {
        p.constants.M_C = {sys.speed_max};
        p.constants.m_C = {sys.speed_min};
        p.constants.M_norm_C =
            std::max(p.constants.M_norm_C, std::max(std::abs(sys.speed_max), std::abs(sys.speed_min)));
    }
    if (ec.worst_det_deviation > 1e-8) red.warnings.push_back("det Lambda deviates from +-1 on P");
    return red;
}

AugmentedSolution solve_hyperbolic(const HyperbolicSystem& sys, const Reduction& red, double alpha, int N,
                                   int nodes_per_axis, ExecPolicy policy) {
    AugmentedSolution out;
    out.n = sys.n;
    out.grid = solve(red.spec, alpha, N, nodes_per_axis, Direction::plus, policy);
    const int n = sys.n;
    const StandardDomain& d = out.grid.domain;
    for (int k = 0; k <= out.grid.steps(); ++k) {
        const Lattice& L = out.grid.layers[k];
        Lattice q1(L.extents(), L.nodes_per_axis(), n);
        Lattice q2(L.extents(), L.nodes_per_axis(), n);
        const double x2 = d.plane_coordinate(N, k);
        for_each_index(L.node_count(), policy, [&](std::size_t j) {
            double lat[1];
            L.node_point(j, lat);
            const auto Y = L.at(j);
            const Vector2d x(lat[0], x2);
            const VectorXd y = Eigen::Map<const VectorXd>(Y.data(), n);
            const MatrixXd Li = sys.Lambda_inv(x, y);
            const VectorXd p1 = Li * Eigen::Map<const VectorXd>(Y.data() + n, n);
            const VectorXd p2 = Li * Eigen::Map<const VectorXd>(Y.data() + 2 * n, n);
            for (int i = 0; i < n; ++i) {
                q1.at(j)[i] = p1[i];
                q2.at(j)[i] = p2[i];
            }
        });
        out.p1.push_back(std::move(q1));
        out.p2.push_back(std::move(q2));
    }
    return out;
}

GradientReport gradient_consistency(const AugmentedSolution& sol) {
    GradientReport rep;
    const GridSolution& g = sol.grid;
    const int n = sol.n;
    const int K = g.steps();
    std::vector<double> up(g.n), dn(g.n);
    for (int k = 1; k < K; ++k) {
        const Lattice& L = g.layers[k];
        const Lattice& Lu = g.layers[k + 1];
        const Lattice& Ld = g.layers[k - 1];
        const double dx1 = L.spacing(0);
        const double dx2 = g.domain.plane_coordinate(g.N, k + 1) - g.domain.plane_coordinate(g.N, k - 1);
        for (int j = 1; j + 1 < L.nodes_per_axis(); ++j) {
            const double x = L.coord(0, j);
            if (!Lu.extents()[0].contains(x) || !Ld.extents()[0].contains(x)) continue;
            const double pt[1] = {x};
            Lu.interpolate(pt, up);
            Ld.interpolate(pt, dn);
            const auto yl = L.at(j - 1);
            const auto yr = L.at(j + 1);
            for (int i = 0; i < n; ++i) {
                const double fd1 = (yr[i] - yl[i]) / (2.0 * dx1);
                const double fd2 = (up[i] - dn[i]) / dx2;
                rep.dx1 = std::max(rep.dx1, std::abs(fd1 - sol.p1[k].at(j)[i]));
                rep.dx2 = std::max(rep.dx2, std::abs(fd2 - sol.p2[k].at(j)[i]));
            }
            ++rep.points;
        }
    }
    rep.max_discrepancy = std::max(rep.dx1, rep.dx2);
    return rep;
}

}  // namespace qlpde
