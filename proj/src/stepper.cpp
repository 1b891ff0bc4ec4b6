#include "qlpde/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "qlpde/parallel.hpp"

namespace qlpde {

namespace {

constexpr int kMaxComponents = 64;

double clamp_tol(const Interval& e) {
    return kClampTolerance * std::max({1.0, std::abs(e.lo), std::abs(e.hi), e.width()});
}

void check_inside(const std::vector<Interval>& ext, std::span<const double> p, const char* what, int k) {
    for (std::size_t l = 0; l < ext.size(); ++l) {
        if (!ext[l].contains(p[l], clamp_tol(ext[l]))) {
            std::ostringstream os;
            os << what << " " << format_point(p) << " lies outside layer " << k - 1 << " on axis " << l + 1 << " ["
               << ext[l].lo << ", " << ext[l].hi << "]; the declared C bounds do not hold";
            throw GeometryError(os.str());
        }
    }
}

double nu(const StandardDomain& d, int l) { return 0.5 * (d.m_C[l] + d.M_C[l]); }

void check_sizes(const ProblemSpec& spec) {
    if (spec.n * std::max(1, spec.m - 1) > kMaxComponents || spec.m > Lattice::kMaxAxes + 1)
        throw ConfigError("problem dimensions exceed the stepper's fixed buffers");
}

}  // namespace

Lattice make_layer(const StandardDomain& d, int N, int k, int nodes_per_axis, int components) {
    return Lattice(hyperplane(d, N, k).extents, nodes_per_axis, components);
}

Lattice sample_initial_layer(const ProblemSpec& spec, const StandardDomain& d, int nodes_per_axis) {
    if (nodes_per_axis < 2) throw ConfigError("nodes per axis must be at least 2");
    Lattice L = make_layer(d, 0, 0, nodes_per_axis, spec.n);
    std::vector<double> u(d.lateral());
    for (std::size_t j = 0; j < L.node_count(); ++j) {
        L.node_point(j, u);
        eval_I(spec, u, L.at(j));
    }
    return L;
}

Lattice step_layer(const ProblemSpec& spec, const StandardDomain& d, int N, int k, const Lattice& prev,
                   ExecPolicy policy) {
    check_sizes(spec);
    const int n = spec.n;
    const int lat = d.lateral();
    const int m = d.m();
    const double h = d.step(N);
    const double sg = d.sign();
    Lattice next = make_layer(d, N, k, prev.nodes_per_axis(), n);
    const double xm_prev = d.plane_coordinate(N, k - 1);
    const std::vector<Interval>& ext = prev.extents();
    double shift[Lattice::kMaxAxes];
    for (int l = 0; l < lat; ++l) shift[l] = sg * nu(d, l) * h;

    for_each_index(next.node_count(), policy, [&](std::size_t j) {
        double x[Lattice::kMaxAxes + 1];
        double xnu[Lattice::kMaxAxes + 1];
        double z[Lattice::kMaxAxes];
        double w[kMaxComponents];
        double C[kMaxComponents];
        double D[kMaxComponents];
        next.node_point(j, std::span<double>(x, lat));
        for (int l = 0; l < lat; ++l) xnu[l] = x[l] - shift[l];
        xnu[lat] = xm_prev;
        const std::span<const double> xnu_s(xnu, m);
        check_inside(ext, xnu_s, "shifted point", k);
        prev.interpolate(xnu_s, std::span<double>(w, n));
        const std::span<const double> w_s(w, n);
        eval_C(spec, xnu_s, w_s, std::span<double>(C, n * lat));
        eval_D(spec, xnu_s, w_s, std::span<double>(D, n));
        auto out = next.at(j);
        for (int i = 0; i < n; ++i) {
            for (int l = 0; l < lat; ++l) z[l] = x[l] - sg * C[i * lat + l] * h;
            check_inside(ext, std::span<const double>(z, lat), "foot point", k);
            out[i] = prev.interpolate(std::span<const double>(z, lat), i) + sg * D[i] * h;
        }
    });
    return next;
}

Lattice step_layer_reference(const ProblemSpec& spec, const StandardDomain& d, int N, int k, const Lattice& prev) {
    const int n = spec.n;
    const int lat = d.lateral();
    const double h = d.step(N);
    const double sg = d.sign();
    Lattice next = make_layer(d, N, k, prev.nodes_per_axis(), n);
    for (std::size_t j = 0; j < next.node_count(); ++j) {
        std::vector<double> x(lat);
        next.node_point(j, x);
        std::vector<double> xnu(lat + 1);
        for (int l = 0; l < lat; ++l) xnu[l] = x[l] - sg * nu(d, l) * h;
        xnu[lat] = d.plane_coordinate(N, k - 1);
        check_inside(prev.extents(), xnu, "shifted point", k);
        std::vector<double> w(n), C(n * lat), D(n);
        prev.interpolate(xnu, w);
        eval_C(spec, xnu, w, C);
        eval_D(spec, xnu, w, D);
        for (int i = 0; i < n; ++i) {
            std::vector<double> z(lat);
            for (int l = 0; l < lat; ++l) z[l] = x[l] - sg * C[i * lat + l] * h;
            check_inside(prev.extents(), z, "foot point", k);
            next.at(j)[i] = prev.interpolate(z, i) + sg * D[i] * h;
        }
    }
    return next;
}

GridSolution solve(const ProblemSpec& spec, double alpha, int N, int nodes_per_axis, Direction direction,
                   ExecPolicy policy) {
    if (N < 0 || N > 20) throw ConfigError("N must lie in 0..20");
    GridSolution sol;
    sol.domain = build_domain(spec, alpha, direction);
    sol.N = N;
    sol.nodes_per_axis = nodes_per_axis;
    sol.n = spec.n;
    sol.layers.reserve(sol.steps() + 1);
    sol.layers.push_back(sample_initial_layer(spec, sol.domain, nodes_per_axis));
    for (int k = 1; k <= sol.steps(); ++k)
        sol.layers.push_back(step_layer(spec, sol.domain, N, k, sol.layers.back(), policy));
    const double tol = 1e-9 * std::max(1.0, spec.b());
    for (const auto& L : sol.layers) {
        for (std::size_t j = 0; j < L.node_count(); ++j) {
            if (!spec.P2.contains(L.at(j), tol)) ++sol.range_violations;
        }
    }
    if (sol.range_violations)
        sol.warnings.push_back(std::to_string(sol.range_violations) + " stored values lie outside P2");
    return sol;
}

std::vector<double> evaluate_solution(const GridSolution& sol, std::span<const double> x) {
    const StandardDomain& d = sol.domain;
    const int lat = d.lateral();
    const double s = d.sign() * (x[lat] - d.x0[lat]);
    const double tol = 1e-12 * std::max(1.0, d.alpha);
    if (s < -tol || s > d.alpha + tol) throw GeometryError("query point " + format_point(x) + " is outside the domain");
    const double sc = std::clamp(s, 0.0, d.alpha);
    const auto cs = d.cross_section(sc);
    for (int l = 0; l < lat; ++l)
        if (!cs[l].contains(x[l], clamp_tol(cs[l])))
            throw GeometryError("query point " + format_point(x) + " is outside the domain");
    const double kf = sc / sol.step();
    int k0 = static_cast<int>(std::floor(kf));
    k0 = std::clamp(k0, 0, std::max(0, sol.steps() - 1));
    const double t = std::clamp(kf - k0, 0.0, 1.0);
    std::vector<double> a(sol.n), b(sol.n);
    const std::span<const double> xl = x.subspan(0, lat);
    sol.layers[k0].interpolate(xl, a);
    if (t == 0.0 || sol.steps() == 0) return a;
    sol.layers[k0 + 1].interpolate(xl, b);
    for (int i = 0; i < sol.n; ++i) a[i] = (1.0 - t) * a[i] + t * b[i];
    return a;
}

int default_node_schedule(int N) { return std::max(1 << (N + 2), 32) + 1; }

double fit_order(std::span<const int> x, std::span<const double> y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(y[j] > 0.0)) continue;
        const double ly = -std::log2(y[j]);
        sx += x[j];
        sy += ly;
        sxx += static_cast<double>(x[j]) * x[j];
        sxy += x[j] * ly;
        ++cnt;
    }
    if (cnt < 2) return 0.0;
    const double den = cnt * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (cnt * sxy - sx * sy) / den;
}

ConvergenceReport refine_and_compare(const ProblemSpec& spec, double alpha, int N_lo, int N_hi,
                                     const NodeSchedule& nodes, Direction direction, const ExactFn* exact,
                                     ExecPolicy policy) {
    if (N_hi < N_lo) throw ConfigError("empty N range");
    ConvergenceReport rep;
    rep.has_exact = exact != nullptr;
    GridSolution prev;
    bool have_prev = false;
    const int m = spec.m;
    std::vector<double> x(m), ex(spec.n), other(spec.n);
    for (int N = N_lo; N <= N_hi; ++N) {
        const auto t0 = std::chrono::steady_clock::now();
        GridSolution sol = solve(spec, alpha, N, nodes(N), direction, policy);
        RefinementRow row;
        row.N = N;
        row.nodes = sol.nodes_per_axis;
        const Lattice& fin = sol.layers.back();
        for (std::size_t j = 0; j < fin.node_count(); ++j) {
            fin.node_point(j, std::span<double>(x.data(), m - 1));
            x[m - 1] = sol.domain.plane_coordinate(N, sol.steps());
            auto v = fin.at(j);
            if (exact) {
                (*exact)(x, ex);
                for (int i = 0; i < spec.n; ++i) row.error_exact = std::max(row.error_exact, std::abs(v[i] - ex[i]));
            }
            if (have_prev) {
                prev.layers.back().interpolate(std::span<const double>(x.data(), m - 1), other);
                for (int i = 0; i < spec.n; ++i) row.diff_prev = std::max(row.diff_prev, std::abs(v[i] - other[i]));
            }
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.rows.push_back(row);
        prev = std::move(sol);
        have_prev = true;
    }
    std::vector<int> Ns;
    std::vector<double> errs, diffs;
    std::vector<int> Nd;
    bool tiny = true;
    for (const auto& r : rep.rows) {
        Ns.push_back(r.N);
        errs.push_back(r.error_exact);
        if (r.N > N_lo) {
            Nd.push_back(r.N);
            diffs.push_back(r.diff_prev);
            if (r.diff_prev > 1e-12) tiny = false;
        }
        if (exact && r.error_exact > 1e-12) tiny = false;
    }
    rep.exact_class = tiny;
    if (exact) rep.order_exact = fit_order(Ns, errs);
    rep.order_diff = fit_order(Nd, diffs);
    return rep;
}

ResidualReport residual_check(const ProblemSpec& spec, const GridSolution& sol, int stencil_width) {
    if (stencil_width < 1) throw ConfigError("stencil width must be at least 1");
    const StandardDomain& d = sol.domain;
    const int n = spec.n, lat = d.lateral(), m = d.m();
    const double h = sol.step();
    const double sg = d.sign();
    ResidualReport rep;
    std::vector<double> x(m), xp(lat), xm(lat), f(n), up(n), dn(n), fp(n), fm(n), C(n * lat), D(n);
    for (int k = 1; k < sol.steps(); ++k) {
        const Lattice& L = sol.layers[k];
        const auto& e_prev = sol.layers[k - 1].extents();
        const auto& e_next = sol.layers[k + 1].extents();
        std::vector<int> multi(lat);
        for (std::size_t j = 0; j < L.node_count(); ++j) {
            L.node_index(j, multi);
            bool interior = true;
            for (int l = 0; l < lat; ++l) {
                if (multi[l] < stencil_width || multi[l] >= L.nodes_per_axis() - stencil_width) interior = false;
            }
            if (!interior) continue;
            L.node_point(j, std::span<double>(x.data(), lat));
            for (int l = 0; l < lat; ++l)
                if (!e_prev[l].contains(x[l]) || !e_next[l].contains(x[l])) interior = false;
            if (!interior) continue;
            x[lat] = d.plane_coordinate(sol.N, k);
            const std::span<const double> xl(x.data(), lat);
            L.interpolate(xl, f);
            sol.layers[k + 1].interpolate(xl, up);
            sol.layers[k - 1].interpolate(xl, dn);
            eval_C(spec, x, f, C);
            eval_D(spec, x, f, D);
            std::vector<double> r(n);
            // x_m(k+1) - x_m(k-1) = 2 sg h
            for (int i = 0; i < n; ++i) r[i] = (up[i] - dn[i]) / (2.0 * sg * h) - D[i];
            for (int l = 0; l < lat; ++l) {
                const double dx = stencil_width * L.spacing(l);
                if (dx <= 0.0) continue;
                std::copy(x.begin(), x.begin() + lat, xp.begin());
                std::copy(x.begin(), x.begin() + lat, xm.begin());
                xp[l] += dx;
                xm[l] -= dx;
                L.interpolate(xp, fp);
                L.interpolate(xm, fm);
                for (int i = 0; i < n; ++i) r[i] += C[i * lat + l] * (fp[i] - fm[i]) / (2.0 * dx);
            }
            for (int i = 0; i < n; ++i) rep.max_residual = std::max(rep.max_residual, std::abs(r[i]));
            ++rep.points;
        }
    }
    return rep;
}

double layer_lipschitz(const GridSolution& sol, int k) {
    double L = 0.0;
    for (int c = 0; c < sol.n; ++c) L = std::max(L, sol.layers[k].lipschitz_estimate(c));
    return L;
}

}  // namespace qlpde
