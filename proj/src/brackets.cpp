#include "qlpde/brackets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlpde/parallel.hpp"

namespace qlpde {

namespace {

struct LayerContext {
    const ProblemSpec* spec = nullptr;
    const StandardDomain* d = nullptr;
    int N = 0;
    int k = 0;
    int q = 0;
    double h = 0.0;
    double xm = 0.0;
    double prev_lipschitz = 0.0;
    const Lattice* lo_prev = nullptr;
    const Lattice* hi_prev = nullptr;
};

struct NodeResult {
    std::vector<double> lo;
    std::vector<double> hi;
    double inflation = 0.0;
};

// Bounds at one node x (lateral coordinates) of layer k.
NodeResult assemble_node(const LayerContext& c, std::span<const double> x) {
    const ProblemSpec& spec = *c.spec;
    const StandardDomain& d = *c.d;
    const ConstantBundle& K = spec.constants;
    const int n = spec.n, lat = d.lateral(), m = d.m(), q = c.q;
    const double h = c.h, sg = d.sign();

    // Extremes of the previous bounds over the cone base.
    const auto base = cone_base_extents(d, c.N, c.k, x);
    std::vector<double> fMV(n), fmV(n);
    for (int i = 0; i < n; ++i) {
        fMV[i] = c.hi_prev->max_over_box(base, i);
        fmV[i] = c.lo_prev->min_over_box(base, i);
    }

    // Sample D and C over P^{N,k}_x: q levels of tau, each with its own cone slice.
    std::vector<Interval> ybox(n);
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
        ybox[i] = {fmV[i] - K.M_norm_D * h, fMV[i] + K.M_norm_D * h};
        r += ybox[i].width() / (2.0 * (q - 1));
    }
    const double dtau = h / (q - 1);
    r += 0.5 * dtau;
    for (int l = 0; l < lat; ++l) {
        const double speed = std::max(std::abs(d.drift_hi(l)), std::abs(d.drift_lo(l)));
        r += speed * 0.5 * dtau + (d.drift_hi(l) - d.drift_lo(l)) * h / (2.0 * (q - 1));
    }

    std::vector<double> Dmax(n, -kUnbounded), Dmin(n, kUnbounded);
    std::vector<double> Cmax(n * lat, -kUnbounded), Cmin(n * lat, kUnbounded);
    std::vector<double> z(m), y(n), Cv(n * lat), Dv(n);
    const double s_k = c.k == (1 << c.N) ? d.alpha : c.k * h;
    std::vector<int> idx(lat + n);
    for (int jt = 0; jt < q; ++jt) {
        const double tau = jt == q - 1 ? h : jt * dtau;
        const auto cs = d.cross_section(std::max(0.0, s_k - tau));
        std::vector<Interval> zbox(lat);
        bool empty = false;
        for (int l = 0; l < lat; ++l) {
            zbox[l].lo = std::max(x[l] - d.drift_hi(l) * tau, cs[l].lo);
            zbox[l].hi = std::min(x[l] - d.drift_lo(l) * tau, cs[l].hi);
            if (zbox[l].empty()) {
                if (zbox[l].lo - zbox[l].hi > 1e-12 * std::max(1.0, std::abs(x[l]))) empty = true;
                zbox[l].lo = zbox[l].hi = 0.5 * (zbox[l].lo + zbox[l].hi);
            }
        }
        if (empty) continue;
        z[lat] = c.xm - sg * tau;
        // Odometer over lateral and y axes; degenerate axes get one sample.
        std::fill(idx.begin(), idx.end(), 0);
        auto axis_count = [&](int a) {
            const Interval& e = a < lat ? zbox[a] : ybox[a - lat];
            return e.width() > 0.0 ? q : 1;
        };
        auto axis_value = [&](int a, int j) {
            const Interval& e = a < lat ? zbox[a] : ybox[a - lat];
            const int cnt = e.width() > 0.0 ? q : 1;
            if (cnt == 1) return e.lo;
            return j == cnt - 1 ? e.hi : e.lo + j * e.width() / (cnt - 1);
        };
        while (true) {
            for (int l = 0; l < lat; ++l) z[l] = axis_value(l, idx[l]);
            for (int i = 0; i < n; ++i) y[i] = axis_value(lat + i, idx[lat + i]);
            eval_C(spec, z, y, Cv);
            eval_D(spec, z, y, Dv);
            for (int i = 0; i < n; ++i) {
                Dmax[i] = std::max(Dmax[i], Dv[i]);
                Dmin[i] = std::min(Dmin[i], Dv[i]);
            }
            for (int j = 0; j < n * lat; ++j) {
                Cmax[j] = std::max(Cmax[j], Cv[j]);
                Cmin[j] = std::min(Cmin[j], Cv[j]);
            }
            int a = lat + n - 1;
            while (a >= 0 && ++idx[a] == axis_count(a)) {
                idx[a] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }

    NodeResult res;
    res.lo.resize(n);
    res.hi.resize(n);
    std::vector<double> MCi(lat), mCi(lat);
    for (int i = 0; i < n; ++i) {
        const double MD = std::min(Dmax[i] + K.L_D * r, K.M_norm_D);
        const double mD = std::max(Dmin[i] - K.L_D * r, -K.M_norm_D);
        for (int l = 0; l < lat; ++l) {
            MCi[l] = std::min(Cmax[i * lat + l] + K.L_C * r, K.M_C[l]);
            mCi[l] = std::max(Cmin[i * lat + l] - K.L_C * r, K.m_C[l]);
        }
        const RestrictedSet R = restricted_set_extents(d, c.N, c.k, x, MCi, mCi);
        if (R.empty) {
            std::ostringstream os;
            os << "restricted set is empty at node " << format_point(x) << " of layer " << c.k << " for component "
               << i + 1 << "; the sampled C extrema contradict the declared bounds";
            throw GeometryError(os.str());
        }
        const double U = c.hi_prev->max_over_box(R.extents, i);
        const double L = c.lo_prev->min_over_box(R.extents, i);
        if (sg > 0) {
            res.hi[i] = U + MD * h;
            res.lo[i] = L + mD * h;
        } else {
            res.hi[i] = U - mD * h;
            res.lo[i] = L - MD * h;
        }
    }
    res.inflation = K.L_D * r * h + (m - 1) * K.L_C * r * h * c.prev_lipschitz;
    return res;
}

double curvature(const Lattice& lo, const Lattice& hi) {
    double v = 0.0;
    for (int c = 0; c < lo.components(); ++c) v = std::max({v, lo.curvature_slack(c), hi.curvature_slack(c)});
    return v;
}

double lattice_lipschitz(const Lattice& L) {
    double v = 0.0;
    for (int c = 0; c < L.components(); ++c) v = std::max(v, L.lipschitz_estimate(c));
    return v;
}

BracketField start_field(const ProblemSpec& spec, const StandardDomain& d, int N, int nodes, int q) {
    if (q < 2) throw ConfigError("extremization needs at least 2 samples per axis");
    if (N < 0 || N > 16) throw ConfigError("certifier N must lie in 0..16");
    BracketField br;
    br.domain = d;
    br.N = N;
    br.nodes_per_axis = nodes;
    br.n = spec.n;
    br.samples = q;
    br.lower.push_back(sample_initial_layer(spec, d, nodes));
    br.upper.push_back(br.lower.front());
    br.inflation.assign(br.steps() + 1, 0.0);
    br.interpolation.assign(br.steps() + 1, 0.0);
    return br;
}

LayerContext context(const ProblemSpec& spec, const StandardDomain& d, const BracketField& br, int k) {
    LayerContext c;
    c.spec = &spec;
    c.d = &d;
    c.N = br.N;
    c.k = k;
    c.q = br.samples;
    c.h = d.step(br.N);
    c.xm = d.plane_coordinate(br.N, k);
    c.lo_prev = &br.lower[k - 1];
    c.hi_prev = &br.upper[k - 1];
    c.prev_lipschitz = std::max(lattice_lipschitz(br.lower[k - 1]), lattice_lipschitz(br.upper[k - 1]));
    return c;
}

}  // namespace

double BracketField::max_gap(int k) const {
    double g = 0.0;
    const auto& lo = lower[k].values();
    const auto& hi = upper[k].values();
    for (std::size_t j = 0; j < lo.size(); ++j) g = std::max(g, hi[j] - lo[j]);
    return g;
}

double BracketField::max_gap() const {
    double g = 0.0;
    for (int k = 0; k <= steps(); ++k) g = std::max(g, max_gap(k));
    return g;
}

double BracketField::cumulative_inflation(int k) const {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += inflation[j];
    return s;
}

double BracketField::cumulative_interpolation(int k) const {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += interpolation[j];
    return s;
}

BracketField compute_brackets(const ProblemSpec& spec, const StandardDomain& d, int N, int nodes, int q,
                              ExecPolicy policy) {
    BracketField br = start_field(spec, d, N, nodes, q);
    const int n = spec.n;
    for (int k = 1; k <= br.steps(); ++k) {
        const LayerContext c = context(spec, d, br, k);
        Lattice lo = make_layer(d, N, k, nodes, n);
        Lattice hi = lo;
        std::vector<double> infl(lo.node_count(), 0.0);
        for_each_index(lo.node_count(), policy, [&](std::size_t j) {
            double x[Lattice::kMaxAxes];
            lo.node_point(j, std::span<double>(x, d.lateral()));
            const NodeResult r = assemble_node(c, std::span<const double>(x, d.lateral()));
            std::copy(r.lo.begin(), r.lo.end(), lo.at(j).begin());
            std::copy(r.hi.begin(), r.hi.end(), hi.at(j).begin());
            infl[j] = r.inflation;
        });
        br.inflation[k] = *std::max_element(infl.begin(), infl.end());
        br.interpolation[k] = curvature(br.lower[k - 1], br.upper[k - 1]);
        br.lower.push_back(std::move(lo));
        br.upper.push_back(std::move(hi));
    }
    return br;
}

BracketField compute_brackets_reference(const ProblemSpec& spec, const StandardDomain& d, int N, int nodes, int q) {
    BracketField br = start_field(spec, d, N, nodes, q);
    for (int k = 1; k <= br.steps(); ++k) {
        Lattice lo = make_layer(d, N, k, nodes, spec.n);
        Lattice hi = lo;
        for (std::size_t j = 0; j < lo.node_count(); ++j) {
            const LayerContext c = context(spec, d, br, k);
            std::vector<double> x(d.lateral());
            lo.node_point(j, x);
            const NodeResult r = assemble_node(c, x);
            for (int i = 0; i < spec.n; ++i) {
                lo.at(j)[i] = r.lo[i];
                hi.at(j)[i] = r.hi[i];
            }
            br.inflation[k] = std::max(br.inflation[k], r.inflation);
        }
        br.interpolation[k] = curvature(br.lower[k - 1], br.upper[k - 1]);
        br.lower.push_back(std::move(lo));
        br.upper.push_back(std::move(hi));
    }
    return br;
}

EnclosureReport verify_enclosure(const BracketField& br, const GridSolution& sol) {
    if (br.N != sol.N || br.nodes_per_axis != sol.nodes_per_axis || br.n != sol.n)
        throw ConfigError("enclosure check needs brackets and solution on the same lattices");
    EnclosureReport rep;
    double scale = 1.0;
    for (const auto& L : sol.layers)
        for (double v : L.values()) scale = std::max(scale, std::abs(v));
    rep.slack = 1e-12 * scale;
    for (int k = 0; k <= br.steps(); ++k) {
        const auto& f = sol.layers[k].values();
        const auto& lo = br.lower[k].values();
        const auto& hi = br.upper[k].values();
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double margin = std::min(f[j] - lo[j], hi[j] - f[j]);
            if (margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_location = "layer " + std::to_string(k) + " entry " + std::to_string(j);
            }
            ++rep.checked;
        }
    }
    rep.passed = rep.worst_margin >= -rep.slack;
    return rep;
}

NestingReport verify_nesting(const BracketField& coarse, const BracketField& fine) {
    if (fine.N != coarse.N + 1 || fine.nodes_per_axis != coarse.nodes_per_axis || fine.n != coarse.n)
        throw ConfigError("nesting check needs fine.N = coarse.N + 1 on the same lattices");
    NestingReport rep;
    for (int k = 0; k <= coarse.steps(); ++k) {
        const double slack =
            coarse.cumulative_inflation(k) + fine.cumulative_inflation(2 * k) + coarse.cumulative_interpolation(k) +
            fine.cumulative_interpolation(2 * k) + 1e-12;
        const auto& clo = coarse.lower[k].values();
        const auto& chi = coarse.upper[k].values();
        const auto& flo = fine.lower[2 * k].values();
        const auto& fhi = fine.upper[2 * k].values();
        for (std::size_t j = 0; j < clo.size(); ++j) {
            const double v = std::max(clo[j] - flo[j], fhi[j] - chi[j]);
            if (v > 0.0) ++rep.violations_beyond_zero;
            if (v > slack) rep.passed = false;
            rep.worst_violation = std::max(rep.worst_violation, v);
            rep.slack = std::max(rep.slack, slack);
            ++rep.checked;
        }
    }
    return rep;
}

GapDecayReport gap_decay(const std::vector<BracketField>& fields, const ProblemSpec& spec) {
    GapDecayReport rep;
    std::vector<int> Ns;
    std::vector<double> gaps;
    for (const auto& br : fields) {
        GapRow row;
        row.N = br.N;
        row.gap = br.max_gap();
        row.inflation = br.cumulative_inflation(br.steps());
        const double alpha = br.domain.alpha;
        if (locality_holds(spec.constants, spec.init.L_I, alpha)) {
            const double Lf = lipschitz_bound_Lf(spec.constants, spec.init.L_I, alpha);
            const C1C2 cc = C1_C2(spec.constants, Lf);
            row.bound = gap_closed_form(br.N, br.steps(), alpha, cc.C1, cc.C2);
        } else {
            row.bound = kUnbounded;
        }
        if (row.gap > row.bound * (1 + 1e-12) + 1e-14) rep.within_bound = false;
        rep.rows.push_back(row);
        Ns.push_back(row.N);
        gaps.push_back(row.gap);
    }
    for (std::size_t j = 1; j < rep.rows.size(); ++j)
        rep.ratios.push_back(rep.rows[j - 1].gap > 0 ? rep.rows[j].gap / rep.rows[j - 1].gap : 0.0);
    rep.order = fit_order(Ns, gaps);
    return rep;
}

double bracket_lipschitz(const BracketField& br, int k) {
    return std::max(lattice_lipschitz(br.lower[k]), lattice_lipschitz(br.upper[k]));
}

}  // namespace qlpde
