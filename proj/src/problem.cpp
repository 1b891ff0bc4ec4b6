#include "qlpde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qlpde {

std::vector<Interval> BoxDomain::extents() const {
    std::vector<Interval> out(dim());
    for (std::size_t j = 0; j < dim(); ++j) out[j] = axis(j);
    return out;
}

bool BoxDomain::contains(std::span<const double> p, double tol) const {
    for (std::size_t j = 0; j < dim(); ++j)
        if (std::abs(p[j] - center[j]) > half_widths[j] + tol) return false;
    return true;
}

double BoxDomain::min_half_width() const {
    double h = kUnbounded;
    for (double w : half_widths) h = std::min(h, w);
    return h;
}

BoxDomain BoxDomain::uniform(std::vector<double> center, double half_width) {
    BoxDomain b;
    b.half_widths.assign(center.size(), half_width);
    b.center = std::move(center);
    return b;
}

void check_bundle(const ConstantBundle& c) {
    if (c.m < 2 || c.n < 1) throw ConfigError("constants need m >= 2 and n >= 1");
    if (static_cast<int>(c.M_C.size()) != c.m - 1 || static_cast<int>(c.m_C.size()) != c.m - 1)
        throw ConfigError("M_C and m_C need m-1 entries");
    if (c.L_C < 0 || c.L_D < 0 || c.M_norm_D < 0 || c.M_norm_C < 0)
        throw ConfigError("Lipschitz constants and norm bounds must be nonnegative");
    for (int l = 0; l < c.m - 1; ++l) {
        if (c.m_C[l] > c.M_C[l]) throw ConfigError("m_C exceeds M_C on axis " + std::to_string(l + 1));
        if (c.M_norm_C < std::max(std::abs(c.m_C[l]), std::abs(c.M_C[l])) * (1 - 1e-15))
            throw ConfigError("M_norm_C is smaller than the componentwise C bounds");
    }
}

std::vector<Interval> ProblemSpec::initial_extents() const {
    std::vector<Interval> v(m - 1);
    for (int l = 0; l < m - 1; ++l) v[l] = {P1.center[l] - a_bar, P1.center[l] + a_bar};
    return v;
}

namespace {

void require_finite(std::span<const double> out, const char* what, std::span<const double> x,
                    std::span<const double> y) {
    if (all_finite(out)) return;
    std::ostringstream os;
    os << what << " evaluator returned a non-finite value at x=" << format_point(x);
    if (!y.empty()) os << " y=" << format_point(y);
    throw EvaluationError(os.str());
}

using PointFn = std::function<void(std::span<const double>, std::span<double>)>;

struct FieldStats {
    std::vector<double> lo;
    std::vector<double> hi;
    double max_abs = 0.0;
    double lipschitz = 0.0;
    std::size_t points = 0;
    bool full_grid = true;
};

void absorb(FieldStats& s, std::span<const double> v) {
    for (std::size_t c = 0; c < v.size(); ++c) {
        s.lo[c] = std::min(s.lo[c], v[c]);
        s.hi[c] = std::max(s.hi[c], v[c]);
        s.max_abs = std::max(s.max_abs, std::abs(v[c]));
    }
}

double quotient(std::span<const double> a, std::span<const double> b, double dist) {
    if (dist <= 0.0) return 0.0;
    double q = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) q = std::max(q, std::abs(a[c] - b[c]) / dist);
    return q;
}

// Grid extrema plus neighbour difference quotients. Degenerate axes get a
// single sample. Falls back to seeded random points and random short pairs
// when the grid would exceed opts.max_points.
FieldStats sample_field(const std::vector<Interval>& box, int comps, const SamplingOptions& opts,
                        const PointFn& f) {
    const int d = static_cast<int>(box.size());
    FieldStats s;
    s.lo.assign(comps, kUnbounded);
    s.hi.assign(comps, -kUnbounded);
    std::vector<int> per_axis(d);
    double total = 1.0;
    for (int a = 0; a < d; ++a) {
        per_axis[a] = box[a].width() > 0.0 ? opts.samples_per_axis : 1;
        total *= per_axis[a];
    }
    auto coord = [&](int a, int j) {
        if (per_axis[a] == 1) return box[a].lo;
        if (j == per_axis[a] - 1) return box[a].hi;
        return box[a].lo + j * box[a].width() / (per_axis[a] - 1);
    };

    if (total <= static_cast<double>(opts.max_points)) {
        const auto count = static_cast<std::size_t>(total);
        std::vector<std::size_t> stride(d, 1);
        for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * per_axis[a + 1];
        std::vector<double> values(count * comps);
        std::vector<double> p(d);
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::size_t rem = idx;
            for (int a = 0; a < d; ++a) {
                p[a] = coord(a, static_cast<int>(rem / stride[a]));
                rem %= stride[a];
            }
            std::span<double> out(values.data() + idx * comps, comps);
            f(p, out);
            absorb(s, out);
        }
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::size_t rem = idx;
            for (int a = 0; a < d; ++a) {
                const int j = static_cast<int>(rem / stride[a]);
                rem %= stride[a];
                if (j + 1 >= per_axis[a]) continue;
                const double dist = coord(a, j + 1) - coord(a, j);
                s.lipschitz = std::max(
                    s.lipschitz, quotient({values.data() + idx * comps, static_cast<std::size_t>(comps)},
                                          {values.data() + (idx + stride[a]) * comps, static_cast<std::size_t>(comps)},
                                          dist));
            }
        }
        s.points = count;
        return s;
    }

    s.full_grid = false;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick_axis(0, d - 1);
    std::vector<double> p(d), q(d), fp(comps), fq(comps);
    const std::size_t pairs = opts.max_points / 2;
    for (std::size_t t = 0; t < pairs; ++t) {
        for (int a = 0; a < d; ++a) p[a] = box[a].lo + unit(rng) * box[a].width();
        q = p;
        const int a = pick_axis(rng);
        const double step = box[a].width() / std::max(1, opts.samples_per_axis - 1);
        q[a] = p[a] + step <= box[a].hi ? p[a] + step : p[a] - step;
        f(p, fp);
        f(q, fq);
        absorb(s, fp);
        absorb(s, fq);
        s.lipschitz = std::max(s.lipschitz, quotient(fp, fq, std::abs(q[a] - p[a])));
    }
    // Box corners carry the extrema of monotone fields.
    if (d <= 16) {
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            for (int a = 0; a < d; ++a) p[a] = (mask >> a) & 1u ? box[a].hi : box[a].lo;
            f(p, fp);
            absorb(s, fp);
        }
    }
    s.points = 2 * pairs;
    return s;
}

std::vector<Interval> product_box(const ProblemSpec& spec) {
    auto box = spec.P1.extents();
    auto y = spec.P2.extents();
    box.insert(box.end(), y.begin(), y.end());
    return box;
}

PointFn split_xy(const ProblemSpec& spec, const FieldFn& g, const char* what) {
    const int m = spec.m;
    return [&g, m, what](std::span<const double> p, std::span<double> out) {
        auto x = p.subspan(0, m);
        auto y = p.subspan(m);
        g(x, y, out);
        require_finite(out, what, x, y);
    };
}

FieldStats sample_initial(const ProblemSpec& spec, const SamplingOptions& opts) {
    return sample_field(spec.initial_extents(), spec.n, opts,
                        [&spec](std::span<const double> u, std::span<double> out) { eval_I(spec, u, out); });
}

double deviation_from(const ProblemSpec& spec, const FieldStats& s) {
    double dev = 0.0;
    for (int i = 0; i < spec.n; ++i)
        dev = std::max({dev, std::abs(s.hi[i] - spec.P2.center[i]), std::abs(s.lo[i] - spec.P2.center[i])});
    return dev;
}

bool dominated(double sampled, double declared) {
    return sampled <= declared + 1e-12 * std::max(1.0, std::abs(declared));
}

}  // namespace

void eval_C(const ProblemSpec& spec, std::span<const double> x, std::span<const double> y, std::span<double> out) {
    spec.coeffs.C(x, y, out);
    require_finite(out, "C", x, y);
}

void eval_D(const ProblemSpec& spec, std::span<const double> x, std::span<const double> y, std::span<double> out) {
    spec.coeffs.D(x, y, out);
    require_finite(out, "D", x, y);
}

void eval_I(const ProblemSpec& spec, std::span<const double> u, std::span<double> out) {
    spec.init.I(u, out);
    require_finite(out, "initial condition", u, {});
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

double initial_deviation(const ProblemSpec& spec, int samples_per_axis) {
    SamplingOptions opts;
    opts.samples_per_axis = samples_per_axis;
    return deviation_from(spec, sample_initial(spec, opts));
}

ValidationReport validate_problem(const ProblemSpec& spec, int samples_per_axis) {
    SamplingOptions opts;
    opts.samples_per_axis = samples_per_axis;
    return validate_problem(spec, opts);
}

ValidationReport validate_problem(const ProblemSpec& spec, const SamplingOptions& opts) {
    if (opts.samples_per_axis < 2) throw ConfigError("validation needs at least 2 samples per axis");
    const ConstantBundle& k = spec.constants;
    check_bundle(k);
    ValidationReport rep;

    const FieldStats init = sample_initial(spec, opts);
    rep.M_I = deviation_from(spec, init);
    rep.checks.push_back({"initial range M_I < b", rep.M_I < spec.b(), spec.b(), rep.M_I});
    rep.checks.push_back({"initial Lipschitz <= L_I", dominated(init.lipschitz, spec.init.L_I), spec.init.L_I,
                          init.lipschitz});

    const auto box = product_box(spec);
    const FieldStats C = sample_field(box, spec.n * (spec.m - 1), opts, split_xy(spec, spec.coeffs.C, "C"));
    const FieldStats D = sample_field(box, spec.n, opts, split_xy(spec, spec.coeffs.D, "D"));
    rep.points = C.points;
    rep.full_grid = C.full_grid && D.full_grid && init.full_grid;

    for (int l = 0; l < spec.m - 1; ++l) {
        double hi = -kUnbounded, lo = kUnbounded;
        for (int i = 0; i < spec.n; ++i) {
            hi = std::max(hi, C.hi[i * (spec.m - 1) + l]);
            lo = std::min(lo, C.lo[i * (spec.m - 1) + l]);
        }
        const std::string axis = std::to_string(l + 1);
        rep.checks.push_back({"C_l <= M_C[" + axis + "]", dominated(hi, k.M_C[l]), k.M_C[l], hi});
        rep.checks.push_back({"C_l >= m_C[" + axis + "]", dominated(-lo, -k.m_C[l]), k.m_C[l], lo});
    }
    rep.checks.push_back({"|C| <= M_norm_C", dominated(C.max_abs, k.M_norm_C), k.M_norm_C, C.max_abs});
    rep.checks.push_back({"|D| <= M_norm_D", dominated(D.max_abs, k.M_norm_D), k.M_norm_D, D.max_abs});
    rep.checks.push_back({"C Lipschitz <= L_C", dominated(C.lipschitz, k.L_C), k.L_C, C.lipschitz});
    rep.checks.push_back({"D Lipschitz <= L_D", dominated(D.lipschitz, k.L_D), k.L_D, D.lipschitz});
    return rep;
}

ConstantBundle estimate_constants(const ProblemSpec& spec, int samples_per_axis, double safety) {
    SamplingOptions opts;
    opts.samples_per_axis = samples_per_axis;
    return estimate_constants(spec, opts, safety);
}

ConstantBundle estimate_constants(const ProblemSpec& spec, const SamplingOptions& opts, double safety) {
    if (safety < 1.0) throw ConfigError("safety factor for constant estimation must be >= 1");
    if (opts.samples_per_axis < 2) throw ConfigError("estimation needs at least 2 samples per axis");
    const auto box = product_box(spec);
    const FieldStats C = sample_field(box, spec.n * (spec.m - 1), opts, split_xy(spec, spec.coeffs.C, "C"));
    const FieldStats D = sample_field(box, spec.n, opts, split_xy(spec, spec.coeffs.D, "D"));

    ConstantBundle k;
    k.m = spec.m;
    k.n = spec.n;
    k.estimated = true;
    k.L_C = safety * C.lipschitz;
    k.L_D = safety * D.lipschitz;
    k.M_norm_D = safety * D.max_abs;
    k.M_C.resize(spec.m - 1);
    k.m_C.resize(spec.m - 1);
    double cmax = safety * C.max_abs;
    for (int l = 0; l < spec.m - 1; ++l) {
        double hi = -kUnbounded, lo = kUnbounded;
        for (int i = 0; i < spec.n; ++i) {
            hi = std::max(hi, C.hi[i * (spec.m - 1) + l]);
            lo = std::min(lo, C.lo[i * (spec.m - 1) + l]);
        }
        const double mid = 0.5 * (hi + lo);
        const double half = 0.5 * (hi - lo) * safety;
        k.M_C[l] = hi == lo ? hi : mid + half;
        k.m_C[l] = hi == lo ? lo : mid - half;
        cmax = std::max({cmax, std::abs(k.M_C[l]), std::abs(k.m_C[l])});
    }
    k.M_norm_C = cmax;
    return k;
}

double estimate_initial_lipschitz(const ProblemSpec& spec, int samples_per_axis) {
    SamplingOptions opts;
    opts.samples_per_axis = samples_per_axis;
    return sample_initial(spec, opts).lipschitz;
}

}  // namespace qlpde
