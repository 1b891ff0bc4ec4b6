#include "qlpde/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace qlpde {

namespace {

// Queries this close to a node (in lattice units) are read from the node.
constexpr double kSnap = 1e-11;

}  // namespace

std::string format_point(std::span<const double> p) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ')';
    return os.str();
}

Lattice::Lattice(std::vector<Interval> extents, int nodes_per_axis, int components)
    : extents_(std::move(extents)), nodes_(nodes_per_axis), components_(components) {
    if (nodes_ < 2) throw GeometryError("lattice needs at least 2 nodes per axis");
    if (axes() > kMaxAxes) throw GeometryError("lattice supports at most 8 axes");
    if (components_ < 1) throw GeometryError("lattice needs at least one component");
    for (const auto& e : extents_)
        if (e.empty()) throw GeometryError("lattice extent is empty");
    strides_.assign(extents_.size(), 1);
    node_count_ = 1;
    for (int a = axes() - 1; a >= 0; --a) {
        strides_[a] = node_count_;
        node_count_ *= static_cast<std::size_t>(nodes_);
    }
    values_.assign(node_count_ * components_, 0.0);
}

double Lattice::spacing(int axis) const { return extents_[axis].width() / (nodes_ - 1); }

double Lattice::coord(int axis, int j) const {
    if (j == nodes_ - 1) return extents_[axis].hi;
    return extents_[axis].lo + j * spacing(axis);
}

void Lattice::node_index(std::size_t linear, std::span<int> multi) const {
    for (int a = 0; a < axes(); ++a) {
        multi[a] = static_cast<int>(linear / strides_[a]);
        linear %= strides_[a];
    }
}

std::size_t Lattice::linear_index(std::span<const int> multi) const {
    std::size_t idx = 0;
    for (int a = 0; a < axes(); ++a) idx += static_cast<std::size_t>(multi[a]) * strides_[a];
    return idx;
}

void Lattice::node_point(std::size_t linear, std::span<double> out) const {
    for (int a = 0; a < axes(); ++a) {
        const int j = static_cast<int>(linear / strides_[a]);
        linear %= strides_[a];
        out[a] = coord(a, j);
    }
}

double Lattice::fractional_index(int axis, double x) const {
    const Interval& e = extents_[axis];
    if (e.width() <= 0.0) return 0.0;
    double t = (x - e.lo) / e.width() * (nodes_ - 1);
    t = std::clamp(t, 0.0, static_cast<double>(nodes_ - 1));
    const double r = std::round(t);
    if (std::abs(t - r) < kSnap) t = r;
    return t;
}

int Lattice::corners(std::span<const double> point, std::size_t* idx, double* weight) const {
    const int d = axes();
    assert(d <= kMaxAxes);
    double frac[kMaxAxes];
    std::size_t base = 0;
    for (int a = 0; a < d; ++a) {
        const double t = fractional_index(a, point[a]);
        int i0 = static_cast<int>(std::floor(t));
        if (i0 > nodes_ - 2) i0 = nodes_ - 2;
        frac[a] = t - i0;
        base += static_cast<std::size_t>(i0) * strides_[a];
    }
    int count = 0;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        double w = 1.0;
        std::size_t at = base;
        for (int a = 0; a < d; ++a) {
            if (mask & (1u << a)) {
                w *= frac[a];
                at += strides_[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        if (w == 0.0) continue;
        idx[count] = at;
        weight[count] = w;
        ++count;
    }
    return count;
}

void Lattice::interpolate(std::span<const double> point, std::span<double> out) const {
    std::size_t idx[1u << kMaxAxes];
    double w[1u << kMaxAxes];
    const int count = corners(point, idx, w);
    for (int c = 0; c < components_; ++c) out[c] = 0.0;
    for (int j = 0; j < count; ++j) {
        const double* v = values_.data() + idx[j] * components_;
        for (int c = 0; c < components_; ++c) out[c] += w[j] * v[c];
    }
}

double Lattice::interpolate(std::span<const double> point, int component) const {
    std::size_t idx[1u << kMaxAxes];
    double w[1u << kMaxAxes];
    const int count = corners(point, idx, w);
    double v = 0.0;
    for (int j = 0; j < count; ++j) v += w[j] * values_[idx[j] * components_ + component];
    return v;
}

template <class Reduce>
double Lattice::reduce_over_box(std::span<const Interval> box, int component, double init, Reduce r) const {
    const int d = axes();
    std::vector<std::vector<double>> cand(d);
    for (int a = 0; a < d; ++a) {
        const Interval& e = extents_[a];
        const double lo = std::clamp(box[a].lo, e.lo, e.hi);
        const double hi = std::clamp(box[a].hi, e.lo, e.hi);
        cand[a].push_back(lo);
        if (hi > lo) {
            for (int j = 0; j < nodes_; ++j) {
                const double c = coord(a, j);
                if (c > lo && c < hi) cand[a].push_back(c);
            }
            cand[a].push_back(hi);
        }
    }
    std::vector<int> idx(d, 0);
    std::vector<double> p(d);
    double acc = init;
    while (true) {
        for (int a = 0; a < d; ++a) p[a] = cand[a][idx[a]];
        acc = r(acc, interpolate(p, component));
        int a = d - 1;
        while (a >= 0 && ++idx[a] == static_cast<int>(cand[a].size())) {
            idx[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return acc;
}

double Lattice::max_over_box(std::span<const Interval> box, int component) const {
    return reduce_over_box(box, component, -kUnbounded, [](double a, double b) { return std::max(a, b); });
}

double Lattice::min_over_box(std::span<const Interval> box, int component) const {
    return reduce_over_box(box, component, kUnbounded, [](double a, double b) { return std::min(a, b); });
}

double Lattice::lipschitz_estimate(int component) const {
    double best = 0.0;
    std::vector<int> multi(axes());
    for (std::size_t n = 0; n < node_count_; ++n) {
        node_index(n, multi);
        for (int a = 0; a < axes(); ++a) {
            const double h = spacing(a);
            if (multi[a] + 1 >= nodes_ || h <= 0.0) continue;
            const double d = values_[(n + strides_[a]) * components_ + component] -
                             values_[n * components_ + component];
            best = std::max(best, std::abs(d) / h);
        }
    }
    return best;
}

double Lattice::curvature_slack(int component) const {
    std::vector<double> worst(axes(), 0.0);
    std::vector<int> multi(axes());
    for (std::size_t n = 0; n < node_count_; ++n) {
        node_index(n, multi);
        for (int a = 0; a < axes(); ++a) {
            if (multi[a] == 0 || multi[a] + 1 >= nodes_) continue;
            const double dd = values_[(n + strides_[a]) * components_ + component] -
                              2.0 * values_[n * components_ + component] +
                              values_[(n - strides_[a]) * components_ + component];
            worst[a] = std::max(worst[a], std::abs(dd));
        }
    }
    double s = 0.0;
    for (double w : worst) s += w / 8.0;
    return s;
}

}  // namespace qlpde
