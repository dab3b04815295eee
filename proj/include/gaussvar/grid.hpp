#pragma once

// Functions discretized on tensor-product quadrature grids whose weights
// carry the measure itself (Gauss-Legendre panel weights times the measure
// density, folded per axis since both reference measures factor). Every
// modular and norm in this project integrates through these weights, so grid
// sums and ball measures share one integration authority.

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gaussvar/common.hpp"
#include "gaussvar/gauss_measure.hpp"
#include "gaussvar/quadrature.hpp"

namespace gaussvar {

struct GridFunction {
    MeasureHandle measure;
    Box domain{{0.0}, {1.0}};
    std::vector<Point> points;
    std::vector<double> values;
    std::vector<double> weights;
    std::vector<int> shape;  // per-axis node counts for tensor grids, else empty

    int dim() const { return measure.dim; }
    std::size_t size() const { return points.size(); }
};

inline void validate_grid(const GridFunction& f) {
    if (f.points.size() != f.values.size() || f.points.size() != f.weights.size())
        throw std::invalid_argument("grid: points/values/weights lengths differ");
    if (f.points.empty()) throw std::invalid_argument("grid: empty");
    for (const auto& p : f.points)
        if (static_cast<int>(p.size()) != f.measure.dim)
            throw std::invalid_argument("grid: point dimension mismatch");
    for (double w : f.weights)
        if (!(w >= 0.0)) throw std::invalid_argument("grid: negative or NaN weight");
}

namespace detail {

// per-axis nodes and measure-weighted weights on [lo, hi]
inline void axis_rule(const MeasureHandle& mu, double lo, double hi, int count,
                      std::vector<double>& nodes, std::vector<double>& weights) {
    int order, panels;
    if (count % 16 == 0) {
        order = 16;
        panels = count / 16;
    } else if (count <= 128) {
        order = count;
        panels = 1;
    } else {
        throw std::invalid_argument("tensor_grid: per-axis count must be <= 128 or a multiple of 16");
    }
    const QuadNodes& q = gauss_legendre_nodes(order);
    nodes.clear();
    weights.clear();
    const double h = (hi - lo) / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        double a = lo + pnl * h;
        for (int j = 0; j < order; ++j) {
            double x = a + 0.5 * h * (1.0 + q.x[j]);
            double w = 0.5 * h * q.w[j];
            if (mu.kind == MeasureKind::gaussian) w *= std::exp(-x * x) / std::sqrt(M_PI);
            nodes.push_back(x);
            weights.push_back(w);
        }
    }
}

}  // namespace detail

inline GridFunction tensor_grid(const MeasureHandle& mu, const Box& box, int per_axis) {
    if (static_cast<int>(box.lo.size()) != mu.dim)
        throw std::invalid_argument("tensor_grid: box dimension mismatch");
    if (per_axis < 2) throw std::invalid_argument("tensor_grid: per-axis count too small");
    const int d = mu.dim;
    std::vector<std::vector<double>> nodes(d), weights(d);
    for (int a = 0; a < d; ++a)
        detail::axis_rule(mu, box.lo[a], box.hi[a], per_axis, nodes[a], weights[a]);

    GridFunction f;
    f.measure = mu;
    f.domain = box;
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= nodes[a].size();
    f.points.reserve(total);
    f.weights.reserve(total);
    Point x(d);
    std::function<void(int, double)> rec = [&](int axis, double w) {
        if (axis == d) {
            f.points.push_back(x);
            f.weights.push_back(w);
            return;
        }
        for (std::size_t j = 0; j < nodes[axis].size(); ++j) {
            x[axis] = nodes[axis][j];
            rec(axis + 1, w * weights[axis][j]);
        }
    };
    rec(0, 1.0);
    f.values.assign(total, 0.0);
    f.shape.assign(d, static_cast<int>(nodes[0].size()));
    for (int a = 0; a < d; ++a) f.shape[a] = static_cast<int>(nodes[a].size());
    return f;
}

// standard working grid: generous box, per-axis resolution traded against
// the curse of dimension
inline GridFunction default_grid(const MeasureHandle& mu) {
    switch (mu.dim) {
        case 1: return tensor_grid(mu, Box::cube(1, 10.0), 1024);
        case 2: return tensor_grid(mu, Box::cube(2, 10.0), 128);
        case 3: return tensor_grid(mu, Box::cube(3, 8.0), 32);
    }
    throw std::invalid_argument("default_grid: dimension must be 1, 2, or 3");
}

template <class F>
void fill(GridFunction& g, F&& fn) {
    for (std::size_t i = 0; i < g.points.size(); ++i) g.values[i] = fn(g.points[i]);
}

inline double total_weight(const GridFunction& g) {
    double s = 0.0;
    for (double w : g.weights) s += w;
    return s;
}

// Multilinear interpolation on a tensor grid, zero outside the domain box.
// The per-axis node arrays are recovered from the lexicographic point layout
// written by tensor_grid.
class GridInterpolator {
  public:
    explicit GridInterpolator(const GridFunction& g) : g_(&g) {
        validate_grid(g);
        if (g.shape.empty() || g.dim() > 2)
            throw std::invalid_argument("GridInterpolator: needs a tensor grid of dimension <= 2");
        const int d = g.dim();
        axes_.resize(d);
        std::size_t stride = g.size();
        for (int a = 0; a < d; ++a) {
            stride /= g.shape[a];
            axes_[a].resize(g.shape[a]);
            for (int j = 0; j < g.shape[a]; ++j) axes_[a][j] = g.points[j * stride][a];
            strides_.push_back(stride);
        }
    }

    double operator()(std::span<const double> y) const {
        const GridFunction& g = *g_;
        if (!g.domain.contains(y)) return 0.0;
        int idx[2] = {0, 0};
        double frac[2] = {0.0, 0.0};
        for (int a = 0; a < g.dim(); ++a) {
            const auto& ax = axes_[a];
            auto it = std::upper_bound(ax.begin(), ax.end(), y[a]);
            int hi = static_cast<int>(it - ax.begin());
            // clamp to the outermost node interval inside the box
            hi = std::max(1, std::min(hi, static_cast<int>(ax.size()) - 1));
            idx[a] = hi - 1;
            frac[a] = (y[a] - ax[hi - 1]) / (ax[hi] - ax[hi - 1]);
            frac[a] = std::max(0.0, std::min(1.0, frac[a]));
        }
        if (g.dim() == 1) {
            double v0 = g.values[idx[0]], v1 = g.values[idx[0] + 1];
            return v0 + frac[0] * (v1 - v0);
        }
        std::size_t s0 = strides_[0];
        auto at = [&](int i, int j) { return g.values[(idx[0] + i) * s0 + idx[1] + j]; };
        double lo = at(0, 0) + frac[1] * (at(0, 1) - at(0, 0));
        double hi = at(1, 0) + frac[1] * (at(1, 1) - at(1, 0));
        return lo + frac[0] * (hi - lo);
    }

  private:
    const GridFunction* g_;
    std::vector<std::vector<double>> axes_;
    std::vector<std::size_t> strides_;
};

}  // namespace gaussvar
