#pragma once

// One-dimensional quadrature kit:
//   * Gauss-Legendre nodes (Newton on the Legendre recurrence, cached per order)
//   * fixed and adaptive panel integration on [a,b]
//   * tanh-sinh (double-exponential) integration on (0,b] for integrands with
//     an endpoint singularity at 0, with nodes delivered as distance-to-endpoint
//     so factors like s^{-1/2} or log s are evaluated without cancellation
//   * integration over (0,b] in the substitution v = log t, for integrands with
//     an interior peak at unknown tiny scale (semigroup-time integrals)
//   * Gauss-Hermite nodes for integrals against the weight e^{-x^2}
//
// Error control is by interval subdivision (adaptive) or level doubling
// (tanh-sinh) against a relative tolerance; hard caps on depth/level keep the
// routines total. Callers pass plain callables double -> double.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gaussvar/common.hpp"

namespace gaussvar {

struct QuadNodes {
    std::vector<double> x, w;  // nodes and weights on [-1,1] (or as documented)
};

// Gauss-Legendre nodes on [-1,1]. Newton iteration from the Chebyshev guess
// converges to machine precision in < 10 steps for the orders used here.
inline const QuadNodes& gauss_legendre_nodes(int n) {
    if (n < 1 || n > 128) throw std::invalid_argument("gauss_legendre_nodes: order out of range");
    static std::map<int, QuadNodes> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadNodes q;
    q.x.resize(n);
    q.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 64; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        q.w[i] = q.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    auto [pos, ok] = cache.emplace(n, std::move(q));
    (void)ok;
    return pos->second;
}

template <class F>
double fixed_gauss_legendre(F&& f, double a, double b, int order = 15) {
    const QuadNodes& q = gauss_legendre_nodes(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * f(c + h * q.x[i]);
    return s * h;
}

namespace detail {

// panel estimate together with the integral of |f|, which sets the scale of
// the rounding noise the estimate carries when node values cancel
template <class F>
std::pair<double, double> fixed_gl_abs(F& f, double a, double b, int order = 15) {
    const QuadNodes& q = gauss_legendre_nodes(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
        double v = q.w[i] * f(c + h * q.x[i]);
        s += v;
        mag += std::fabs(v);
    }
    return {s * h, mag * h};
}

template <class F>
double adaptive_gl_rec(F& f, double a, double b, double whole, double tol_abs, int depth,
                       long& budget) {
    const double m = 0.5 * (a + b);
    const auto [left, left_abs] = fixed_gl_abs(f, a, m);
    const auto [right, right_abs] = fixed_gl_abs(f, m, b);
    const double err = std::fabs(left + right - whole);
    // a panel whose refinement residual sits at its own rounding noise cannot
    // be improved by splitting further; the shared budget bounds total work
    // when noise keeps the residual from ever meeting the tolerance
    const double noise = 32.0 * std::numeric_limits<double>::epsilon() * (left_abs + right_abs);
    budget -= 2;
    if (err <= tol_abs || err <= noise || depth >= 32 || budget <= 0) return left + right;
    return adaptive_gl_rec(f, a, m, left, 0.5 * tol_abs, depth + 1, budget) +
           adaptive_gl_rec(f, m, b, right, 0.5 * tol_abs, depth + 1, budget);
}

}  // namespace detail

// Adaptive Gauss-Legendre on [a,b]. init_panels > 1 forces an initial uniform
// split so narrow interior features are not missed by the first estimate.
template <class F>
double adaptive_gauss_legendre(F&& f, double a, double b, double rel_tol = 1e-10,
                               int init_panels = 1) {
    if (!(b >= a)) throw std::invalid_argument("adaptive_gauss_legendre: bad interval");
    if (a == b) return 0.0;
    init_panels = std::max(1, init_panels);
    double coarse = 0.0;
    std::vector<double> edges(init_panels + 1), panel(init_panels);
    for (int k = 0; k <= init_panels; ++k) edges[k] = a + (b - a) * k / init_panels;
    for (int k = 0; k < init_panels; ++k) {
        panel[k] = fixed_gauss_legendre(f, edges[k], edges[k + 1]);
        coarse += std::fabs(panel[k]);
    }
    const double tol_abs = rel_tol * std::max(coarse, 1e-300);
    double total = 0.0;
    long budget = 40000;
    for (int k = 0; k < init_panels; ++k)
        total += detail::adaptive_gl_rec(f, edges[k], edges[k + 1], panel[k],
                                         tol_abs / init_panels, 0, budget);
    return total;
}

// tanh-sinh node table for one level: positions stored as distance from each
// endpoint of [-1,1] so the caller can form endpoint offsets exactly.
struct TanhSinhLevel {
    std::vector<double> dist;  // 1 - |abscissa|, in (0,1]
    std::vector<double> w;
    double h;
};

inline const std::vector<TanhSinhLevel>& tanh_sinh_levels() {
    static std::vector<TanhSinhLevel> levels = [] {
        std::vector<TanhSinhLevel> out;
        const int max_level = 10;
        for (int l = 0; l <= max_level; ++l) {
            TanhSinhLevel lev;
            lev.h = 1.0 / static_cast<double>(1 << l);
            // At level 0 take all integer nodes; beyond that only the odd ones
            // (the even ones repeat lower levels).
            for (int k = 0;; ++k) {
                if (l > 0 && (k % 2 == 0)) continue;
                double t = k * lev.h;
                double u = 0.5 * M_PI * std::sinh(t);
                if (u > 350.0) break;  // 1 - tanh(u) below double underflow
                double dist = 2.0 / (std::exp(2.0 * u) + 1.0);  // 1 - tanh(u)
                double w = lev.h * 0.5 * M_PI * std::cosh(t) / std::pow(std::cosh(u), 2);
                if (dist == 0.0 || w < 1e-320) break;
                lev.dist.push_back(dist);
                lev.w.push_back(w);
                if (l == 0 && k > 400) break;
            }
            out.push_back(std::move(lev));
        }
        return out;
    }();
    return levels;
}

// Integral of f over (0,b] where f may blow up (integrably) at 0. The callable
// receives the node location measured from 0, computed without cancellation.
// Level doubling stops when successive estimates agree to rel_tol.
template <class F>
double tanh_sinh_0(F&& f, double b, double rel_tol = 1e-10) {
    if (!(b > 0.0)) throw std::invalid_argument("tanh_sinh_0: upper limit must be positive");
    const auto& levels = tanh_sinh_levels();
    const double half = 0.5 * b;
    double sum = 0.0, prev = 0.0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const auto& lev = levels[l];
        double add = 0.0;
        for (std::size_t i = 0; i < lev.dist.size(); ++i) {
            double d = half * lev.dist[i];           // distance from 0
            double dr = b - d;                       // mirrored node near b
            double g = f(d);
            if (lev.dist[i] < 1.0) g += f(dr);       // center node has no mirror
            add += lev.w[i] * g;
        }
        // Stored weights carry the h of their own level; when the step halves,
        // previously accumulated contributions are reweighted by 1/2.
        sum = (l == 0) ? add : 0.5 * sum + add;
        double estimate = half * sum;
        if (l >= 3 && std::fabs(estimate - prev) <= rel_tol * std::max(std::fabs(estimate), 1e-300))
            return estimate;
        prev = estimate;
    }
    return prev;
}

// Integral of f over [t_min, b] under v = log t, for integrands whose mass sits
// in a narrow band of unknown scale. The v-integrand t*f(t) has O(1) width, so
// uniform initial panels plus adaptivity locate it reliably.
template <class F>
double integrate_log_sub(F&& f, double t_min, double b, double rel_tol = 1e-10) {
    if (!(0.0 < t_min && t_min < b)) throw std::invalid_argument("integrate_log_sub: bad range");
    const double v_lo = std::log(t_min), v_hi = std::log(b);
    auto g = [&](double v) {
        double t = std::exp(v);
        return t * f(t);
    };
    int panels = std::max(8, static_cast<int>(std::ceil((v_hi - v_lo) / 2.0)));
    return adaptive_gauss_legendre(g, v_lo, v_hi, rel_tol, panels);
}

// Gauss-Hermite nodes/weights for \int f(x) e^{-x^2} dx (physicists' weight).
inline const QuadNodes& gauss_hermite_nodes(int n) {
    if (n < 1 || n > 96) throw std::invalid_argument("gauss_hermite_nodes: order out of range");
    static std::map<int, QuadNodes> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadNodes q;
    q.x.resize(n);
    q.w.resize(n);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(n, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * q.x[n - 1];
        else if (i == 3)
            z = 1.91 * z - 0.91 * q.x[n - 2];
        else
            z = 2.0 * z - q.x[n - i + 1];
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        q.x[n - 1 - i] = z;
        q.x[i] = -z;
        q.w[n - 1 - i] = q.w[i] = 2.0 / (pp * pp);
    }
    auto [pos, ok] = cache.emplace(n, std::move(q));
    (void)ok;
    return pos->second;
}

}  // namespace gaussvar
