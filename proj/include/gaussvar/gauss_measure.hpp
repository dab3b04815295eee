#pragma once

// Gaussian measure machinery for gamma_d(x) = e^{-|x|^2}/pi^{d/2} dx.
//
// Ball measures: gamma_d is rotation invariant, so a ball B(c,r) is measured
// by rotating c onto the first axis and integrating the one-dimensional
// profile
//     gamma_d(B) = pi^{-1/2} int_{l-r}^{l+r} e^{-y^2} T_{d-1}(rho(y)) dy,
// l = |c|, rho(y) = sqrt(r^2 - (y-l)^2), where T_k is the centered k-dim
// Gaussian mass of a radius-rho ball: T_0 = 1, T_1 = erf(rho),
// T_2 = 1 - e^{-rho^2}. Far balls underflow in linear scale around |q| ~ 26
// (q the nearest point to the origin), so the primary interface is the log
// measure, computed against the analytically shifted integrand
// e^{m^2 - y^2} <= 1 with m = max(0, l-r). A plain Monte-Carlo estimator
// covers d > 3 and doubles as an independent cross-check.
//
// Also here: nearest point of a ball to the origin, the three-case lower
// bound shape for gamma_d(B) (small admissible balls, big central balls, big
// far balls), the far-ball refinement with the (r/|q|)^{(d-1)/2} correction,
// hyperbolic balls B(x) = B(x, d min(1, 1/|x|)), their dilates, and an
// admissible covering of a box by recursive dyadic subdivision.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gaussvar/common.hpp"
#include "gaussvar/quadrature.hpp"

namespace gaussvar {

enum class MeasureKind { gaussian, lebesgue };

struct MeasureHandle {
    MeasureKind kind = MeasureKind::gaussian;
    int dim = 1;
};

inline double density(const MeasureHandle& mu, std::span<const double> x) {
    if (static_cast<int>(x.size()) != mu.dim)
        throw std::invalid_argument("density: dimension mismatch");
    if (mu.kind == MeasureKind::lebesgue) return 1.0;
    return std::exp(-norm_sq(x)) * std::pow(M_PI, -0.5 * mu.dim);
}

inline double log_density(const MeasureHandle& mu, std::span<const double> x) {
    if (static_cast<int>(x.size()) != mu.dim)
        throw std::invalid_argument("log_density: dimension mismatch");
    if (mu.kind == MeasureKind::lebesgue) return 0.0;
    return -norm_sq(x) - 0.5 * mu.dim * std::log(M_PI);
}

inline double unit_ball_volume(int d) {
    if (d < 1) throw std::invalid_argument("unit_ball_volume: bad dimension");
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

inline double lebesgue_ball_log_measure(const Ball& b) {
    return std::log(unit_ball_volume(b.dim())) + b.dim() * std::log(b.radius);
}

// Nearest point of the closed ball to the origin (the origin itself if the
// ball contains it).
inline Point nearest_point(const Ball& b) {
    double l = norm(b.center);
    if (l <= b.radius) return Point(b.dim(), 0.0);
    Point q(b.dim());
    double f = 1.0 - b.radius / l;
    for (int i = 0; i < b.dim(); ++i) q[i] = b.center[i] * f;
    return q;
}

namespace detail {

// centered (d-1)-dimensional Gaussian ball mass, normalized to its own
// pi^{(d-1)/2}; closed forms keep the profile integrand one-dimensional
inline double transverse_mass(int d_minus_1, double rho) {
    switch (d_minus_1) {
        case 0: return 1.0;
        case 1: return std::erf(rho);
        case 2: return -std::expm1(-rho * rho);
    }
    throw std::invalid_argument("transverse_mass: quadrature path covers d <= 3");
}

}  // namespace detail

// log gamma_d(B) by rotation-reduced quadrature, valid for d <= 3 and stable
// arbitrarily far out.
inline double gaussian_ball_log_measure(const Ball& b, double rel_tol = 1e-12) {
    const int d = b.dim();
    if (d > 3) throw std::invalid_argument("gaussian_ball_log_measure: use the MC path for d > 3");
    const double l = norm(b.center), r = b.radius;
    const double m = std::max(0.0, l - r);
    // integrate in the polar angle y = l - r cos(theta): the slice width
    // rho = r sin(theta) enters both the transverse mass and the Jacobian, so
    // the square-root cusp of erf(rho(y)) at the edges disappears
    auto f = [&](double th) {
        double y = l - r * std::cos(th);
        double rho = r * std::sin(th);
        return std::exp(m * m - y * y) * detail::transverse_mass(d - 1, rho) * rho;
    };
    // for far balls the mass sits near theta ~ sqrt(2/(r(1+m)))
    int panels = std::max(16, std::min(256, static_cast<int>(4.0 * std::sqrt(r * (1.0 + m)))));
    double inner = adaptive_gauss_legendre(f, 0.0, M_PI, rel_tol, panels);
    if (!(inner > 0.0)) return -inf;
    return -m * m - 0.5 * std::log(M_PI) + std::log(inner);
}

inline double gaussian_ball_measure(const Ball& b, double rel_tol = 1e-12) {
    return std::exp(gaussian_ball_log_measure(b, rel_tol));
}

inline double log_measure_ball(const MeasureHandle& mu, const Ball& b, double rel_tol = 1e-12) {
    if (mu.dim != b.dim()) throw std::invalid_argument("log_measure_ball: dimension mismatch");
    return mu.kind == MeasureKind::gaussian ? gaussian_ball_log_measure(b, rel_tol)
                                            : lebesgue_ball_log_measure(b);
}

inline double measure_ball(const MeasureHandle& mu, const Ball& b, double rel_tol = 1e-12) {
    return std::exp(log_measure_ball(mu, b, rel_tol));
}

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n = 0;
};

// Plain Monte-Carlo with antithetic pairs, any dimension. The indicator is
// evaluated in the rotated frame (center on the first axis), which is exact
// by rotation invariance and spares a matrix draw.
inline McEstimate gaussian_ball_measure_mc(const Ball& b, long n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gaussian_ball_measure_mc: need n >= 2");
    const int d = b.dim();
    const double l = norm(b.center), r2 = b.radius * b.radius;
    Rng rng(seed);
    const double scale = std::sqrt(0.5);  // gamma_d marginals are N(0, 1/2)
    long hits = 0;
    std::vector<double> z(d);
    long pairs = n / 2;
    for (long k = 0; k < pairs; ++k) {
        for (auto& v : z) v = scale * rng.normal();
        for (int sgn : {1, -1}) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                double zi = sgn * z[i] - (i == 0 ? l : 0.0);
                s += zi * zi;
            }
            hits += s <= r2;
        }
    }
    McEstimate out;
    out.n = 2 * pairs;
    double p = static_cast<double>(hits) / out.n;
    out.value = p;
    out.std_error = std::sqrt(std::max(p * (1.0 - p), 1.0 / out.n) / out.n);
    return out;
}

// --- lower bound shapes ---------------------------------------------------

// Three exhaustive regimes for gamma_d(B), B = B(c,r), q the nearest point:
//   1. r <= min(1, 1/|q|)            shape = e^{-|q|^2} |B|
//   2. |q| < 1,  r > 1               shape = 1
//   3. |q| >= 1, r > 1/|q|           shape = e^{-(d+1)|q|^2}
// The measured gamma_d(B) dominates c * shape for a single positive c; tests
// fit c on one sample and validate on a disjoint one.
struct BallLowerBound {
    double log_shape = 0.0;
    int case_tag = 0;
};

inline BallLowerBound gaussian_ball_lower_shape(const Ball& b) {
    const int d = b.dim();
    const double q = norm(nearest_point(b));
    const double r = b.radius;
    BallLowerBound out;
    if (r <= std::min(1.0, q >= 1.0 ? 1.0 / q : 1.0)) {
        out.case_tag = 1;
        out.log_shape = -q * q + lebesgue_ball_log_measure(b);
    } else if (q < 1.0) {
        out.case_tag = 2;
        out.log_shape = 0.0;
    } else {
        out.case_tag = 3;
        out.log_shape = -(d + 1.0) * q * q;
    }
    return out;
}

// Far-ball refinement: for |q| >= 1 and r >= 1/(4|q|),
//   gamma_d(B) >= C (e^{-|q|^2}/|q|) min(1, (r/|q|)^{(d-1)/2}).
inline bool in_far_regime(const Ball& b) {
    double q = norm(nearest_point(b));
    return q >= 1.0 && b.radius >= 1.0 / (4.0 * q);
}

inline double far_ball_lower_log_shape(const Ball& b) {
    if (!in_far_regime(b))
        throw std::domain_error("far_ball_lower_log_shape: ball outside the far regime");
    const double q = norm(nearest_point(b));
    double corr = 0.5 * (b.dim() - 1.0) * std::min(0.0, std::log(b.radius / q));
    return -q * q - std::log(q) + corr;
}

// --- hyperbolic balls and admissible covers -------------------------------

inline double hyperbolic_radius(std::span<const double> x) {
    int d = static_cast<int>(x.size());
    double l = norm(x);
    return d * std::min(1.0, l > 0.0 ? 1.0 / l : 1.0);
}

inline Ball hyperbolic_ball(std::span<const double> x) {
    return Ball(Point(x.begin(), x.end()), hyperbolic_radius(x));
}

// A ball is admissible when its radius does not exceed the hyperbolic radius
// at its center (up to the family scale).
inline bool is_admissible(const Ball& b, double scale = 1.0) {
    return b.radius <= scale * hyperbolic_radius(b.center) * (1.0 + 1e-12);
}

// Dilate of an admissible ball: large enough that the hyperbolic ball of any
// point inside stays covered. sup_{y in B} m(y) is m at the point of B
// nearest the origin.
inline Ball dilate_admissible(const Ball& b) {
    double inner = std::max(0.0, norm(b.center) - b.radius);
    double reach = b.dim() * std::min(1.0, inner > 0.0 ? 1.0 / inner : 1.0);
    return Ball(b.center, b.radius + reach);
}

// Cover the box by admissible balls: subdivide cells dyadically until the
// half-diagonal fits under scale * hyperbolic_radius(center), then emit the
// circumscribed ball of the cell. Cells partition the box, so the balls cover
// it with overlap bounded by the subdivision geometry.
inline std::vector<Ball> admissible_cover(const Box& box, double scale = 1.0, int max_depth = 16) {
    if (!(scale > 0.0)) throw std::invalid_argument("admissible_cover: scale must be positive");
    std::vector<Ball> out;
    const int d = box.dim();
    struct Cell {
        Point lo, hi;
        int depth;
    };
    std::vector<Cell> stack{{box.lo, box.hi, 0}};
    while (!stack.empty()) {
        Cell cell = stack.back();
        stack.pop_back();
        Point c(d);
        double half_diag_sq = 0.0;
        for (int i = 0; i < d; ++i) {
            c[i] = 0.5 * (cell.lo[i] + cell.hi[i]);
            double h = 0.5 * (cell.hi[i] - cell.lo[i]);
            half_diag_sq += h * h;
        }
        double half_diag = std::sqrt(half_diag_sq);
        if (half_diag <= scale * hyperbolic_radius(c) || cell.depth >= max_depth) {
            out.emplace_back(c, half_diag);
            continue;
        }
        // split along every axis
        int parts = 1 << d;
        for (int mask = 0; mask < parts; ++mask) {
            Cell sub;
            sub.depth = cell.depth + 1;
            sub.lo.resize(d);
            sub.hi.resize(d);
            for (int i = 0; i < d; ++i) {
                double mid = 0.5 * (cell.lo[i] + cell.hi[i]);
                if (mask & (1 << i)) {
                    sub.lo[i] = mid;
                    sub.hi[i] = cell.hi[i];
                } else {
                    sub.lo[i] = cell.lo[i];
                    sub.hi[i] = mid;
                }
            }
            stack.push_back(std::move(sub));
        }
    }
    return out;
}

// --- indexed ball families -------------------------------------------------

// A finite indexed family of balls, each paired with a dilate large enough
// that the hyperbolic ball B(x) of any x in the ball stays inside the dilate.
// This is the countable-family input of the maximal operator; serialization
// flattens it to one (center, radius, dilate radius) row per ball.
struct BallFamily {
    std::vector<Ball> balls;
    std::vector<Ball> dilates;  // parallel to balls

    std::size_t size() const { return balls.size(); }
    int dim() const { return balls.empty() ? 0 : balls.front().dim(); }

    bool covers(std::span<const double> x) const {
        for (const auto& b : balls)
            if (b.contains(x)) return true;
        return false;
    }
};

inline BallFamily ball_family(std::vector<Ball> balls) {
    BallFamily fam;
    fam.dilates.reserve(balls.size());
    for (const auto& b : balls) fam.dilates.push_back(dilate_admissible(b));
    fam.balls = std::move(balls);
    return fam;
}

// Admissible cover of the box packaged as an indexed family; depth 0 keeps
// the single circumscribed ball of the whole box.
inline BallFamily admissible_ball_family(const Box& box, int depth) {
    if (depth < 0) throw std::invalid_argument("admissible_ball_family: negative depth");
    return ball_family(admissible_cover(box, 1.0, depth));
}

}  // namespace gaussvar
