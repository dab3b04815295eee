#pragma once

// Variable exponent functions p : R^d -> [1, infinity).
//
// A spec is one of five closed-form kinds, post-composed with a clip to
// [clip_lo, clip_hi] and optionally with Holder conjugation t -> t/(t-1):
//   constant                      p(x) = value
//   p_inf_plus_inverse_square     p(x) = p_inf + coeff / |x|^2
//   p_inf_plus_inverse_log        p(x) = p_inf + coeff / log(e + |x|)
//   radial_table                  piecewise-linear knots (r_j, p_j), constant
//                                 left of the first knot, and a power tail
//                                 p(r) = p_inf + (p_K - p_inf)(r_K / r)^tail_power
//                                 beyond the last knot r_K
//   step_jump                     p(x) = jump_hi on {n.x >= offset}, jump_lo below
//
// Because every kind is closed-form, the essential sup/inf of p over a ball
// (the oscillation p_B^+, p_B^-) is computed exactly: radial kinds restrict to
// the realized radius interval [max(0,|c|-r), |c|+r] where the profile is
// piecewise monotone, and the jump kind reduces to which side(s) of the
// hyperplane the ball meets. Clipping is monotone and conjugation is
// order-reversing, so both pass through the endpoint evaluation. A sampled
// estimator is provided as an independent cross-check, not as the primary path.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaussvar/common.hpp"

namespace gaussvar {

enum class ExponentKind {
    constant,
    p_inf_plus_inverse_square,
    p_inf_plus_inverse_log,
    radial_table,
    step_jump,
};

inline const char* to_string(ExponentKind k) {
    switch (k) {
        case ExponentKind::constant: return "constant";
        case ExponentKind::p_inf_plus_inverse_square: return "p_inf_plus_inverse_square";
        case ExponentKind::p_inf_plus_inverse_log: return "p_inf_plus_inverse_log";
        case ExponentKind::radial_table: return "radial_table";
        case ExponentKind::step_jump: return "step_jump";
    }
    return "?";
}

struct RadialTable {
    std::vector<double> r;  // strictly increasing knot radii, r.front() >= 0
    std::vector<double> p;  // exponent values at the knots
    double p_inf = 2.0;     // tail limit
    double tail_power = 1.0;
};

struct ExponentSpec {
    ExponentKind kind = ExponentKind::constant;
    int dim = 1;
    double clip_lo = 1.0;
    double clip_hi = 64.0;

    double value = 2.0;                // constant
    double p_inf = 2.0, coeff = 1.0;   // decaying kinds
    RadialTable table;                 // radial_table
    double jump_lo = 2.0, jump_hi = 3.0;
    Point jump_normal;                 // unit vector; defaults to e_1 on validate
    double jump_offset = 0.0;

    bool conjugated = false;
    std::string name;  // registry id carried into reports
};

struct ExponentOscillation {
    double p_minus = 1.0, p_plus = 1.0;
};

inline void validate(const ExponentSpec& s) {
    if (s.dim < 1) throw std::invalid_argument("ExponentSpec: dimension must be >= 1");
    if (!(1.0 <= s.clip_lo && s.clip_lo <= s.clip_hi && s.clip_hi <= 1e6))
        throw std::invalid_argument("ExponentSpec: clip range must satisfy 1 <= lo <= hi < inf");
    switch (s.kind) {
        case ExponentKind::constant:
            if (!(s.value >= 1.0)) throw std::invalid_argument("ExponentSpec: constant value below 1");
            break;
        case ExponentKind::p_inf_plus_inverse_square:
        case ExponentKind::p_inf_plus_inverse_log:
            if (!(s.p_inf >= 1.0)) throw std::invalid_argument("ExponentSpec: p_inf below 1");
            if (!std::isfinite(s.coeff)) throw std::invalid_argument("ExponentSpec: bad coefficient");
            break;
        case ExponentKind::radial_table: {
            const auto& t = s.table;
            if (t.r.empty() || t.r.size() != t.p.size())
                throw std::invalid_argument("ExponentSpec: table needs matching nonempty knots");
            if (t.r.front() < 0.0) throw std::invalid_argument("ExponentSpec: negative knot radius");
            for (std::size_t j = 1; j < t.r.size(); ++j)
                if (!(t.r[j] > t.r[j - 1]))
                    throw std::invalid_argument("ExponentSpec: knot radii must increase");
            for (double v : t.p)
                if (!(v >= 1.0)) throw std::invalid_argument("ExponentSpec: table value below 1");
            if (!(t.p_inf >= 1.0) || !(t.tail_power > 0.0))
                throw std::invalid_argument("ExponentSpec: bad table tail");
            break;
        }
        case ExponentKind::step_jump: {
            if (!(s.jump_lo >= 1.0 && s.jump_hi >= 1.0))
                throw std::invalid_argument("ExponentSpec: jump values below 1");
            if (static_cast<int>(s.jump_normal.size()) != s.dim)
                throw std::invalid_argument("ExponentSpec: jump normal has wrong dimension");
            if (std::fabs(norm(s.jump_normal) - 1.0) > 1e-9)
                throw std::invalid_argument("ExponentSpec: jump normal must be unit length");
            break;
        }
    }
}

inline bool is_radial(const ExponentSpec& s) { return s.kind != ExponentKind::step_jump; }

namespace detail {

inline double clip(const ExponentSpec& s, double v) {
    // +-inf base values (inverse-square at the origin) resolve to the clip ends
    if (v != v) throw std::domain_error("ExponentSpec: NaN exponent value");
    return std::clamp(v, s.clip_lo, s.clip_hi);
}

inline double finalize(const ExponentSpec& s, double base) {
    double v = clip(s, base);
    if (!s.conjugated) return v;
    if (v <= 1.0) throw std::domain_error("ExponentSpec: conjugating an exponent value of 1");
    return conjugate(v);
}

// table profile before clip/conjugation
inline double table_base(const RadialTable& t, double rad) {
    if (rad <= t.r.front()) return t.p.front();
    if (rad >= t.r.back()) {
        double pk = t.p.back();
        return t.p_inf + (pk - t.p_inf) * std::pow(t.r.back() / rad, t.tail_power);
    }
    auto it = std::upper_bound(t.r.begin(), t.r.end(), rad);
    std::size_t j = static_cast<std::size_t>(it - t.r.begin());
    double w = (rad - t.r[j - 1]) / (t.r[j] - t.r[j - 1]);
    return t.p[j - 1] + w * (t.p[j] - t.p[j - 1]);
}

inline double radial_base(const ExponentSpec& s, double rad) {
    switch (s.kind) {
        case ExponentKind::constant: return s.value;
        case ExponentKind::p_inf_plus_inverse_square:
            if (rad == 0.0) return s.coeff > 0 ? inf : (s.coeff < 0 ? -inf : s.p_inf);
            return s.p_inf + s.coeff / (rad * rad);
        case ExponentKind::p_inf_plus_inverse_log:
            return s.p_inf + s.coeff / std::log(std::exp(1.0) + rad);
        case ExponentKind::radial_table: return table_base(s.table, rad);
        case ExponentKind::step_jump: break;
    }
    throw std::logic_error("radial_base: not a radial kind");
}

}  // namespace detail

// p(|x| = rad) for radial kinds, after clip and conjugation.
inline double radial_value(const ExponentSpec& s, double rad) {
    if (!is_radial(s)) throw std::invalid_argument("radial_value: spec is not radial");
    if (!(rad >= 0.0)) throw std::invalid_argument("radial_value: negative radius");
    return detail::finalize(s, detail::radial_base(s, rad));
}

inline double evaluate(const ExponentSpec& s, std::span<const double> x) {
    if (static_cast<int>(x.size()) != s.dim)
        throw std::invalid_argument("evaluate: dimension mismatch");
    if (s.kind == ExponentKind::step_jump) {
        double side = dot(s.jump_normal, x) - s.jump_offset;
        return detail::finalize(s, side >= 0.0 ? s.jump_hi : s.jump_lo);
    }
    return detail::finalize(s, detail::radial_base(s, norm(x)));
}

namespace detail {

// exact base-profile range over a radius interval (before clip/conjugation)
inline std::pair<double, double> radial_base_range(const ExponentSpec& s, double r_lo, double r_hi) {
    switch (s.kind) {
        case ExponentKind::constant: return {s.value, s.value};
        case ExponentKind::p_inf_plus_inverse_square:
        case ExponentKind::p_inf_plus_inverse_log: {
            // monotone in the radius, extremes at the endpoints
            double a = radial_base(s, r_lo), b = radial_base(s, r_hi);
            return {std::min(a, b), std::max(a, b)};
        }
        case ExponentKind::radial_table: {
            double lo = std::min(radial_base(s, r_lo), radial_base(s, r_hi));
            double hi = std::max(radial_base(s, r_lo), radial_base(s, r_hi));
            for (std::size_t j = 0; j < s.table.r.size(); ++j) {
                if (s.table.r[j] > r_lo && s.table.r[j] < r_hi) {
                    lo = std::min(lo, s.table.p[j]);
                    hi = std::max(hi, s.table.p[j]);
                }
            }
            // the tail is monotone between r_K (a knot) and the endpoints,
            // so no further interior candidates exist
            return {lo, hi};
        }
        case ExponentKind::step_jump: break;
    }
    throw std::logic_error("radial_base_range: not a radial kind");
}

}  // namespace detail

// Exact essential range of p over a ball.
inline ExponentOscillation oscillation(const ExponentSpec& s, const Ball& ball) {
    if (ball.dim() != s.dim) throw std::invalid_argument("oscillation: dimension mismatch");
    double base_lo, base_hi;
    if (s.kind == ExponentKind::step_jump) {
        double sc = dot(s.jump_normal, ball.center) - s.jump_offset;
        bool hits_hi = sc + ball.radius >= 0.0;
        bool hits_lo = sc - ball.radius < 0.0;
        base_lo = base_hi = hits_hi ? s.jump_hi : s.jump_lo;
        if (hits_lo && hits_hi) {
            base_lo = std::min(s.jump_lo, s.jump_hi);
            base_hi = std::max(s.jump_lo, s.jump_hi);
        } else if (hits_lo) {
            base_lo = base_hi = s.jump_lo;
        }
    } else {
        double c = norm(ball.center);
        double r_lo = std::max(0.0, c - ball.radius), r_hi = c + ball.radius;
        std::tie(base_lo, base_hi) = detail::radial_base_range(s, r_lo, r_hi);
    }
    double a = detail::finalize(s, base_lo);
    double b = detail::finalize(s, base_hi);
    return {std::min(a, b), std::max(a, b)};  // conjugation reverses order
}

// Monte-Carlo/grid estimator of the oscillation, used as an oracle against the
// exact path: points on a tensor grid of the bounding box filtered to the
// ball, plus radial extremes along the center direction and random directions.
inline ExponentOscillation sampled_oscillation(const ExponentSpec& s, const Ball& ball,
                                               int per_axis = 64, std::uint64_t seed = 17) {
    if (ball.dim() != s.dim) throw std::invalid_argument("sampled_oscillation: dimension mismatch");
    const int d = s.dim;
    double lo = inf, hi = -inf;
    auto visit = [&](std::span<const double> x) {
        if (!ball.contains(x)) return;
        double v = evaluate(s, x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    Point x(d);
    std::vector<int> idx(d, 0);
    bool done = false;
    while (!done) {
        for (int i = 0; i < d; ++i)
            x[i] = ball.center[i] +
                   ball.radius * (-1.0 + 2.0 * (idx[i] + 0.5) / per_axis);
        visit(x);
        int axis = 0;
        while (axis < d && ++idx[axis] == per_axis) idx[axis++] = 0;
        done = axis == d;
    }
    // radial extremes: the segment through the center in the center direction
    Rng rng(seed);
    for (int rep = 0; rep < 64; ++rep) {
        Point dir = rep == 0 && norm(ball.center) > 0 ? ball.center : rng.direction(d);
        double n = norm(dir);
        for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            for (int i = 0; i < d; ++i) x[i] = ball.center[i] + t * ball.radius * dir[i] / n;
            visit(x);
        }
    }
    return {lo, hi};
}

// Global essential range over R^d (post clip/conjugation). Infima/suprema that
// are approached but not attained are reported as the closure endpoint.
inline ExponentOscillation global_range(const ExponentSpec& s) {
    double base_lo, base_hi;
    switch (s.kind) {
        case ExponentKind::constant:
            base_lo = base_hi = s.value;
            break;
        case ExponentKind::p_inf_plus_inverse_square:
        case ExponentKind::p_inf_plus_inverse_log:
            if (s.coeff > 0.0) {
                base_lo = s.p_inf;
                base_hi = inf;
            } else if (s.coeff < 0.0) {
                base_lo = -inf;
                base_hi = s.p_inf;
            } else {
                base_lo = base_hi = s.p_inf;
            }
            break;
        case ExponentKind::radial_table: {
            base_lo = s.table.p_inf;
            base_hi = s.table.p_inf;
            for (double v : s.table.p) {
                base_lo = std::min(base_lo, v);
                base_hi = std::max(base_hi, v);
            }
            break;
        }
        case ExponentKind::step_jump:
            base_lo = std::min(s.jump_lo, s.jump_hi);
            base_hi = std::max(s.jump_lo, s.jump_hi);
            break;
        default:
            throw std::logic_error("global_range: unknown kind");
    }
    double a = detail::finalize(s, std::clamp(base_lo, s.clip_lo, s.clip_hi));
    double b = detail::finalize(s, std::clamp(base_hi, s.clip_lo, s.clip_hi));
    return {std::min(a, b), std::max(a, b)};
}

inline double p_min(const ExponentSpec& s) { return global_range(s).p_minus; }
inline double p_max(const ExponentSpec& s) { return global_range(s).p_plus; }

// Limit of p at infinity. Kinds whose base converges keep their limit only
// when the clip is inactive there (a clipped-away limit no longer describes
// the function's tail); the jump kind has direction-dependent tails and none.
inline std::optional<double> p_limit(const ExponentSpec& s) {
    std::optional<double> base;
    switch (s.kind) {
        case ExponentKind::constant: base = s.value; break;
        case ExponentKind::p_inf_plus_inverse_square:
        case ExponentKind::p_inf_plus_inverse_log: base = s.p_inf; break;
        case ExponentKind::radial_table: base = s.table.p_inf; break;
        case ExponentKind::step_jump: return std::nullopt;
    }
    if (!base || *base < s.clip_lo || *base > s.clip_hi) return std::nullopt;
    double v = *base;
    if (s.conjugated) {
        if (v <= 1.0) return std::nullopt;
        v = conjugate(v);
    }
    return v;
}

// Holder-conjugate spec; rejects exponents that touch 1 (their conjugate
// would be unbounded).
inline ExponentSpec conjugate_exponent(const ExponentSpec& s) {
    if (!(p_min(s) > 1.0))
        throw std::domain_error("conjugate_exponent: essential infimum must exceed 1");
    ExponentSpec out = s;
    out.conjugated = !s.conjugated;
    out.name = s.name.empty() ? "" : (s.name + (out.conjugated ? "'" : ""));
    return out;
}

}  // namespace gaussvar
