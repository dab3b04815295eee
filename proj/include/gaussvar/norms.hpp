#pragma once

// Variable-exponent Lebesgue norms on grid functions.
//
//   modular(f, lambda)   rho(f/lambda) = sum_i w_i (|f_i|/lambda)^{p(x_i)}
//   luxemburg_norm(f)    inf { lambda > 0 : rho(f/lambda) <= 1 }
//
// The modular is continuous and strictly decreasing in lambda wherever it is
// positive, so the norm is found by geometric bisection between a lambda with
// modular > 1 and one with modular <= 1. Holder's inequality holds with
// constant 2,
//
//   sum w |f g| <= 2 ||f||_p ||g||_{p'},
//
// and the dual pairing sandwiches the norm,
//
//   (1/2) ||f||_p <= sup_{||g||_{p'} <= 1} sum w |f g| <= 2 ||f||_p,
//
// with the lower bound realized up to a family defect by the candidate
// g proportional to |f|^{p(x)-1}. The exponent-change estimate compares
// modulars taken with p(y) and with the limit exponent p_inf: for 0 <= G <= 1
// and an exponent with logarithmic decay at infinity,
//
//   int_E G^{p(y)} dy <= C int_E G^{p_inf} dy + int_E (e+|y|)^{-d p_minus} dy,
//
// and the same with the roles of p(y) and p_inf swapped.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaussvar/exponent.hpp"
#include "gaussvar/grid.hpp"

namespace gaussvar {

namespace detail {

// deterministic pairwise reduction; order is fixed by the index split
template <class Term>
double pairwise_sum(std::size_t lo, std::size_t hi, Term&& term) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

inline std::vector<double> exponent_values(const GridFunction& f, const ExponentSpec& spec) {
    if (spec.dim != f.dim()) throw std::invalid_argument("norms: exponent dimension mismatch");
    std::vector<double> p(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) p[i] = evaluate(spec, f.points[i]);
    return p;
}

inline double modular_with_p(const GridFunction& f, const std::vector<double>& p, double lambda) {
    return pairwise_sum(0, f.size(), [&](std::size_t i) {
        double a = std::fabs(f.values[i]);
        if (a == 0.0) return 0.0;
        return f.weights[i] * std::pow(a / lambda, p[i]);
    });
}

}  // namespace detail

inline double modular(const GridFunction& f, const ExponentSpec& spec, double lambda = 1.0) {
    validate_grid(f);
    if (!(lambda > 0.0)) throw std::invalid_argument("modular: lambda must be positive");
    return detail::modular_with_p(f, detail::exponent_values(f, spec), lambda);
}

// Luxemburg norm by geometric bisection on lambda -> modular(f/lambda).
// Brackets expand by doubling (or halving) from lambda = 1; the loop then
// keeps modular(hi) <= 1 < modular(lo) and returns the feasible endpoint once
// the relative gap is below tol divided by the largest exponent, which makes
// the final modular at least 1 - 10 tol whenever modular(f) > 1.
inline double luxemburg_norm(const GridFunction& f, const ExponentSpec& spec, double tol = 1e-10) {
    validate_grid(f);
    double vmax = 0.0;
    for (double v : f.values) {
        if (!std::isfinite(v)) throw std::domain_error("luxemburg_norm: non-finite values");
        vmax = std::max(vmax, std::fabs(v));
    }
    if (vmax == 0.0) return 0.0;

    std::vector<double> p = detail::exponent_values(f, spec);
    double p_top = 1.0;
    for (double q : p) p_top = std::max(p_top, q);
    auto mod = [&](double lam) { return detail::modular_with_p(f, p, lam); };

    double lo, hi;
    if (mod(1.0) <= 1.0) {
        hi = 1.0;
        lo = 1.0;
        int guard = 0;
        do {
            lo *= 0.5;
            if (++guard > 1100) throw std::domain_error("luxemburg_norm: bracket failure");
        } while (mod(lo) <= 1.0);
    } else {
        lo = 1.0;
        hi = 1.0;
        int guard = 0;
        do {
            hi *= 2.0;
            if (++guard > 1100) throw std::domain_error("luxemburg_norm: bracket failure");
        } while (mod(hi) > 1.0);
    }

    for (int it = 0; it < 60; ++it) {
        if (hi - lo <= (tol / p_top) * lo) break;
        double mid = std::sqrt(lo) * std::sqrt(hi);
        if (mod(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

inline void require_same_grid(const GridFunction& f, const GridFunction& g, const char* who) {
    if (f.size() != g.size() || f.measure.kind != g.measure.kind || f.measure.dim != g.measure.dim ||
        f.domain.lo != g.domain.lo || f.domain.hi != g.domain.hi)
        throw std::invalid_argument(std::string(who) + ": grids differ");
}

struct HolderReport {
    double lhs = 0.0;     // sum w |f g|
    double norm_f = 0.0;  // ||f||_p
    double norm_g = 0.0;  // ||g||_{p'}
    double rhs = 0.0;     // 2 ||f||_p ||g||_{p'}
    bool pass = false;
};

inline HolderReport holder_check(const GridFunction& f, const GridFunction& g, const ExponentSpec& spec,
                                 double eps_num = 1e-9) {
    require_same_grid(f, g, "holder_check");
    HolderReport r;
    r.lhs = detail::pairwise_sum(
        0, f.size(), [&](std::size_t i) { return f.weights[i] * std::fabs(f.values[i] * g.values[i]); });
    r.norm_f = luxemburg_norm(f, spec);
    r.norm_g = luxemburg_norm(g, conjugate_exponent(spec));
    r.rhs = 2.0 * r.norm_f * r.norm_g;
    r.pass = r.lhs <= r.rhs * (1.0 + eps_num);
    return r;
}

// Candidate g proportional to |f|^{p(x)-1}, normalized to unit conjugate
// norm. For constant p this is the extremal function of the classical dual
// pairing.
inline GridFunction canonical_dual_candidate(const GridFunction& f, const ExponentSpec& spec) {
    GridFunction g = f;
    std::vector<double> p = detail::exponent_values(f, spec);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = std::pow(std::fabs(f.values[i]), p[i] - 1.0);
    double n = luxemburg_norm(g, conjugate_exponent(spec));
    if (n > 0.0)
        for (double& v : g.values) v /= n;
    return g;
}

struct DualEstimate {
    double norm_f = 0.0;
    double sup_pairing = 0.0;   // best sum w |f g| over the candidate family
    std::size_t best_index = 0;
    bool pass = false;          // sup within [ (1/2 - eps_family) , 2 ] times ||f||
};

inline DualEstimate dual_norm_estimate(const GridFunction& f, const ExponentSpec& spec,
                                       const std::vector<GridFunction>& family, double eps_family = 0.02,
                                       double eps_num = 1e-9) {
    DualEstimate r;
    r.norm_f = luxemburg_norm(f, spec);
    for (std::size_t k = 0; k < family.size(); ++k) {
        require_same_grid(f, family[k], "dual_norm_estimate");
        double pairing = detail::pairwise_sum(
            0, f.size(), [&](std::size_t i) { return f.weights[i] * std::fabs(f.values[i] * family[k].values[i]); });
        if (pairing > r.sup_pairing) {
            r.sup_pairing = pairing;
            r.best_index = k;
        }
    }
    r.pass = r.sup_pairing <= 2.0 * r.norm_f * (1.0 + eps_num) &&
             r.sup_pairing >= (0.5 - eps_family) * r.norm_f * (1.0 - eps_num);
    return r;
}

struct ChangepReport {
    double lhs_forward = 0.0;   // int_E G^{p(y)} dy
    double lhs_backward = 0.0;  // int_E G^{p_inf} dy
    double tail = 0.0;          // int_E (e+|y|)^{-d p_minus} dy
    double fitted_c = 0.0;      // smallest C closing both inequalities
    double rhs_forward = 0.0;   // fitted_c * lhs_backward + tail
    double rhs_backward = 0.0;  // fitted_c * lhs_forward + tail
    bool pass = false;
};

// Both exponent-change inequalities on the set E (all grid points, or those
// selected by in_set), with the smallest constant C that closes them. The
// estimate is a Lebesgue-measure statement, so the grid must carry Lebesgue
// weights, G must take values in [0,1], and the exponent must have a limit
// at infinity.
inline ChangepReport changep_error_check(
    const GridFunction& G, const ExponentSpec& spec,
    const std::function<bool(std::span<const double>)>& in_set = {}) {
    validate_grid(G);
    if (G.measure.kind != MeasureKind::lebesgue)
        throw std::invalid_argument("changep_error_check: grid must carry Lebesgue weights");
    for (double v : G.values)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("changep_error_check: values must lie in [0,1]");
    std::optional<double> pinf = p_limit(spec);
    if (!pinf) throw std::invalid_argument("changep_error_check: exponent has no limit at infinity");
    const double p_minus = p_min(spec);
    const int d = G.dim();

    std::vector<double> p = detail::exponent_values(G, spec);
    std::vector<char> sel(G.size(), 1);
    if (in_set)
        for (std::size_t i = 0; i < G.size(); ++i) sel[i] = in_set(G.points[i]) ? 1 : 0;

    ChangepReport r;
    r.lhs_forward = detail::pairwise_sum(0, G.size(), [&](std::size_t i) {
        if (!sel[i] || G.values[i] == 0.0) return 0.0;
        return G.weights[i] * std::pow(G.values[i], p[i]);
    });
    r.lhs_backward = detail::pairwise_sum(0, G.size(), [&](std::size_t i) {
        if (!sel[i] || G.values[i] == 0.0) return 0.0;
        return G.weights[i] * std::pow(G.values[i], *pinf);
    });
    r.tail = detail::pairwise_sum(0, G.size(), [&](std::size_t i) {
        if (!sel[i]) return 0.0;
        return G.weights[i] * std::pow(M_E + norm(G.points[i]), -static_cast<double>(d) * p_minus);
    });

    auto fit = [&](double lhs, double main) {
        double excess = lhs - r.tail;
        if (excess <= 0.0) return 0.0;
        if (main == 0.0) return std::numeric_limits<double>::infinity();
        return excess / main;
    };
    r.fitted_c = std::max({1.0, fit(r.lhs_forward, r.lhs_backward), fit(r.lhs_backward, r.lhs_forward)});
    r.rhs_forward = r.fitted_c * r.lhs_backward + r.tail;
    r.rhs_backward = r.fitted_c * r.lhs_forward + r.tail;
    r.pass = std::isfinite(r.fitted_c) && r.lhs_forward <= r.rhs_forward * (1.0 + 1e-12) &&
             r.lhs_backward <= r.rhs_backward * (1.0 + 1e-12);
    return r;
}

}  // namespace gaussvar
