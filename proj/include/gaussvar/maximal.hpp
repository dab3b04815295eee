#pragma once

// Non-centered maximal operator over a finite indexed ball family,
//     M_mu f(x) = max_{B in F, B ni x} (1/mu(B)) int_B |f| dmu,
// with ball masses and integrals taken from the quadrature weights of the
// grid carrying f, so averages, modulars, and norms share one integration
// authority. Balls that trap no grid node carry no mass at the working
// resolution and drop out of the maximum; a point is uncovered only when no
// family ball contains it at all.
//
// Around the operator, the inequality chain that feeds the boundedness
// experiment, stated with the variable exponents
//     1/q(x,y) = max(1/p(x) - 1/p(y), 0),   1/s(x) = |1/p(x) - 1/p_inf|,
// the convention gamma^inf = 0, the measure-power constant
// c_mu = inf_B mu(B)^{p_B^+ - p_B^-}, and delta = beta/6 for
// beta = min(c_mu, gamma):
//     A1:        (c_mu (lambda/mu(B))^{1/p_B^-})^{p(x)} <= lambda/mu(B)
//     Jensen:    (delta avg_B|f|)^{p(x)} <= avg_B |f|^{p(y)} + avg_B gamma^{q(x,y)}
//     A4:        t^{q(x,y)} <= t^{s(x)/2} + t^{s(y)/2}
//     pointwise: (delta M f(x))^{p(x)} <= M(|f|^{p(.)})(x) + 2 M(gamma^{s(.)/2})(x)
// The Jensen and pointwise bounds assume the Luxemburg norm of f is at most
// one half; normalize_half rescales arbitrary data into that regime.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaussvar/common.hpp"
#include "gaussvar/conditions.hpp"
#include "gaussvar/exponent.hpp"
#include "gaussvar/gauss_measure.hpp"
#include "gaussvar/grid.hpp"
#include "gaussvar/norms.hpp"

namespace gaussvar {

struct MaximalInstance {
    MeasureHandle measure;
    BallFamily family;
    ExponentSpec spec;
    double gamma = 0.5;  // base of the tail-exponent powers, in (0,1)
    double delta = 0.0;  // Jensen contraction, in (0,1)
    double p_inf = 2.0;  // tail exponent entering s(x)
    double c_mu = 0.0;   // measure-power constant backing delta
};

inline double derived_delta(double c_mu, double gamma) { return std::min(c_mu, gamma) / 6.0; }

inline void validate_instance(const MaximalInstance& inst) {
    validate(inst.spec);
    if (inst.spec.dim != inst.measure.dim)
        throw std::invalid_argument("MaximalInstance: spec and measure dimensions differ");
    if (inst.family.balls.empty()) throw std::invalid_argument("MaximalInstance: empty ball family");
    if (inst.family.dim() != inst.measure.dim)
        throw std::invalid_argument("MaximalInstance: family dimension mismatch");
    if (!(inst.gamma > 0.0 && inst.gamma < 1.0))
        throw std::invalid_argument("MaximalInstance: gamma must lie in (0,1)");
    if (!(inst.delta > 0.0 && inst.delta < 1.0))
        throw std::invalid_argument("MaximalInstance: delta must lie in (0,1)");
    if (!(inst.p_inf >= 1.0)) throw std::invalid_argument("MaximalInstance: tail exponent below 1");
    if (!(inst.c_mu > 0.0 && inst.c_mu <= 1.0))
        throw std::invalid_argument("MaximalInstance: c_mu must lie in (0,1]");
}

// --- variable exponents ----------------------------------------------------

struct VariableExponents {
    double q = inf;
    double s = inf;
};

// t^e on [0,1] with the e = inf convention: 0 below one, 1 at one
inline double extended_power(double t, double e) {
    if (e == inf) return t < 1.0 ? 0.0 : 1.0;
    return std::pow(t, e);
}

inline VariableExponents exponents_q_s(const ExponentSpec& spec, double p_inf,
                                       std::span<const double> x, std::span<const double> y) {
    if (!(p_inf >= 1.0)) throw std::invalid_argument("exponents_q_s: tail exponent below 1");
    const double px = evaluate(spec, x), py = evaluate(spec, y);
    VariableExponents out;
    double inv_q = std::max(1.0 / px - 1.0 / py, 0.0);
    if (inv_q > 0.0) out.q = 1.0 / inv_q;
    double inv_s = std::fabs(1.0 / px - 1.0 / p_inf);
    if (inv_s > 0.0) out.s = 1.0 / inv_s;
    return out;
}

// --- instance construction -------------------------------------------------

// min over the family of mu(B)^{p_B^+ - p_B^-}, capped at one
inline double family_measure_power_min(const MeasureHandle& mu, const BallFamily& fam,
                                       const ExponentSpec& spec) {
    if (fam.balls.empty())
        throw std::invalid_argument("family_measure_power_min: empty ball family");
    double lo = 0.0;
    for (const auto& b : fam.balls) lo = std::min(lo, measure_power_log(spec, mu, b));
    return std::exp(lo);
}

// Admissible cover of the box plus shrunk copies at dyadic scales. The small
// copies sharpen the maximum near each point; the radius floor keeps every
// retained ball big enough to trap grid nodes at the working resolution.
inline BallFamily multiscale_family(const Box& box, int depth, int levels, double min_radius) {
    if (levels < 0 || !(min_radius >= 0.0))
        throw std::invalid_argument("multiscale_family: bad shrink parameters");
    std::vector<Ball> balls = admissible_cover(box, 1.0, depth);
    const std::size_t base = balls.size();
    for (int j = 1; j <= levels; ++j) {
        double shrink = std::pow(0.5, j);
        for (std::size_t k = 0; k < base; ++k) {
            double r = balls[k].radius * shrink;
            if (r >= min_radius) balls.emplace_back(balls[k].center, r);
        }
    }
    return ball_family(std::move(balls));
}

// Fills the derived fields: the tail exponent from the spec limit (fitted
// from deep probes when no exact limit exists), c_mu as the smaller of the
// fitted global measure-power constant and the family minimum, and delta
// from the construction.
inline MaximalInstance make_instance(const MeasureHandle& mu, BallFamily family,
                                     const ExponentSpec& spec, double gamma = 0.5,
                                     CheckConfig cfg = {}) {
    validate(spec);
    if (spec.dim != mu.dim) throw std::invalid_argument("make_instance: dimension mismatch");
    MaximalInstance inst;
    inst.measure = mu;
    inst.family = std::move(family);
    inst.spec = spec;
    inst.gamma = gamma;
    auto lim = p_limit(spec);
    inst.p_inf = lim ? *lim : p_limit_candidate(spec, cfg.seed).first;
    double global = check_measure_power(spec, mu, cfg).fitted_constant;
    inst.c_mu = std::min(global, family_measure_power_min(mu, inst.family, spec));
    inst.delta = derived_delta(inst.c_mu, inst.gamma);
    validate_instance(inst);
    return inst;
}

// --- the maximal operator --------------------------------------------------

namespace detail {

struct BallSums {
    std::vector<double> mass;      // sum of grid weights inside each ball
    std::vector<double> integral;  // sum of weight * |f| inside each ball
};

inline BallSums ball_abs_sums(const BallFamily& fam, const GridFunction& f) {
    BallSums out;
    out.mass.assign(fam.size(), 0.0);
    out.integral.assign(fam.size(), 0.0);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        const Ball& b = fam.balls[k];
        double m = 0.0, s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (!b.contains(f.points[i])) continue;
            m += f.weights[i];
            s += f.weights[i] * std::fabs(f.values[i]);
        }
        out.mass[k] = m;
        out.integral[k] = s;
    }
    return out;
}

inline std::size_t pick_index(Rng& rng, std::size_t n) {
    auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

inline Point random_point_in_ball(Rng& rng, const Ball& b) {
    const int d = b.dim();
    Point x(d);
    // rejection from the bounding cube keeps the density exactly uniform
    while (true) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            x[i] = rng.uniform(-1.0, 1.0);
            s += x[i] * x[i];
        }
        if (s <= 1.0) break;
    }
    for (int i = 0; i < d; ++i) x[i] = b.center[i] + b.radius * x[i];
    return x;
}

inline void require_half_norm(const GridFunction& f, const ExponentSpec& spec, const char* who) {
    if (luxemburg_norm(f, spec) > 0.5 + 1e-9)
        throw std::invalid_argument(std::string(who) +
                                    ": Luxemburg norm exceeds one half, normalize first");
}

}  // namespace detail

inline double maximal_apply(const MaximalInstance& inst, const GridFunction& f,
                            std::span<const double> x) {
    validate_grid(f);
    if (f.measure.dim != inst.measure.dim)
        throw std::invalid_argument("maximal_apply: grid dimension mismatch");
    if (static_cast<int>(x.size()) != inst.measure.dim)
        throw std::invalid_argument("maximal_apply: point dimension mismatch");
    bool covered = false, have = false;
    double best = 0.0;
    for (const auto& b : inst.family.balls) {
        if (!b.contains(x)) continue;
        covered = true;
        double m = 0.0, s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (!b.contains(f.points[i])) continue;
            m += f.weights[i];
            s += f.weights[i] * std::fabs(f.values[i]);
        }
        if (!(m > 0.0)) continue;
        double avg = s / m;
        if (!have || avg > best) best = avg;
        have = true;
    }
    if (!covered) throw std::domain_error("maximal_apply: point not covered by the ball family");
    if (!have)
        throw std::domain_error("maximal_apply: no containing ball holds grid mass");
    return best;
}

// M f on every grid node of f; same sums as maximal_apply, batched per ball.
inline GridFunction maximal_field(const MaximalInstance& inst, const GridFunction& f) {
    validate_grid(f);
    if (f.measure.dim != inst.measure.dim)
        throw std::invalid_argument("maximal_field: grid dimension mismatch");
    detail::BallSums sums = detail::ball_abs_sums(inst.family, f);
    std::vector<double> best(f.size(), -1.0);
    for (std::size_t k = 0; k < inst.family.size(); ++k) {
        if (!(sums.mass[k] > 0.0)) continue;
        const Ball& b = inst.family.balls[k];
        double avg = sums.integral[k] / sums.mass[k];
        for (std::size_t i = 0; i < f.size(); ++i)
            if (avg > best[i] && b.contains(f.points[i])) best[i] = avg;
    }
    for (double v : best)
        if (v < 0.0)
            throw std::domain_error("maximal_field: grid point not covered by the ball family");
    GridFunction out = f;
    out.values = std::move(best);
    return out;
}

// scales f so its Luxemburg norm sits at or below one half
inline GridFunction normalize_half(const GridFunction& f, const ExponentSpec& spec,
                                   double eps = 1e-9) {
    double n = luxemburg_norm(f, spec);
    GridFunction g = f;
    double s = 1.0 / (2.0 * n + eps);
    for (auto& v : g.values) v *= s;
    return g;
}

// --- inequality checks -----------------------------------------------------

struct InequalityReport {
    std::string name;
    long n_samples = 0;  // inequality evaluations
    long violations = 0;
    double worst_margin = -inf;  // max of lhs - rhs over the sample
    double worst_lhs = 0.0, worst_rhs = 0.0;
    std::uint64_t seed = 0;
    bool pass = false;
};

namespace detail {

inline void tally(InequalityReport& r, double lhs, double rhs) {
    ++r.n_samples;
    double margin = lhs - rhs;
    if (margin > r.worst_margin) {
        r.worst_margin = margin;
        r.worst_lhs = lhs;
        r.worst_rhs = rhs;
    }
    if (lhs > rhs + 1e-12 * std::max(1.0, std::fabs(rhs))) ++r.violations;
}

inline void finish(InequalityReport& r) { r.pass = r.violations == 0; }

}  // namespace detail

// (c_mu (lambda/mu(B))^{1/p_B^-})^{p(x)} <= lambda/mu(B) over random balls of
// the family, random x inside, and a uniform lambda grid on [0,1]. Ball
// measures here are the analytic ones, matching the definition of c_mu.
inline InequalityReport lemma_A1_check(const MaximalInstance& inst, int n_lambda, long n_samples,
                                       std::uint64_t seed) {
    validate_instance(inst);
    if (n_lambda < 2 || n_samples < 1)
        throw std::invalid_argument("lemma_A1_check: need >= 2 lambda nodes and >= 1 sample");
    InequalityReport r;
    r.name = "A1";
    r.seed = seed;
    Rng rng(seed);
    for (long k = 0; k < n_samples; ++k) {
        const Ball& b = inst.family.balls[detail::pick_index(rng, inst.family.size())];
        Point x = detail::random_point_in_ball(rng, b);
        double mu_b = measure_ball(inst.measure, b);
        double pm = oscillation(inst.spec, b).p_minus;
        double px = evaluate(inst.spec, x);
        for (int j = 0; j < n_lambda; ++j) {
            double lambda = static_cast<double>(j) / (n_lambda - 1);
            double lhs = std::pow(inst.c_mu * std::pow(lambda / mu_b, 1.0 / pm), px);
            detail::tally(r, lhs, lambda / mu_b);
        }
    }
    detail::finish(r);
    return r;
}

// (delta avg_B|f|)^{p(x)} <= avg_B |f|^{p(y)} + avg_B gamma^{q(x,y)} at
// random family balls and random grid nodes x inside them; averages run over
// the grid nodes trapped by the ball.
inline InequalityReport jensen_variable_check(const MaximalInstance& inst, const GridFunction& f,
                                              long n_samples, std::uint64_t seed) {
    validate_instance(inst);
    validate_grid(f);
    if (f.measure.dim != inst.measure.dim)
        throw std::invalid_argument("jensen_variable_check: grid dimension mismatch");
    detail::require_half_norm(f, inst.spec, "jensen_variable_check");
    InequalityReport r;
    r.name = "variable Jensen";
    r.seed = seed;
    Rng rng(seed);
    std::vector<std::size_t> idx;
    long attempts = 0;
    const long max_attempts = 50 * n_samples + 100;
    while (r.n_samples < n_samples && ++attempts <= max_attempts) {
        const Ball& b = inst.family.balls[detail::pick_index(rng, inst.family.size())];
        idx.clear();
        for (std::size_t i = 0; i < f.size(); ++i)
            if (b.contains(f.points[i])) idx.push_back(i);
        if (idx.empty()) continue;
        double mass = 0.0, int_abs = 0.0;
        for (std::size_t i : idx) {
            mass += f.weights[i];
            int_abs += f.weights[i] * std::fabs(f.values[i]);
        }
        if (!(mass > 0.0)) continue;
        std::span<const double> x = f.points[idx[detail::pick_index(rng, idx.size())]];
        double px = evaluate(inst.spec, x);
        double int_pow = 0.0, int_gq = 0.0;
        for (std::size_t i : idx) {
            double py = evaluate(inst.spec, f.points[i]);
            int_pow += f.weights[i] * std::pow(std::fabs(f.values[i]), py);
            double inv_q = std::max(1.0 / px - 1.0 / py, 0.0);
            double q = inv_q > 0.0 ? 1.0 / inv_q : inf;
            int_gq += f.weights[i] * extended_power(inst.gamma, q);
        }
        double lhs = std::pow(inst.delta * (int_abs / mass), px);
        detail::tally(r, lhs, int_pow / mass + int_gq / mass);
    }
    if (r.n_samples < n_samples)
        throw std::runtime_error("jensen_variable_check: family holds too little grid mass");
    detail::finish(r);
    return r;
}

// t^{q(x,y)} <= t^{s(x)/2} + t^{s(y)/2} on a uniform t grid spanning [0,1]
// and random point pairs drawn from the family balls.
inline InequalityReport lemma_A4_check(const MaximalInstance& inst, int n_t, long n_pairs,
                                       std::uint64_t seed) {
    validate_instance(inst);
    if (n_t < 2 || n_pairs < 1)
        throw std::invalid_argument("lemma_A4_check: need >= 2 t nodes and >= 1 pair");
    InequalityReport r;
    r.name = "A4";
    r.seed = seed;
    Rng rng(seed);
    for (long k = 0; k < n_pairs; ++k) {
        const Ball& bx = inst.family.balls[detail::pick_index(rng, inst.family.size())];
        const Ball& by = inst.family.balls[detail::pick_index(rng, inst.family.size())];
        Point x = detail::random_point_in_ball(rng, bx);
        Point y = detail::random_point_in_ball(rng, by);
        VariableExponents at_x = exponents_q_s(inst.spec, inst.p_inf, x, y);
        VariableExponents at_y = exponents_q_s(inst.spec, inst.p_inf, y, x);
        double sx = at_x.s == inf ? inf : 0.5 * at_x.s;
        double sy = at_y.s == inf ? inf : 0.5 * at_y.s;
        for (int j = 0; j < n_t; ++j) {
            double t = static_cast<double>(j) / (n_t - 1);
            detail::tally(r, extended_power(t, at_x.q),
                          extended_power(t, sx) + extended_power(t, sy));
        }
    }
    detail::finish(r);
    return r;
}

// (delta M f(x))^{p(x)} <= M(|f|^{p(.)})(x) + 2 M(gamma^{s(.)/2})(x) at random
// grid nodes; the two auxiliary fields live on the grid of f and all three
// maximal values come from maximal_apply.
inline InequalityReport pointwise_maximal_check(const MaximalInstance& inst, const GridFunction& f,
                                                long n_points, std::uint64_t seed) {
    validate_instance(inst);
    validate_grid(f);
    if (f.measure.dim != inst.measure.dim)
        throw std::invalid_argument("pointwise_maximal_check: grid dimension mismatch");
    detail::require_half_norm(f, inst.spec, "pointwise_maximal_check");
    if (n_points < 1) throw std::invalid_argument("pointwise_maximal_check: need >= 1 point");
    GridFunction f_pow = f, f_gamma = f;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double px = evaluate(inst.spec, f.points[i]);
        f_pow.values[i] = std::pow(std::fabs(f.values[i]), px);
        double s = exponents_q_s(inst.spec, inst.p_inf, f.points[i], f.points[i]).s;
        f_gamma.values[i] = extended_power(inst.gamma, s == inf ? inf : 0.5 * s);
    }
    InequalityReport r;
    r.name = "pointwise maximal";
    r.seed = seed;
    Rng rng(seed);
    for (long k = 0; k < n_points; ++k) {
        std::span<const double> x = f.points[detail::pick_index(rng, f.size())];
        double lhs = std::pow(inst.delta * maximal_apply(inst, f, x), evaluate(inst.spec, x));
        double rhs = maximal_apply(inst, f_pow, x) + 2.0 * maximal_apply(inst, f_gamma, x);
        detail::tally(r, lhs, rhs);
    }
    detail::finish(r);
    return r;
}

// --- boundedness experiment ------------------------------------------------

struct RatioRow {
    std::string name;
    double norm_f = 0.0;
    double norm_mf = 0.0;
    double ratio = 0.0;
};

struct RatioTable {
    std::vector<RatioRow> rows;
    double empirical_k = 0.0;  // max ratio over the suite
    bool finite = true;
};

inline RatioTable boundedness_experiment(
    const MaximalInstance& inst,
    const std::vector<std::pair<std::string, GridFunction>>& suite) {
    if (inst.family.balls.empty())
        throw std::invalid_argument("boundedness_experiment: empty ball family");
    RatioTable out;
    for (const auto& [name, f] : suite) {
        validate_grid(f);
        if (f.measure.dim != inst.measure.dim)
            throw std::invalid_argument("boundedness_experiment: grid dimension mismatch");
        RatioRow row;
        row.name = name;
        row.norm_f = luxemburg_norm(f, inst.spec);
        GridFunction mf = maximal_field(inst, f);
        row.norm_mf = luxemburg_norm(mf, inst.spec);
        row.ratio = row.norm_f > 0.0 ? row.norm_mf / row.norm_f : (row.norm_mf > 0.0 ? inf : 0.0);
        out.finite = out.finite && std::isfinite(row.ratio);
        out.empirical_k = std::max(out.empirical_k, row.ratio);
        out.rows.push_back(std::move(row));
    }
    return out;
}

// Test family for the experiment: the constant one plus Gaussian bumps
// centered at |c| in {0, 2, 5, 8} along the first axis.
inline std::vector<std::pair<std::string, GridFunction>> bump_suite(const MeasureHandle& mu,
                                                                    const Box& box, int per_axis) {
    std::vector<std::pair<std::string, GridFunction>> suite;
    GridFunction base = tensor_grid(mu, box, per_axis);
    {
        GridFunction one = base;
        fill(one, [](const Point&) { return 1.0; });
        suite.emplace_back("one", std::move(one));
    }
    for (int c : {0, 2, 5, 8}) {
        GridFunction g = base;
        fill(g, [&](const Point& p) {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                double d = p[i] - (i == 0 ? c : 0.0);
                s += d * d;
            }
            return std::exp(-2.0 * s);
        });
        suite.emplace_back("bump_" + std::to_string(c), std::move(g));
    }
    return suite;
}

}  // namespace gaussvar
