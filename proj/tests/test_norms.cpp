// Grid construction, modular and Luxemburg norm against closed-form moments,
// a two-valued-exponent root-finding oracle, norm axioms on random functions,
// the Holder and dual-pairing sandwiches, and the exponent-change estimate
// with its pointwise-identity oracle.

#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "gaussvar/norms.hpp"
#include "gaussvar/registry.hpp"

using namespace gaussvar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExponentSpec make_constant(double v, int dim) {
    ExponentSpec s;
    s.kind = ExponentKind::constant;
    s.dim = dim;
    s.value = v;
    s.name = "const_local";
    return s;
}

GridFunction gauss_grid_1d() {
    return tensor_grid(MeasureHandle{MeasureKind::gaussian, 1}, Box::cube(1, 10.0), 1024);
}

GridFunction lebesgue_grid_1d(double half, int per_axis) {
    return tensor_grid(MeasureHandle{MeasureKind::lebesgue, 1}, Box::cube(1, half), per_axis);
}

// random bounded oscillating profile with sign changes and scale spread
void random_profile(GridFunction& f, Rng& rng) {
    double amp = std::pow(10.0, rng.uniform(-1.0, 1.0));
    double freq = rng.uniform(0.3, 3.0);
    double phase = rng.uniform(0.0, 6.28);
    double drift = rng.uniform(-0.5, 0.5);
    fill(f, [&](const Point& x) {
        double r = norm(x);
        return amp * (std::sin(freq * x[0] + phase) + drift) * std::exp(-0.05 * r * r);
    });
}

}  // namespace

TEST_CASE("tensor grids carry the measure in their weights") {
    GridFunction g1 = gauss_grid_1d();
    CHECK(g1.size() == 1024);
    CHECK_THAT(total_weight(g1), WithinAbs(1.0, 1e-13));

    GridFunction g2 = tensor_grid(MeasureHandle{MeasureKind::gaussian, 2}, Box::cube(2, 10.0), 128);
    CHECK(g2.size() == 128u * 128u);
    CHECK_THAT(total_weight(g2), WithinAbs(1.0, 1e-12));

    GridFunction l1 = lebesgue_grid_1d(10.0, 1024);
    CHECK_THAT(total_weight(l1), WithinRel(20.0, 1e-12));

    // counts that are not multiples of 16 fall back to a single panel
    GridFunction odd = tensor_grid(MeasureHandle{MeasureKind::lebesgue, 1}, Box::cube(1, 1.0), 20);
    CHECK(odd.size() == 20);
    CHECK_THAT(total_weight(odd), WithinRel(2.0, 1e-12));
    CHECK_THROWS_AS(tensor_grid(MeasureHandle{MeasureKind::lebesgue, 1}, Box::cube(1, 1.0), 200),
                    std::invalid_argument);

    GridFunction broken = g1;
    broken.values.pop_back();
    CHECK_THROWS_AS(validate_grid(broken), std::invalid_argument);
    broken = g1;
    broken.weights[3] = -1.0;
    CHECK_THROWS_AS(validate_grid(broken), std::invalid_argument);
}

TEST_CASE("modular matches Gaussian moments") {
    GridFunction f = gauss_grid_1d();
    fill(f, [](const Point& x) { return x[0]; });

    // second and fourth moments of the Gaussian reference measure
    CHECK_THAT(modular(f, make_constant(2.0, 1)), WithinRel(0.5, 1e-12));
    CHECK_THAT(modular(f, make_constant(4.0, 1)), WithinRel(0.75, 1e-12));

    GridFunction z = gauss_grid_1d();
    CHECK(modular(z, make_constant(2.0, 1)) == 0.0);

    // lambda scaling: modular(f, lambda) = modular(f / lambda)
    CHECK_THAT(modular(f, make_constant(2.0, 1), 2.0), WithinRel(0.125, 1e-12));
}

TEST_CASE("luxemburg norm collapses to the classical norm for constant exponents") {
    GridFunction f = gauss_grid_1d();
    fill(f, [](const Point& x) { return x[0]; });

    CHECK_THAT(luxemburg_norm(f, make_constant(2.0, 1)), WithinRel(std::sqrt(0.5), 1e-9));
    CHECK_THAT(luxemburg_norm(f, make_constant(4.0, 1)), WithinRel(std::pow(0.75, 0.25), 1e-9));

    GridFunction f2 = tensor_grid(MeasureHandle{MeasureKind::gaussian, 2}, Box::cube(2, 10.0), 128);
    fill(f2, [](const Point& x) { return x[0]; });
    CHECK_THAT(luxemburg_norm(f2, make_constant(2.0, 2)), WithinRel(std::sqrt(0.5), 1e-9));
}

TEST_CASE("luxemburg norm basics: zero, homogeneity, bounds") {
    GridFunction f = gauss_grid_1d();
    const auto& spec = find_exponent("inv_square");

    CHECK(luxemburg_norm(f, spec) == 0.0);

    Rng rng(77);
    random_profile(f, rng);
    double n1 = luxemburg_norm(f, spec);
    GridFunction f3 = f;
    for (double& v : f3.values) v *= 3.0;
    CHECK_THAT(luxemburg_norm(f3, spec), WithinRel(3.0 * n1, 1e-9));

    // upper bracket from the essential sup and the domain measure
    double vmax = 0.0;
    for (double v : f.values) vmax = std::max(vmax, std::fabs(v));
    double bound = vmax * std::pow(std::max(1.0, total_weight(f)), 1.0 / p_min(spec)) + 1.0;
    CHECK(n1 > 0.0);
    CHECK(n1 <= bound);

    GridFunction bad = f;
    bad.values[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(luxemburg_norm(bad, spec), std::domain_error);
}

TEST_CASE("two-valued exponent indicator matches the scalar root-finding oracle") {
    // indicator of [-5, 0) u [0, 2.5) under the two-valued jump exponent:
    // the norm solves 5 lambda^{-2} + 2.5 lambda^{-3} = 1
    GridFunction f = lebesgue_grid_1d(10.0, 1024);
    fill(f, [](const Point& x) { return (x[0] >= -5.0 && x[0] < 2.5) ? 1.0 : 0.0; });
    const auto& step = find_exponent("step_jump");

    double lo = 1.0, hi = 16.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double val = 5.0 / (mid * mid) + 2.5 / (mid * mid * mid);
        (val > 1.0 ? lo : hi) = mid;
    }
    double oracle = 0.5 * (lo + hi);

    CHECK_THAT(luxemburg_norm(f, step), WithinRel(oracle, 1e-9));
}

TEST_CASE("norm axioms hold on random profiles") {
    const auto& spec = find_exponent("table_bump");
    Rng rng(2024);
    GridFunction f = gauss_grid_1d(), g = gauss_grid_1d(), h = gauss_grid_1d();

    for (int trial = 0; trial < 30; ++trial) {
        random_profile(f, rng);
        random_profile(g, rng);

        double nf = luxemburg_norm(f, spec);
        double ng = luxemburg_norm(g, spec);

        // the returned lambda puts the modular at the unit-ball boundary
        GridFunction scaled = f;
        for (double& v : scaled.values) v /= nf;
        double m = modular(scaled, spec);
        CHECK(m <= 1.0 + 1e-12);
        CHECK(m >= 1.0 - 1e-8);

        // monotonicity: |f| <= |f| + |g|
        GridFunction dom = f;
        for (std::size_t i = 0; i < dom.size(); ++i)
            dom.values[i] = std::fabs(f.values[i]) + std::fabs(g.values[i]);
        CHECK(luxemburg_norm(dom, spec) >= nf - 1e-10);

        // triangle inequality
        for (std::size_t i = 0; i < h.size(); ++i) h.values[i] = f.values[i] + g.values[i];
        CHECK(luxemburg_norm(h, spec) <= nf + ng + 2e-10);
    }
}

TEST_CASE("holder pairing stays under twice the product of dual norms") {
    // unit functions under p = 2: pairing integrates to 1, bound is 2
    GridFunction one = gauss_grid_1d();
    fill(one, [](const Point&) { return 1.0; });
    HolderReport r = holder_check(one, one, make_constant(2.0, 1));
    CHECK(r.pass);
    CHECK_THAT(r.lhs, WithinAbs(1.0, 1e-12));
    CHECK_THAT(r.rhs, WithinAbs(2.0, 1e-9));

    GridFunction one2 = tensor_grid(MeasureHandle{MeasureKind::gaussian, 2}, Box::cube(2, 10.0), 128);
    fill(one2, [](const Point&) { return 1.0; });
    HolderReport r2 = holder_check(one2, one2, make_constant(2.0, 2));
    CHECK(r2.pass);
    CHECK_THAT(r2.lhs, WithinAbs(1.0, 1e-11));
    CHECK_THAT(r2.rhs, WithinAbs(2.0, 1e-8));

    GridFunction zero = gauss_grid_1d();
    HolderReport rz = holder_check(one, zero, make_constant(2.0, 1));
    CHECK(rz.pass);
    CHECK(rz.lhs == 0.0);

    const char* names[] = {"const_2", "inv_square", "table_bump", "step_jump"};
    Rng rng(5150);
    GridFunction f = gauss_grid_1d(), g = gauss_grid_1d();
    for (const char* name : names) {
        const auto& spec = find_exponent(name);
        for (int trial = 0; trial < 50; ++trial) {
            random_profile(f, rng);
            random_profile(g, rng);
            HolderReport rr = holder_check(f, g, spec);
            CHECK(rr.pass);
            CHECK(rr.lhs <= rr.rhs * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("dual pairing sandwiches the norm") {
    // constant p = 2: the canonical candidate is the exact extremal function
    GridFunction f = gauss_grid_1d();
    fill(f, [](const Point& x) { return x[0]; });
    ExponentSpec p2 = make_constant(2.0, 1);
    std::vector<GridFunction> family{canonical_dual_candidate(f, p2)};
    DualEstimate est = dual_norm_estimate(f, p2, family);
    CHECK(est.pass);
    CHECK_THAT(est.sup_pairing, WithinRel(est.norm_f, 1e-6));

    // zero function: both sides collapse to zero
    GridFunction z = gauss_grid_1d();
    DualEstimate ez = dual_norm_estimate(z, p2, {canonical_dual_candidate(z, p2)});
    CHECK(ez.pass);
    CHECK(ez.sup_pairing == 0.0);
    CHECK(ez.norm_f == 0.0);

    // variable exponents with mixed candidate families
    const char* names[] = {"inv_square", "table_bump"};
    Rng rng(909);
    for (const char* name : names) {
        const auto& spec = find_exponent(name);
        ExponentSpec conj = conjugate_exponent(spec);
        for (int trial = 0; trial < 10; ++trial) {
            random_profile(f, rng);
            std::vector<GridFunction> fam{canonical_dual_candidate(f, spec)};
            for (int extra = 0; extra < 3; ++extra) {
                GridFunction g = gauss_grid_1d();
                random_profile(g, rng);
                double n = luxemburg_norm(g, conj);
                if (n > 0.0)
                    for (double& v : g.values) v /= n;
                fam.push_back(g);
            }
            DualEstimate e = dual_norm_estimate(f, spec, fam);
            CHECK(e.pass);
            CHECK(e.sup_pairing <= 2.0 * e.norm_f * (1.0 + 1e-9));
            CHECK(e.sup_pairing >= 0.48 * e.norm_f * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("exponent-change estimate on the inverse-log profile") {
    // G = (e + |y|)^{-1} under p = 2 + 1/log(e + |y|) satisfies the exact
    // pointwise identity G^{p(y)} = e^{-1} G^{2}, and the error term equals
    // the comparison integral, so the fitted constant collapses to 1
    GridFunction G = lebesgue_grid_1d(100.0, 2048);
    fill(G, [](const Point& x) { return 1.0 / (M_E + norm(x)); });
    const auto& spec = find_exponent("inv_log");

    double prev_c = 0.0;
    for (double radius : {25.0, 50.0, 100.0}) {
        auto in_ball = [radius](std::span<const double> x) {
            double s = 0.0;
            for (double c : x) s += c * c;
            return std::sqrt(s) <= radius;
        };
        ChangepReport r = changep_error_check(G, spec, in_ball);
        CHECK(r.pass);
        CHECK(r.fitted_c == 1.0);
        CHECK_THAT(r.lhs_forward, WithinRel(std::exp(-1.0) * r.lhs_backward, 1e-12));
        CHECK_THAT(r.tail, WithinRel(r.lhs_backward, 1e-12));
        prev_c = r.fitted_c;
    }
    CHECK(prev_c == 1.0);
}

TEST_CASE("exponent-change estimate fits a genuine constant for fast-decay tails") {
    // large limit exponent makes the error term small; a bump where p > p_inf
    // forces a constant above 1 in the swapped inequality, stable in the set
    ExponentSpec spec;
    spec.kind = ExponentKind::p_inf_plus_inverse_square;
    spec.dim = 1;
    spec.p_inf = 8.0;
    spec.coeff = 1.0;
    spec.clip_lo = 1.5;
    spec.clip_hi = 64.0;
    spec.name = "steep_local";
    validate(spec);

    GridFunction G = lebesgue_grid_1d(100.0, 2048);
    fill(G, [](const Point& x) {
        double r = norm(x);
        return 0.5 * std::exp(-4.0 * (r - 1.0) * (r - 1.0));
    });

    std::vector<double> cs;
    for (double radius : {25.0, 50.0, 100.0}) {
        auto in_ball = [radius](std::span<const double> x) { return norm(Point(x.begin(), x.end())) <= radius; };
        ChangepReport r = changep_error_check(G, spec, in_ball);
        CHECK(r.pass);
        CHECK(r.fitted_c > 1.02);
        cs.push_back(r.fitted_c);
    }
    CHECK_THAT(cs[1], WithinRel(cs[0], 0.01));
    CHECK_THAT(cs[2], WithinRel(cs[0], 0.01));

    // trivial profiles collapse to constant 1
    GridFunction flat = lebesgue_grid_1d(100.0, 2048);
    ChangepReport rz = changep_error_check(flat, find_exponent("inv_log"));
    CHECK(rz.pass);
    CHECK(rz.fitted_c == 1.0);
    fill(flat, [](const Point&) { return 1.0; });
    ChangepReport ro = changep_error_check(flat, find_exponent("inv_log"));
    CHECK(ro.pass);
    CHECK(ro.fitted_c == 1.0);

    // rejected inputs: out-of-range values, non-Lebesgue weights, no limit
    GridFunction bad = flat;
    bad.values[0] = 1.5;
    CHECK_THROWS_AS(changep_error_check(bad, find_exponent("inv_log")), std::invalid_argument);
    GridFunction gw = gauss_grid_1d();
    CHECK_THROWS_AS(changep_error_check(gw, find_exponent("inv_square")), std::invalid_argument);
    CHECK_THROWS_AS(changep_error_check(flat, find_exponent("step_jump")), std::invalid_argument);
}
