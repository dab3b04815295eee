// Exponent spec checks: closed-form values frozen by hand, exact oscillation
// against a dense sampling oracle, conjugation identities, and validation.

#include <catch_amalgamated.hpp>
#include <cmath>

#include "gaussvar/exponent.hpp"
#include "gaussvar/registry.hpp"

using namespace gaussvar;

TEST_CASE("registry entries validate and have unique names") {
    const auto& reg = exponent_registry();
    REQUIRE(reg.size() >= 10);
    for (std::size_t i = 0; i < reg.size(); ++i) {
        CHECK_NOTHROW(validate(reg[i]));
        for (std::size_t j = i + 1; j < reg.size(); ++j) CHECK(reg[i].name != reg[j].name);
    }
    CHECK_THROWS_AS(find_exponent("no_such_entry"), std::invalid_argument);
}

TEST_CASE("pointwise values match hand computations") {
    const auto& isq = find_exponent("inv_square");
    CHECK(evaluate(isq, Point{2.0}) == 2.25);       // 2 + 1/4
    CHECK(evaluate(isq, Point{0.1}) == 3.0);        // clipped from 102
    CHECK(evaluate(isq, Point{0.0}) == 3.0);        // +inf base clips to the top
    CHECK(evaluate(isq, Point{-2.0}) == 2.25);      // radial

    const auto& ilg = find_exponent("inv_log");
    double want = 2.0 + 1.0 / std::log(std::exp(1.0) + 3.0);
    CHECK_THAT(evaluate(ilg, Point{3.0}), Catch::Matchers::WithinRel(want, 1e-15));

    const auto& tab = find_exponent("inv_abs_tail");
    CHECK(evaluate(tab, Point{0.5}) == 3.0);
    CHECK_THAT(evaluate(tab, Point{4.0}), Catch::Matchers::WithinRel(2.25, 1e-15));

    const auto& sj = find_exponent("step_jump");
    CHECK(evaluate(sj, Point{-0.001}) == 2.0);
    CHECK(evaluate(sj, Point{0.0}) == 3.0);         // boundary belongs to the upper side
    CHECK(evaluate(sj, Point{0.7}) == 3.0);

    CHECK_THROWS_AS(evaluate(isq, Point{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("validation rejects malformed specs") {
    ExponentSpec s = find_exponent("inv_square");
    s.clip_lo = 0.9;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);

    ExponentSpec t = find_exponent("table_bump");
    t.table.r = {0.0, 2.0, 1.0, 3.0};
    CHECK_THROWS_AS(validate(t), std::invalid_argument);

    ExponentSpec j = find_exponent("step_jump");
    j.jump_normal = {2.0};
    CHECK_THROWS_AS(validate(j), std::invalid_argument);
    j = find_exponent("step_jump_2d");
    j.jump_normal = {1.0};
    CHECK_THROWS_AS(validate(j), std::invalid_argument);
}

TEST_CASE("global range and limit at infinity") {
    auto r = global_range(find_exponent("inv_square"));
    CHECK(r.p_minus == 2.0);
    CHECK(r.p_plus == 3.0);
    CHECK(p_limit(find_exponent("inv_square")).value() == 2.0);
    CHECK(p_limit(find_exponent("table_bump")).value() == 2.4);
    CHECK_FALSE(p_limit(find_exponent("step_jump")).has_value());

    // clip active at infinity discards the limit
    ExponentSpec s = find_exponent("inv_square");
    s.clip_lo = 2.5;
    CHECK_FALSE(p_limit(s).has_value());

    auto rj = global_range(find_exponent("step_jump"));
    CHECK(rj.p_minus == 2.0);
    CHECK(rj.p_plus == 3.0);
}

TEST_CASE("conjugation inverts pointwise and reverses ranges") {
    for (const char* name : {"const_4", "inv_square", "inv_log", "table_bump", "step_jump"}) {
        const auto& s = find_exponent(name);
        auto sc = conjugate_exponent(s);
        for (double x : {-3.0, -0.4, 0.0, 0.2, 1.7, 8.0}) {
            Point p{x};
            CHECK_THAT(evaluate(sc, p),
                       Catch::Matchers::WithinRel(conjugate(evaluate(s, p)), 1e-15));
        }
        CHECK_THAT(p_min(sc), Catch::Matchers::WithinRel(conjugate(p_max(s)), 1e-15));
        CHECK_THAT(p_max(sc), Catch::Matchers::WithinRel(conjugate(p_min(s)), 1e-15));
        auto scc = conjugate_exponent(sc);
        CHECK(evaluate(scc, Point{0.3}) == evaluate(s, Point{0.3}));
    }
    ExponentSpec one;
    one.kind = ExponentKind::constant;
    one.value = 1.0;
    one.clip_lo = 1.0;
    CHECK_THROWS_AS(conjugate_exponent(one), std::domain_error);
}

TEST_CASE("exact oscillation on hand-worked balls") {
    // table_bump on the ball [0.5, 2.5]: interior knots 1 (2.8) and 2 (2.4),
    // endpoint values 2.5 and 2.4
    auto o = oscillation(find_exponent("table_bump"), Ball({1.5}, 1.0));
    CHECK_THAT(o.p_minus, Catch::Matchers::WithinAbs(2.4, 1e-15));
    CHECK_THAT(o.p_plus, Catch::Matchers::WithinAbs(2.8, 1e-15));

    // step jump: fully below, straddling, boundary touch
    const auto& sj = find_exponent("step_jump");
    auto below = oscillation(sj, Ball({-2.0}, 1.0));
    CHECK(below.p_minus == 2.0);
    CHECK(below.p_plus == 2.0);
    auto straddle = oscillation(sj, Ball({0.2}, 1.0));
    CHECK(straddle.p_minus == 2.0);
    CHECK(straddle.p_plus == 3.0);
    auto touch = oscillation(sj, Ball({-1.0}, 1.0));  // touches {0} from the left
    CHECK(touch.p_minus == 2.0);
    CHECK(touch.p_plus == 3.0);
    auto above = oscillation(sj, Ball({1.5}, 1.0));
    CHECK(above.p_minus == 3.0);
    CHECK(above.p_plus == 3.0);

    // inverse-square over a ball through the origin hits the upper clip
    auto oc = oscillation(find_exponent("inv_square"), Ball({0.5}, 1.0));
    CHECK(oc.p_plus == 3.0);
    CHECK_THAT(oc.p_minus, Catch::Matchers::WithinAbs(2.0 + 1.0 / 2.25, 1e-15));
}

TEST_CASE("exact oscillation contains and matches the sampled oracle") {
    Rng rng(derive_seed(11, "osc-oracle"));
    for (const auto& s : exponent_registry()) {
        for (int rep = 0; rep < 12; ++rep) {
            Point c(s.dim);
            for (auto& v : c) v = rng.uniform(-4.0, 4.0);
            double r = rng.log_uniform(0.05, 3.0);
            Ball ball(c, r);
            auto exact = oscillation(s, ball);
            auto samp = sampled_oscillation(s, ball, 64, derive_seed(11, s.name));
            // containment is unconditional
            CHECK(exact.p_minus <= samp.p_minus + 1e-12);
            CHECK(samp.p_plus <= exact.p_plus + 1e-12);
            // the sampler resolves smooth profiles to grid accuracy; a jump can
            // only be missed when the overlap sliver is below grid resolution
            if (s.kind != ExponentKind::step_jump) {
                CHECK(samp.p_minus - exact.p_minus <= 0.2 * r + 1e-9);
                CHECK(exact.p_plus - samp.p_plus <= 0.2 * r + 1e-9);
            }
        }
    }
}

TEST_CASE("oscillation endpoints and conjugation commute as a Holder pair") {
    Rng rng(derive_seed(11, "osc-conj"));
    for (const auto& s : exponent_registry()) {
        if (!(p_min(s) > 1.0)) continue;
        auto sc = conjugate_exponent(s);
        for (int rep = 0; rep < 20; ++rep) {
            Point c(s.dim);
            for (auto& v : c) v = rng.uniform(-6.0, 6.0);
            Ball ball(c, rng.log_uniform(0.01, 5.0));
            auto o = oscillation(s, ball);
            auto oc = oscillation(sc, ball);
            CHECK_THAT(oc.p_plus, Catch::Matchers::WithinRel(conjugate(o.p_minus), 1e-12));
            CHECK_THAT(oc.p_minus, Catch::Matchers::WithinRel(conjugate(o.p_plus), 1e-12));
        }
    }
}
