// Measure module checks. Oracles: std::erf for one-dimensional balls,
// chi-square closed forms for centered balls in d = 2,3,4, an asymptotic
// Gaussian tail series for far balls in log scale, and Monte-Carlo agreement
// within standard-error bands for off-center balls.

#include <catch_amalgamated.hpp>
#include <cmath>

#include "gaussvar/gauss_measure.hpp"

using namespace gaussvar;

namespace {

// log int_a^inf e^{-y^2} dy for large a, by the asymptotic series
double log_gauss_tail(double a) {
    double a2 = a * a;
    double corr = -1.0 / (2.0 * a2) + 3.0 / (4.0 * a2 * a2) - 15.0 / (8.0 * a2 * a2 * a2);
    return -a2 - std::log(2.0 * a) + std::log1p(corr);
}

}  // namespace

TEST_CASE("one-dimensional ball measures match erf") {
    // frozen: gamma_1(B(0,1)) = erf(1)
    CHECK_THAT(gaussian_ball_measure(Ball({0.0}, 1.0)),
               Catch::Matchers::WithinAbs(0.8427007929497149, 1e-12));
    for (double c : {0.0, 0.7, 2.0, -3.1}) {
        for (double r : {0.25, 1.0, 2.5}) {
            double want = 0.5 * (std::erf(c + r) - std::erf(c - r));
            CHECK_THAT(gaussian_ball_measure(Ball({c}, r)), Catch::Matchers::WithinRel(want, 1e-10));
        }
    }
}

TEST_CASE("centered balls match chi-square closed forms in higher dimension") {
    for (double r : {0.4, 1.0, 1.9}) {
        double r2 = r * r;
        CHECK_THAT(gaussian_ball_measure(Ball({0.0, 0.0}, r)),
                   Catch::Matchers::WithinRel(-std::expm1(-r2), 1e-10));
        double want3 = std::erf(r) - 2.0 * r * std::exp(-r2) / std::sqrt(M_PI);
        CHECK_THAT(gaussian_ball_measure(Ball({0.0, 0.0, 0.0}, r)),
                   Catch::Matchers::WithinRel(want3, 1e-9));
    }
}

TEST_CASE("far balls are handled in log scale where linear scale underflows") {
    // gamma_1([29,31]): the erf difference is 1-1 in doubles, the tail series
    // gives the log value to ~1e-10
    double got = gaussian_ball_log_measure(Ball({30.0}, 1.0));
    double want = log_gauss_tail(29.0) - 0.5 * std::log(M_PI);
    CHECK_THAT(got, Catch::Matchers::WithinAbs(want, 1e-7));
    CHECK(gaussian_ball_measure(Ball({30.0}, 1.0)) == 0.0);  // honest underflow

    // d=2 far ball, compare against a shifted reference ball via the density
    // sandwich e^{-(q+2r)^2} |B| <= pi^{d/2} gamma(B) <= e^{-q^2} |B|
    Ball far2({40.0, 0.0}, 0.5);
    double lg = gaussian_ball_log_measure(far2);
    double vol = std::exp(lebesgue_ball_log_measure(far2));
    double hi = -std::pow(39.5, 2) + std::log(vol) - std::log(M_PI);
    double lo = -std::pow(40.5, 2) + std::log(vol) - std::log(M_PI);
    CHECK(lg <= hi + 1e-9);
    CHECK(lg >= lo - 1e-9);
}

TEST_CASE("lebesgue ball volumes") {
    CHECK_THAT(std::exp(lebesgue_ball_log_measure(Ball({0.0}, 3.0))),
               Catch::Matchers::WithinRel(6.0, 1e-13));
    CHECK_THAT(std::exp(lebesgue_ball_log_measure(Ball({1.0, 1.0}, 2.0))),
               Catch::Matchers::WithinRel(4.0 * M_PI, 1e-13));
    CHECK_THAT(std::exp(lebesgue_ball_log_measure(Ball({0.0, 0.0, 5.0}, 1.0))),
               Catch::Matchers::WithinRel(4.0 * M_PI / 3.0, 1e-13));
}

TEST_CASE("monte carlo agrees with quadrature for d <= 3 and closed forms for d = 4") {
    Rng seed_src(derive_seed(23, "mc"));
    for (int d = 1; d <= 3; ++d) {
        Point c(d, 0.0);
        c[0] = 0.8;
        if (d > 1) c[d - 1] = -1.2;
        Ball b(c, 1.1);
        auto mc = gaussian_ball_measure_mc(b, 400000, derive_seed(23, "mc-d"));
        double quad = gaussian_ball_measure(b);
        CHECK(std::fabs(mc.value - quad) <= 3.5 * mc.std_error);
    }
    // d=4 centered: gamma_4(B(0,R)) = 1 - e^{-R^2}(1 + R^2)
    double R = 1.3, R2 = R * R;
    auto mc4 = gaussian_ball_measure_mc(Ball({0.0, 0.0, 0.0, 0.0}, R), 400000,
                                        derive_seed(23, "mc-4"));
    double want4 = 1.0 - std::exp(-R2) * (1.0 + R2);
    CHECK(std::fabs(mc4.value - want4) <= 3.5 * mc4.std_error);
    CHECK_THROWS_AS(gaussian_ball_log_measure(Ball({0.0, 0.0, 0.0, 0.0}, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("nearest point to the origin") {
    auto q = nearest_point(Ball({3.0, 4.0}, 1.0));  // |c| = 5, shrink by 1/5
    CHECK_THAT(q[0], Catch::Matchers::WithinAbs(2.4, 1e-14));
    CHECK_THAT(q[1], Catch::Matchers::WithinAbs(3.2, 1e-14));
    CHECK(norm(nearest_point(Ball({0.3, 0.0}, 0.5))) == 0.0);  // contains the origin
}

TEST_CASE("lower-bound shapes are exhaustive and positive") {
    CHECK(gaussian_ball_lower_shape(Ball({0.5}, 0.3)).case_tag == 1);
    CHECK(gaussian_ball_lower_shape(Ball({0.0, 0.0}, 2.0)).case_tag == 2);
    CHECK(gaussian_ball_lower_shape(Ball({5.0}, 1.0)).case_tag == 3);

    Rng rng(derive_seed(23, "shapes"));
    for (int rep = 0; rep < 400; ++rep) {
        int d = 1 + rng.uniform_int(3);
        Point c(d);
        for (auto& v : c) v = rng.uniform(-20.0, 20.0);
        Ball b(c, rng.log_uniform(1e-4, 1e2));
        auto s = gaussian_ball_lower_shape(b);
        REQUIRE((s.case_tag >= 1 && s.case_tag <= 3));
        CHECK(std::isfinite(s.log_shape));
        // re-derive the case condition from the ball itself
        double q = norm(nearest_point(b));
        if (s.case_tag == 1) CHECK(b.radius <= std::min(1.0, q >= 1.0 ? 1.0 / q : 1.0));
        if (s.case_tag == 2) {
            CHECK(q < 1.0);
            CHECK(b.radius > 1.0);
        }
        if (s.case_tag == 3) {
            CHECK(q >= 1.0);
            CHECK(b.radius > 1.0 / q);
        }
    }
}

TEST_CASE("measured log mass dominates the shape with a case-dependent slack") {
    // loose a-priori constants derived from the density sandwich; the tight
    // single-constant fit lives in the acceptance suite
    Rng rng(derive_seed(23, "shape-fit"));
    for (int rep = 0; rep < 300; ++rep) {
        int d = 1 + rng.uniform_int(3);
        Point c(d);
        for (auto& v : c) v = rng.uniform(-15.0, 15.0);
        Ball b(c, rng.log_uniform(1e-3, 30.0));
        auto s = gaussian_ball_lower_shape(b);
        double lg = gaussian_ball_log_measure(b);
        double slack = s.case_tag == 1 ? std::log(1e-6) : std::log(1e-5);
        CHECK(lg >= s.log_shape + slack);
    }
}

TEST_CASE("far regime shape") {
    Ball b({5.0}, 1.0);
    REQUIRE(in_far_regime(b));
    double want = -16.0 - std::log(4.0);  // r > q correction vanishes... r=1 < q=4
    want += 0.0 * 1.0;                    // d=1: exponent (d-1)/2 = 0
    CHECK_THAT(far_ball_lower_log_shape(b), Catch::Matchers::WithinAbs(want, 1e-12));
    Ball b2({5.0, 0.0}, 0.5);  // q = 4.5, d=2: correction (1/2) log(r/q)
    REQUIRE(in_far_regime(b2));
    double want2 = -4.5 * 4.5 - std::log(4.5) + 0.5 * std::log(0.5 / 4.5);
    CHECK_THAT(far_ball_lower_log_shape(b2), Catch::Matchers::WithinAbs(want2, 1e-12));
    CHECK_FALSE(in_far_regime(Ball({0.5}, 0.1)));
    CHECK_THROWS_AS(far_ball_lower_log_shape(Ball({0.5}, 0.1)), std::domain_error);

    // the refined far bound holds with a modest constant on sampled balls
    Rng rng(derive_seed(23, "far"));
    for (int rep = 0; rep < 200; ++rep) {
        int d = 1 + rng.uniform_int(3);
        Point c(d);
        c[0] = rng.uniform(1.5, 18.0);
        Ball b3(c, rng.log_uniform(0.05, 5.0));
        if (!in_far_regime(b3)) continue;
        CHECK(gaussian_ball_log_measure(b3) >= far_ball_lower_log_shape(b3) + std::log(1e-4));
    }
}

TEST_CASE("hyperbolic balls, dilates, admissible covers") {
    CHECK(hyperbolic_radius(Point{0.5}) == 1.0);
    CHECK(hyperbolic_radius(Point{4.0}) == 0.25);
    CHECK(hyperbolic_radius(Point{3.0, 4.0}) == 2.0 / 5.0);

    Ball b({3.0}, 0.2);
    Ball bh = dilate_admissible(b);
    CHECK_THAT(bh.radius, Catch::Matchers::WithinRel(0.2 + 1.0 / 2.8, 1e-13));

    // property: the hyperbolic ball of every point of B stays inside the dilate
    Rng rng(derive_seed(23, "dilate"));
    for (int rep = 0; rep < 100; ++rep) {
        int d = 1 + rng.uniform_int(2);
        Point c(d);
        for (auto& v : c) v = rng.uniform(-8.0, 8.0);
        Ball base(c, rng.log_uniform(0.05, 1.0) * hyperbolic_radius(c));
        Ball hat = dilate_admissible(base);
        for (int s = 0; s < 20; ++s) {
            Point y(d);
            Point dir = rng.direction(d);
            double t = base.radius * rng.uniform();
            for (int i = 0; i < d; ++i) y[i] = c[i] + t * dir[i];
            CHECK(dist(y, c) + hyperbolic_radius(y) <= hat.radius + 1e-9);
        }
    }

    // cover: admissible balls, covering the box
    Box box = Box::cube(2, 6.0);
    auto cover = admissible_cover(box, 1.0);
    CHECK(cover.size() >= 16);
    for (const auto& ball : cover) CHECK(is_admissible(ball, 1.0));
    for (int rep = 0; rep < 200; ++rep) {
        Point x = rng.point_in(box);
        bool covered = false;
        for (const auto& ball : cover) covered = covered || ball.contains(x);
        CHECK(covered);
    }
}
