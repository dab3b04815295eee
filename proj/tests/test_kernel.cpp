// Kernel profile and geometry closed forms, agreement of the two integral
// parameterizations, homogeneous-part oracles, annular principal values and
// their ladder stability, transform calibration against eigenfunction action,
// local/global split additivity, domination and global-bound reports, and the
// stability of the fitted bound constants.

#include <catch_amalgamated.hpp>
#include <cmath>
#include <map>

#include "gaussvar/kernel.hpp"

using namespace gaussvar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = 3.14159265358979323846;

double mixed_err(double got, double want) {
    return std::fabs(got - want) / std::max(0.2, std::fabs(want));
}

ExponentSpec constant_exponent(double v, int dim) {
    ExponentSpec s;
    s.kind = ExponentKind::constant;
    s.dim = dim;
    s.value = v;
    s.name = "const_kernel";
    return s;
}

// calibrations are expensive, so test cases share them
const KernelFamily& raising_family(int order) {
    static std::map<int, KernelFamily> cache;
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, calibrated_family(MultiIndex({order}), QuadratureConfig{})).first;
    return it->second;
}

const KernelCalibration& lowering_calibration(int order) {
    static std::map<int, KernelCalibration> cache;
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, calibrate_old(MultiIndex({order}), QuadratureConfig{})).first;
    return it->second;
}

ScalarField basis_field(const MultiIndex& alpha) {
    return field_from_expansion(HermiteExpansion::basis(alpha));
}

}  // namespace

TEST_CASE("psi and phi profiles match their closed forms") {
    for (double t : {0.0, 0.3, 0.7, 0.99}) CHECK_THAT(psi_m(2.0, t), WithinAbs(1.0, 1e-15));

    for (double m : {1.0, 2.0, 3.0, 4.0, 5.0})
        CHECK_THAT(phi_m(m, 0.0), WithinRel(std::pow(2.0, -0.5 * (m - 2.0)), 1e-14));
    CHECK_THAT(phi_m(4.0, 0.0), WithinAbs(0.5, 1e-15));

    auto [psi, phi] = psi_phi(3.0, 0.4);
    CHECK_THAT(psi, WithinRel(psi_m(3.0, 0.4), 1e-15));
    CHECK_THAT(phi, WithinRel(phi_m(3.0, 0.4), 1e-15));

    for (double m : {1.0, 2.0, 3.0, 5.0}) {
        double worst = 0.0;
        for (double t = 1e-6; t <= 0.9; t += 0.004) {
            double dev = std::fabs(phi_m(m, t) - phi_m(m, 0.0));
            worst = std::max(worst, dev * (1.0 - t) / t);
        }
        CHECK(worst < 5.0);
    }

    CHECK_THROWS_AS(psi_m(3.0, -0.1), std::domain_error);
    CHECK_THROWS_AS(psi_m(3.0, 1.0), std::domain_error);
}

TEST_CASE("u, ubar and the minimizing geometry") {
    Point x{0.7, -1.1}, y{1.4, 0.3};
    double shift = norm_sq(x) - norm_sq(y);
    for (double t : {0.05, 0.3, 0.8, 1.0})
        CHECK_THAT(ubar_value(x, y, t) - u_value(x, y, t), WithinAbs(shift, 1e-12));

    SECTION("negative correlation pins the minimum at t = 1") {
        Point xx{1.0, 0.4}, yy{-0.8, 0.3};
        KernelGeometry g = kernel_geometry(xx, yy);
        CHECK(g.b <= 0.0);
        CHECK(g.t0 == 1.0);
        CHECK_THAT(g.u0, WithinRel(norm_sq(yy), 1e-14));
        CHECK(u_value(xx, yy, 0.97) >= g.u0);
    }

    SECTION("worked positive-correlation pair") {
        Point xx{2.0, 0.0}, yy{3.0, 0.0};
        KernelGeometry g = kernel_geometry(xx, yy);
        CHECK_THAT(g.a, WithinRel(13.0, 1e-15));
        CHECK_THAT(g.b, WithinRel(12.0, 1e-15));
        CHECK_THAT(g.t0, WithinRel(5.0 / 9.0, 1e-12));
        CHECK_THAT(g.u0, WithinRel(5.0, 1e-12));
    }

    SECTION("t0 minimizes u and u0 is the minimum") {
        Point xx{0.9}, yy{1.7};
        KernelGeometry g = kernel_geometry(xx, yy);
        CHECK_THAT(u_value(xx, yy, g.t0), WithinRel(g.u0, 1e-10));
        for (double t = 0.02; t <= 1.0; t += 0.02) CHECK(u_value(xx, yy, t) >= g.u0 - 1e-12);
        CHECK(u_value(xx, yy, g.t0 * 0.98) >= g.u0);
        CHECK(u_value(xx, yy, std::min(1.0, g.t0 * 1.02)) >= g.u0);
    }

    Point zero{0.0, 0.0};
    CHECK_THROWS_AS(kernel_geometry(zero, zero), std::invalid_argument);
}

TEST_CASE("both kernel parameterizations agree") {
    QuadratureConfig cfg;
    struct Pair {
        Point x, y;
    };

    SECTION("one dimension, first and second order") {
        for (int order : {1, 2}) {
            KernelFamily fam = kernel_family(MultiIndex({order}));
            for (const Pair& p : {Pair{{0.3}, {1.1}}, Pair{{-0.7}, {0.4}}, Pair{{1.5}, {2.2}}}) {
                double tv = kernel_new(p.x, p.y, fam, cfg);
                double rv = kernel_new_r_form(p.x, p.y, fam, cfg);
                CHECK(std::fabs(tv - rv) <= 2e-9 * std::max(1.0, std::fabs(tv)));
            }
        }
    }

    SECTION("two dimensions") {
        KernelFamily fam = kernel_family(MultiIndex({1, 0}));
        Pair p{{0.5, 0.2}, {1.2, -0.3}};
        double tv = kernel_new(p.x, p.y, fam, cfg);
        double rv = kernel_new_r_form(p.x, p.y, fam, cfg);
        CHECK(std::fabs(tv - rv) <= 2e-9 * std::max(1.0, std::fabs(tv)));
    }
}

TEST_CASE("kernel parity follows the parity of the profile") {
    QuadratureConfig cfg;
    Point x{0.6}, y{1.3}, mx{-0.6}, my{-1.3};

    KernelFamily odd = kernel_family(MultiIndex({1}));
    double k = kernel_new(x, y, odd, cfg);
    CHECK(std::fabs(kernel_new(mx, my, odd, cfg) + k) <= 1e-12 * std::max(1.0, std::fabs(k)));

    KernelFamily even = kernel_family(MultiIndex({2}));
    k = kernel_new(x, y, even, cfg);
    CHECK(std::fabs(kernel_new(mx, my, even, cfg) - k) <= 1e-12 * std::max(1.0, std::fabs(k)));
}

TEST_CASE("far pairs underflow to an exact zero") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));
    Point x{1.0}, y{40.0};
    CHECK(kernel_geometry(x, y).u0 > 760.0);
    CHECK(kernel_new(x, y, fam, cfg) == 0.0);
    CHECK(kernel_new_r_form(x, y, fam, cfg) == 0.0);
}

TEST_CASE("kernel evaluation rejects malformed input") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));
    Point x{0.3};
    CHECK_THROWS_AS(kernel_new(x, x, fam, cfg), std::domain_error);

    QuadratureConfig bad = cfg;
    bad.tol = 0.0;
    CHECK_THROWS_AS(validate_quadrature(bad), std::invalid_argument);
    bad = cfg;
    bad.pv_radii = {0.5, 0.25};
    CHECK_THROWS_AS(validate_quadrature(bad), std::invalid_argument);
    bad = cfg;
    bad.pv_radii = {0.25, 0.5, 0.75};
    CHECK_THROWS_AS(validate_quadrature(bad), std::invalid_argument);

    KernelFamily broken = fam;
    broken.m = -1.0;
    CHECK_THROWS_AS(validate_family(broken), std::invalid_argument);
    CHECK_THROWS_AS(kernel_family(HermiteExpansion::basis(MultiIndex::zero(1)), 1.0),
                    std::invalid_argument);
}

TEST_CASE("homogeneous part scales like a classical kernel") {
    KernelFamily fam1 = kernel_family(MultiIndex({1}));
    Point z1{0.7};
    double base = homogeneous_kernel(fam1, z1);
    for (double lambda : {0.3, 2.0, 5.0}) {
        Point scaled{z1[0] * lambda};
        CHECK_THAT(homogeneous_kernel(fam1, scaled) * lambda, WithinRel(base, 1e-12));
    }

    KernelFamily fam2 = kernel_family(MultiIndex({1, 0}));
    Point z2{0.5, -0.8};
    double base2 = homogeneous_kernel(fam2, z2);
    Point scaled2{z2[0] * 2.5, z2[1] * 2.5};
    CHECK_THAT(homogeneous_kernel(fam2, scaled2) * 2.5 * 2.5, WithinRel(base2, 1e-12));

    Point origin{0.0};
    CHECK_THROWS_AS(homogeneous_kernel(fam1, origin), std::domain_error);
}

TEST_CASE("angular profile matches its closed forms") {
    SECTION("first order in one dimension") {
        KernelFamily fam = kernel_family(MultiIndex({1}));
        Point plus{1.0}, minus{-1.0};
        CHECK_THAT(homogeneous_omega(fam, plus), WithinRel(std::sqrt(2.0), 1e-10));
        CHECK_THAT(homogeneous_omega(fam, minus), WithinRel(-std::sqrt(2.0), 1e-10));
        CHECK_THAT(spherical_mean_omega(fam), WithinAbs(0.0, 1e-12));
    }

    SECTION("first order in the plane is a cosine") {
        KernelFamily fam = kernel_family(MultiIndex({1, 0}));
        double amp = 0.5 * std::sqrt(2.0 * pi);
        for (double theta : {0.0, pi / 3.0, 2.1}) {
            Point dir{std::cos(theta), std::sin(theta)};
            CHECK_THAT(homogeneous_omega(fam, dir), WithinAbs(amp * std::cos(theta), 1e-9));
        }
        CHECK_THAT(spherical_mean_omega(fam), WithinAbs(0.0, 1e-12));
    }

    SECTION("even profiles have no homogeneous part in one dimension") {
        KernelFamily fam = kernel_family(MultiIndex({2}));
        Point plus{1.0}, minus{-1.0};
        CHECK_THAT(homogeneous_omega(fam, plus), WithinAbs(0.0, 1e-12));
        CHECK_THAT(homogeneous_omega(fam, minus), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("annular principal values handle degenerate data") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));
    Point x{0.55};

    ScalarField zero;
    zero.eval = [](std::span<const double>) { return 0.0; };
    zero.support = Box::cube(1, 16.0);
    PvResult r = pv_apply(fam, zero, x, cfg);
    CHECK(r.value == 0.0);
    CHECK(r.cauchy);
    CHECK(r.partial.size() == cfg.pv_radii.size());
    CHECK_THAT(r.truncation_radius, WithinRel(8.0, 1e-15));

    ScalarField constant;
    constant.eval = [](std::span<const double>) { return 1.0; };
    constant.support = Box::cube(1, 16.0);
    CHECK_THAT(pv_homogeneous(fam, constant, x, cfg).value, WithinAbs(0.0, 1e-10));

    QuadratureConfig strict = cfg;
    strict.pv_tol = 1e-16;
    ScalarField f = basis_field(MultiIndex({2}));
    CHECK_THROWS_AS(pv_apply(fam, f, x, strict), std::runtime_error);
}

TEST_CASE("annular ladder limit is stable under the choice of radii") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));
    ScalarField f = basis_field(MultiIndex({2}));

    QuadratureConfig alt = cfg;
    alt.pv_radii = {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};

    for (double xv : {0.55, -1.2}) {
        Point x{xv};
        double a = pv_apply(fam, f, x, cfg).value;
        double b = pv_apply(fam, f, x, alt).value;
        CHECK(std::fabs(a - b) <= 2e-4 * std::max(1.0, std::fabs(a)));
    }
}

TEST_CASE("calibrated transform reproduces eigenfunction action") {
    QuadratureConfig cfg;

    SECTION("first order acts without an identity term") {
        const KernelFamily& fam = raising_family(1);
        CHECK_THAT(fam.scale, WithinRel(1.0 / (2.0 * pi), 1e-4));
        CHECK(std::fabs(fam.local) < 1e-5);
    }

    SECTION("second order needs the identity term") {
        const KernelFamily& fam = raising_family(2);
        CHECK_THAT(fam.scale, WithinRel(1.0 / std::sqrt(2.0 * pi), 1e-4));
        CHECK_THAT(fam.local, WithinAbs(-1.0, 1e-4));
    }

    SECTION("action on the eigenbasis") {
        for (int order : {1, 2}) {
            const KernelFamily& fam = raising_family(order);
            MultiIndex alpha({order});
            for (int bo : {0, 1, 3}) {
                MultiIndex beta({bo});
                ScalarField f = basis_field(beta);
                HermiteExpansion target = riesz_on_basis(RieszVariant::raising, alpha, beta);
                for (double xv : {-1.45, -0.3, 0.85, 2.05}) {
                    Point x{xv};
                    double got = riesz_kernel_apply(fam, f, x, cfg);
                    CHECK(mixed_err(got, target.eval(x)) < 1e-3);
                }
            }
        }
    }
}

TEST_CASE("calibrated lowering transform reproduces eigenfunction action") {
    QuadratureConfig cfg;

    SECTION("calibration constants") {
        const KernelCalibration& c1 = lowering_calibration(1);
        CHECK_THAT(c1.scale, WithinRel(1.0 / pi, 1e-4));
        CHECK(std::fabs(c1.local) < 1e-4);

        const KernelCalibration& c2 = lowering_calibration(2);
        CHECK_THAT(c2.scale, WithinRel(std::sqrt(2.0 / pi), 1e-4));
        CHECK_THAT(c2.local, WithinAbs(-1.0, 1e-4));
    }

    SECTION("action on the eigenbasis") {
        for (int order : {1, 2}) {
            const KernelCalibration& cal = lowering_calibration(order);
            MultiIndex alpha({order});
            for (int bo : {order, order + 2}) {
                MultiIndex beta({bo});
                ScalarField f = basis_field(beta);
                HermiteExpansion target = riesz_on_basis(RieszVariant::lowering, alpha, beta);
                for (double xv : {-0.7, 0.7, 1.5}) {
                    Point x{xv};
                    double got = riesz_kernel_apply_old(alpha, cal, f, x, cfg);
                    CHECK(mixed_err(got, target.eval(x)) < 5e-4);
                }
            }
        }
    }
}

TEST_CASE("planar transform spot check") {
    QuadratureConfig fast;
    fast.n_theta = 16;
    fast.tol = 1e-8;
    fast.pv_radii.pop_back();

    MultiIndex alpha({1, 0});
    KernelFamily fam = calibrated_family(alpha, fast);
    CHECK_THAT(fam.scale, WithinRel(0.5 * std::pow(pi, -1.5), 1e-3));

    MultiIndex beta({0, 0});
    ScalarField f = basis_field(beta);
    HermiteExpansion target = riesz_on_basis(RieszVariant::raising, alpha, beta);
    for (double xv : {-0.9, 0.45}) {
        Point x{xv, 0.35};
        CHECK(mixed_err(riesz_kernel_apply(fam, f, x, fast), target.eval(x)) < 5e-3);
    }
}

TEST_CASE("local and global parts recombine to the annular limit") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));
    ScalarField f = basis_field(MultiIndex({1}));

    for (double xv : {0.8, -1.3}) {
        Point x{xv};
        SplitResult split = local_global_split(fam, f, x, cfg);
        double whole = pv_apply(fam, f, x, cfg).value;
        CHECK(std::fabs(split.local_part + split.global_part - whole) <=
              1e-3 * std::max(1.0, std::fabs(whole)));
    }
}

TEST_CASE("restricted maximal averages dominate the local part") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));
    ScalarField f = basis_field(MultiIndex({1}));

    std::vector<Ball> family = {Ball({0.6}, 0.5), Ball({-0.5}, 0.5)};
    std::vector<Ball> hats;
    for (const Ball& b : family) hats.push_back(dilate_admissible(b));
    std::vector<Point> sample = {{0.55}, {-0.45}, {3.0}};

    KernelCheckReport rep = local_domination_check(fam, f, sample, family, hats, cfg);
    CHECK(rep.pass);
    CHECK(rep.n_samples == 3);
    CHECK(rep.fitted_constant > 0.0);
    CHECK(rep.fitted_constant < 10.0);

    std::vector<Ball> mismatched = {family[0]};
    CHECK_THROWS_AS(local_domination_check(fam, f, sample, family, mismatched, cfg),
                    std::invalid_argument);
}

TEST_CASE("admissible growth range of the global comparison") {
    CHECK_THAT(global_eps_limit(2.0, 1), WithinRel(0.25, 1e-15));
    CHECK_THAT(global_eps_limit(2.0, 2), WithinRel(0.25, 1e-15));
    CHECK_THAT(global_eps_limit(4.0, 1), WithinRel(0.375, 1e-15));
    CHECK_THAT(alpha_infinity(2.0, 0.05), WithinRel(0.4, 1e-12));
    CHECK_THAT(alpha_infinity(2.0, 1e-9), WithinAbs(0.5, 1e-8));
}

TEST_CASE("global comparison majorant stays finite") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));
    ScalarField f = basis_field(MultiIndex({1}));
    ExponentSpec pspec = constant_exponent(2.0, 1);
    std::vector<Point> sample = {{0.5}, {-1.2}, {2.0}};

    GlobalBoundReport rep = global_bound_check(fam, pspec, 0.05, f, sample, cfg);
    CHECK(rep.pass);
    CHECK(rep.n_samples == 3);
    CHECK(std::isfinite(rep.fitted_c));
    CHECK(rep.fitted_c >= 0.0);
    CHECK(std::isfinite(rep.d_sup));
    CHECK_THAT(rep.alpha_inf, WithinRel(0.4, 1e-12));

    CHECK_THROWS_AS(global_bound_check(fam, pspec, 0.3, f, sample, cfg), std::invalid_argument);
    ExponentSpec wrong_dim = constant_exponent(2.0, 2);
    CHECK_THROWS_AS(global_bound_check(fam, wrong_dim, 0.05, f, sample, cfg), std::invalid_argument);
}

TEST_CASE("fitted bound constants are stable under sample doubling") {
    QuadratureConfig cfg;
    KernelFamily fam = kernel_family(MultiIndex({1}));

    BoundsExpReport rep = boundsexp_check(fam, 0.05, 150, 7, cfg);
    CHECK(rep.pass);
    CHECK(rep.c_eps_bneg > 0.0);
    CHECK(rep.c_eps_bpos > 0.0);
    CHECK(rep.n_bneg == 300);
    CHECK(rep.n_bpos == 300);
    CHECK(rep.delta_bneg < 0.10);
    CHECK(rep.delta_bpos < 0.10);

    CHECK_THROWS_AS(boundsexp_check(fam, 1.5, 10, 7, cfg), std::invalid_argument);
    KernelFamily planar = kernel_family(MultiIndex({1, 0}));
    CHECK_THROWS_AS(boundsexp_check(planar, 0.6, 10, 7, cfg), std::invalid_argument);
    CHECK_THROWS_AS(boundsexp_check(fam, 0.05, 1, 7, cfg), std::invalid_argument);
}

TEST_CASE("growth envelopes are finite for polynomial profiles") {
    GrowthReport rep = growth_report(kernel_family(MultiIndex({2})));
    CHECK(rep.n_samples > 0);
    CHECK(rep.c_value > 0.0);
    CHECK(rep.c_value < 1e3);
    CHECK(rep.c_gradient > 0.0);
    CHECK(rep.c_gradient < 1e3);
}

TEST_CASE("expansion derivative lowers each axis degree") {
    HermiteExpansion e = HermiteExpansion::basis(MultiIndex({3}));
    HermiteExpansion de = partial_derivative(e, 0);
    CHECK_THAT(de.coeff(MultiIndex({2})), WithinRel(std::sqrt(6.0), 1e-15));

    HermiteExpansion mixed = HermiteExpansion::basis(MultiIndex({1, 2}));
    HermiteExpansion d1 = partial_derivative(mixed, 1);
    CHECK_THAT(d1.coeff(MultiIndex({1, 1})), WithinRel(2.0, 1e-15));
    CHECK_THROWS_AS(partial_derivative(mixed, 2), std::invalid_argument);
}
