// Spectral algebra checks. The module is the oracle for the rest of the
// project, so its own tests lean on independent routes: quadrature for
// orthonormality and adjointness, finite differences for the ladder action,
// closed-form single-basis formulas against the composed operator route, and
// hand-computed polynomial values.

#include <catch_amalgamated.hpp>
#include <cmath>

#include "gaussvar/hermite.hpp"

using namespace gaussvar;

namespace {

HermiteExpansion random_expansion(Rng& rng, int dim, int cap, bool zero_mean = false) {
    HermiteExpansion f;
    f.dim = dim;
    std::vector<int> a(dim, 0);
    std::function<void(int, int)> rec = [&](int axis, int remaining) {
        if (axis == dim) {
            if (rng.uniform() < 0.75) f.add(MultiIndex(a), rng.uniform(-1.0, 1.0));
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            a[axis] = v;
            rec(axis + 1, remaining - v);
        }
        a[axis] = 0;
    };
    rec(0, cap);
    if (zero_mean) f.coeffs.erase(MultiIndex::zero(dim));
    if (f.coeffs.empty()) f.add(MultiIndex::unit(dim, 0), 0.5);
    return f;
}

// quadrature inner product of two pointwise evaluators against gamma_d
double quad_inner(const HermiteExpansion& f, const HermiteExpansion& g, int order) {
    const QuadNodes& q = gauss_hermite_nodes(order);
    int d = f.dim;
    double norm = std::pow(M_PI, -0.5 * d);
    double s = 0.0;
    std::vector<double> x(d);
    std::function<void(int, double)> loop = [&](int axis, double w) {
        if (axis == d) {
            s += w * f.eval(x) * g.eval(x);
            return;
        }
        for (std::size_t j = 0; j < q.x.size(); ++j) {
            x[axis] = q.x[j];
            loop(axis + 1, w * q.w[j]);
        }
    };
    loop(0, 1.0);
    return s * norm;
}

}  // namespace

TEST_CASE("raw Hermite values match hand computations") {
    CHECK(hermite_value(0, 3.7) == 1.0);
    CHECK(hermite_value(1, 0.5) == 1.0);        // H_1(x) = 2x
    CHECK(hermite_value(2, 1.0) == 2.0);        // H_2(x) = 4x^2 - 2
    CHECK(hermite_value(3, 2.0) == 40.0);       // H_3(x) = 8x^3 - 12x
    CHECK_THROWS_AS(hermite_value(-1, 0.0), std::invalid_argument);
}

TEST_CASE("norm squares are prod 2^k k!") {
    CHECK(hermite_norm_sq(MultiIndex({3})) == 48.0);        // 2^3 3!
    CHECK(hermite_norm_sq(MultiIndex({1, 1})) == 4.0);      // 2 * 2
    CHECK(hermite_norm_sq(MultiIndex({0, 0, 0})) == 1.0);
}

TEST_CASE("orthonormal column agrees with raw values over the norm") {
    std::vector<double> col;
    for (double x : {-1.3, 0.0, 0.41, 2.2}) {
        hermite_orthonormal_column(9, x, col);
        for (int n = 0; n <= 9; ++n) {
            double want = hermite_value(n, x) / std::sqrt(hermite_norm_sq(MultiIndex({n})));
            CHECK_THAT(col[n], Catch::Matchers::WithinRel(want, 1e-12));
        }
    }
}

TEST_CASE("basis is orthonormal under quadrature") {
    Rng rng(derive_seed(7, "orthonormality"));
    for (int d = 1; d <= 3; ++d) {
        for (int rep = 0; rep < 6; ++rep) {
            std::vector<int> a(d), b(d);
            for (int i = 0; i < d; ++i) {
                a[i] = rng.uniform_int(5);
                b[i] = rng.uniform_int(5);
            }
            MultiIndex ma(a), mb(b);
            double got = quad_inner(HermiteExpansion::basis(ma), HermiteExpansion::basis(mb), 14);
            double want = (ma == mb) ? 1.0 : 0.0;
            CHECK_THAT(got, Catch::Matchers::WithinAbs(want, 1e-12));
        }
    }
}

TEST_CASE("expansion inner product equals quadrature inner product") {
    Rng rng(derive_seed(7, "inner"));
    for (int d : {1, 2}) {
        auto f = random_expansion(rng, d, 5);
        auto g = random_expansion(rng, d, 5);
        CHECK_THAT(inner_product(f, g), Catch::Matchers::WithinAbs(quad_inner(f, g, 16), 1e-11));
    }
}

TEST_CASE("lowering is the scaled derivative") {
    // finite-difference oracle: lowering f = f' / sqrt(2) in one dimension
    Rng rng(derive_seed(7, "ladder-fd"));
    auto f = random_expansion(rng, 1, 8);
    auto lf = apply_lowering(0, f);
    const double h = 1e-6;
    for (double x : {-1.7, -0.2, 0.9, 2.4}) {
        Point xm{x - h}, xp{x + h}, xx{x};
        double fd = (f.eval(xp) - f.eval(xm)) / (2.0 * h) / std::sqrt(2.0);
        CHECK_THAT(lf.eval(xx), Catch::Matchers::WithinAbs(fd, 1e-6));
    }
}

TEST_CASE("ladder action on basis elements") {
    MultiIndex a({2, 3});
    auto low = apply_lowering(1, HermiteExpansion::basis(a));
    REQUIRE(low.coeffs.size() == 1);
    CHECK_THAT(low.coeff(MultiIndex({2, 2})), Catch::Matchers::WithinRel(std::sqrt(3.0), 1e-15));
    auto rai = apply_raising(0, HermiteExpansion::basis(a));
    REQUIRE(rai.coeffs.size() == 1);
    CHECK_THAT(rai.coeff(MultiIndex({3, 3})), Catch::Matchers::WithinRel(std::sqrt(3.0), 1e-15));
    CHECK(apply_lowering(0, HermiteExpansion::basis(MultiIndex({0, 1}))).coeffs.empty());
}

TEST_CASE("raising is the Gaussian adjoint of lowering") {
    Rng rng(derive_seed(7, "adjoint"));
    for (int d : {1, 2}) {
        auto f = random_expansion(rng, d, 6);
        auto g = random_expansion(rng, d, 6);
        for (int i = 0; i < d; ++i) {
            double lhs = inner_product(apply_lowering(i, f), g);
            double rhs = inner_product(f, apply_raising(i, g));
            CHECK_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-13));
        }
    }
}

TEST_CASE("ladder commutator is the identity") {
    Rng rng(derive_seed(7, "commutator"));
    for (int d : {1, 3}) {
        auto f = random_expansion(rng, d, 6);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                auto lhs = apply_lowering(i, apply_raising(j, f));
                auto rhs = apply_raising(j, apply_lowering(i, f));
                auto comm = axpy(-1.0, rhs, lhs);
                double want = (i == j) ? 1.0 : 0.0;
                auto scaled = f;
                for (auto& [a, c] : scaled.coeffs) c *= want;
                CHECK(max_coeff_gap(comm, scaled) < 1e-13);
            }
        }
    }
}

TEST_CASE("generator equals summed raising-after-lowering") {
    Rng rng(derive_seed(7, "generator"));
    for (int d : {1, 2, 3}) {
        auto f = random_expansion(rng, d, 6);
        HermiteExpansion acc;
        acc.dim = d;
        for (int i = 0; i < d; ++i) acc = axpy(1.0, apply_raising(i, apply_lowering(i, f)), acc);
        CHECK(max_coeff_gap(acc, apply_generator(OuVariant::number, f)) < 1e-13);
        auto shifted = apply_generator(OuVariant::shifted, f);
        CHECK(max_coeff_gap(shifted, axpy(1.0, f, apply_generator(OuVariant::number, f))) < 1e-13);
    }
}

TEST_CASE("semigroup is diagonal, multiplicative, and rejects negative time") {
    Rng rng(derive_seed(7, "semigroup"));
    auto f = random_expansion(rng, 2, 6);
    auto a = ou_semigroup(OuVariant::number, 0.3, ou_semigroup(OuVariant::number, 0.45, f));
    auto b = ou_semigroup(OuVariant::number, 0.75, f);
    CHECK(max_coeff_gap(a, b) < 1e-13);
    CHECK(max_coeff_gap(ou_semigroup(OuVariant::shifted, 0.0, f), f) == 0.0);
    // shifted variant is e^{-t} times the number variant
    auto c = ou_semigroup(OuVariant::shifted, 0.6, f);
    auto dref = ou_semigroup(OuVariant::number, 0.6, f);
    for (auto& [idx, coeff] : dref.coeffs) coeff *= std::exp(-0.6);
    CHECK(max_coeff_gap(c, dref) < 1e-13);
    CHECK_THROWS_AS(ou_semigroup(OuVariant::number, -0.1, f), std::domain_error);
}

TEST_CASE("fractional integrals compose additively in the order") {
    Rng rng(derive_seed(7, "fractional"));
    auto f = random_expansion(rng, 2, 6, /*zero_mean=*/true);
    auto a = fractional_integral(OuVariant::number, 0.3, fractional_integral(OuVariant::number, 0.45, f));
    auto b = fractional_integral(OuVariant::number, 0.75, f);
    CHECK(max_coeff_gap(a, b) < 1e-13);
    auto g = random_expansion(rng, 2, 6);  // mean allowed for shifted
    auto c = fractional_integral(OuVariant::shifted, 0.5, fractional_integral(OuVariant::shifted, 0.25, g));
    auto d = fractional_integral(OuVariant::shifted, 0.75, g);
    CHECK(max_coeff_gap(c, d) < 1e-13);
    CHECK(max_coeff_gap(fractional_integral(OuVariant::number, 0.0, g), g) == 0.0);

    HermiteExpansion with_mean = HermiteExpansion::basis(MultiIndex::zero(2), 1.0);
    CHECK_THROWS_AS(fractional_integral(OuVariant::number, 0.5, with_mean), std::domain_error);
}

TEST_CASE("riesz transforms: composed route equals closed form on basis elements") {
    Rng rng(derive_seed(7, "riesz-dual"));
    for (int d : {1, 2, 3}) {
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<int> av(d, 0), bv(d, 0);
            for (int i = 0; i < d; ++i) {
                av[i] = rng.uniform_int(3);
                bv[i] = rng.uniform_int(4);
            }
            MultiIndex alpha(av), beta(bv);
            auto base = HermiteExpansion::basis(beta);
            for (RieszVariant v : {RieszVariant::lowering, RieszVariant::raising}) {
                if (v == RieszVariant::lowering && beta.order() == 0) continue;
                auto via_ops = riesz_transform(v, alpha, base);
                auto closed = riesz_on_basis(v, alpha, beta);
                CHECK(max_coeff_gap(via_ops, closed) < 1e-13);
            }
        }
    }
}

TEST_CASE("first-order raising transform in one dimension shifts the basis exactly") {
    for (int n = 0; n <= 9; ++n) {
        auto out = riesz_transform(RieszVariant::raising, MultiIndex({1}),
                                   HermiteExpansion::basis(MultiIndex({n})));
        REQUIRE(out.coeffs.size() == 1);
        CHECK_THAT(out.coeff(MultiIndex({n + 1})), Catch::Matchers::WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("summed raising-lowering transforms reproduce the zero-mean part") {
    Rng rng(derive_seed(7, "riesz-identity"));
    for (int d : {1, 2, 3}) {
        auto f = random_expansion(rng, d, 6);
        auto got = riesz_identity_sum(f);
        auto want = f;
        want.coeffs.erase(MultiIndex::zero(d));
        CHECK(max_coeff_gap(got, want) < 1e-13);
    }
}

TEST_CASE("analyze inverts synthesis up to quadrature accuracy") {
    Rng rng(derive_seed(7, "analyze"));
    for (int d : {1, 2, 3}) {
        int cap = d == 1 ? 10 : (d == 2 ? 7 : 5);
        auto f = random_expansion(rng, d, cap);
        auto back = analyze([&](std::span<const double> x) { return f.eval(x); }, d, cap);
        CHECK(max_coeff_gap(f, back) < 1e-11);
    }
    CHECK_THROWS_AS(analyze([](std::span<const double>) { return 0.0; }, 0, 3),
                    std::invalid_argument);
}
