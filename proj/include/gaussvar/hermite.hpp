#pragma once

// Hermite spectral algebra for the Gaussian measure
//     dgamma_d(x) = e^{-|x|^2} / pi^{d/2} dx.
//
// Physicists' Hermite polynomials H_n are orthogonal with
// ||H_n||^2_{L^2(gamma_1)} = 2^n n!, and products H_alpha = prod H_{alpha_i}
// give the d-dimensional basis. Internally expansions are stored against the
// orthonormal family h_alpha = H_alpha / sqrt(prod 2^{alpha_i} alpha_i!), for
// which the ladder operators act as
//     lowering_i h_alpha = sqrt(alpha_i)     h_{alpha - e_i}
//     raising_i  h_alpha = sqrt(alpha_i + 1) h_{alpha + e_i}
// (lowering is (1/sqrt2) d/dx_i, raising its Gaussian adjoint). The
// Ornstein-Uhlenbeck generator acts with multiplier |alpha| (number variant)
// or |alpha| + 1 (shifted variant); semigroups, fractional integrals, and both
// Riesz transform families are diagonal compositions of these pieces, so every
// operator here is exact up to floating-point rounding and serves as the
// spectral oracle for the kernel-side integral operators.

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "gaussvar/common.hpp"
#include "gaussvar/quadrature.hpp"

namespace gaussvar {

struct MultiIndex {
    std::vector<int> k;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> kk) : k(std::move(kk)) {
        for (int v : k)
            if (v < 0) throw std::invalid_argument("MultiIndex: negative entry");
    }
    static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(d, 0)); }
    static MultiIndex unit(int d, int i) {
        std::vector<int> v(d, 0);
        v.at(i) = 1;
        return MultiIndex(std::move(v));
    }

    int dim() const { return static_cast<int>(k.size()); }
    int order() const {
        int s = 0;
        for (int v : k) s += v;
        return s;
    }
    auto operator<=>(const MultiIndex&) const = default;
};

// Physicists' H_n by the three-term recurrence H_{n+1} = 2x H_n - 2n H_{n-1}.
inline double hermite_value(int n, double x) {
    if (n < 0) throw std::invalid_argument("hermite_value: negative degree");
    double h0 = 1.0;
    if (n == 0) return h0;
    double h1 = 2.0 * x;
    for (int j = 1; j < n; ++j) {
        double h2 = 2.0 * x * h1 - 2.0 * j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// ||H_alpha||^2 under gamma_d: prod 2^{alpha_i} alpha_i!
inline double hermite_norm_sq(const MultiIndex& alpha) {
    double v = 1.0;
    for (int a : alpha.k) {
        for (int j = 1; j <= a; ++j) v *= 2.0 * j;
    }
    return v;
}

// Orthonormal values h_0..h_n at one point, by the normalized recurrence
// h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}.
inline void hermite_orthonormal_column(int n_max, double x, std::vector<double>& out) {
    out.resize(n_max + 1);
    out[0] = 1.0;
    if (n_max == 0) return;
    out[1] = std::sqrt(2.0) * x;
    for (int n = 1; n < n_max; ++n)
        out[n + 1] = x * std::sqrt(2.0 / (n + 1.0)) * out[n] -
                     std::sqrt(n / (n + 1.0)) * out[n - 1];
}

struct HermiteExpansion {
    int dim = 1;
    std::map<MultiIndex, double> coeffs;  // against the orthonormal h_alpha

    static HermiteExpansion basis(const MultiIndex& alpha, double c = 1.0) {
        HermiteExpansion e;
        e.dim = alpha.dim();
        if (c != 0.0) e.coeffs[alpha] = c;
        return e;
    }

    int max_order() const {
        int m = 0;
        for (const auto& [a, c] : coeffs) m = std::max(m, a.order());
        return m;
    }

    double coeff(const MultiIndex& a) const {
        auto it = coeffs.find(a);
        return it == coeffs.end() ? 0.0 : it->second;
    }

    void add(const MultiIndex& a, double c) {
        if (a.dim() != dim) throw std::invalid_argument("HermiteExpansion::add: dimension mismatch");
        double& slot = coeffs[a];
        slot += c;
        if (slot == 0.0) coeffs.erase(a);
    }

    double eval(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim)
            throw std::invalid_argument("HermiteExpansion::eval: dimension mismatch");
        int n_max = max_order();
        static thread_local std::vector<std::vector<double>> cols;
        cols.resize(dim);
        for (int i = 0; i < dim; ++i) hermite_orthonormal_column(n_max, x[i], cols[i]);
        double s = 0.0;
        for (const auto& [a, c] : coeffs) {
            double t = c;
            for (int i = 0; i < dim; ++i) t *= cols[i][a.k[i]];
            s += t;
        }
        return s;
    }
};

inline double inner_product(const HermiteExpansion& f, const HermiteExpansion& g) {
    if (f.dim != g.dim) throw std::invalid_argument("inner_product: dimension mismatch");
    // iterate the smaller map
    const auto& small = f.coeffs.size() <= g.coeffs.size() ? f : g;
    const auto& large = f.coeffs.size() <= g.coeffs.size() ? g : f;
    double s = 0.0;
    for (const auto& [a, c] : small.coeffs) s += c * large.coeff(a);
    return s;
}

inline HermiteExpansion axpy(double a, const HermiteExpansion& x, const HermiteExpansion& y) {
    if (x.dim != y.dim) throw std::invalid_argument("axpy: dimension mismatch");
    HermiteExpansion out = y;
    for (const auto& [idx, c] : x.coeffs) out.add(idx, a * c);
    return out;
}

// --- ladder operators -----------------------------------------------------

inline HermiteExpansion apply_lowering(int i, const HermiteExpansion& f) {
    if (i < 0 || i >= f.dim) throw std::invalid_argument("apply_lowering: axis out of range");
    HermiteExpansion out;
    out.dim = f.dim;
    for (const auto& [a, c] : f.coeffs) {
        if (a.k[i] == 0) continue;
        MultiIndex b = a;
        b.k[i] -= 1;
        out.add(b, c * std::sqrt(static_cast<double>(a.k[i])));
    }
    return out;
}

inline HermiteExpansion apply_raising(int i, const HermiteExpansion& f) {
    if (i < 0 || i >= f.dim) throw std::invalid_argument("apply_raising: axis out of range");
    HermiteExpansion out;
    out.dim = f.dim;
    for (const auto& [a, c] : f.coeffs) {
        MultiIndex b = a;
        b.k[i] += 1;
        out.add(b, c * std::sqrt(static_cast<double>(a.k[i] + 1)));
    }
    return out;
}

// Iterated ladders over a multi-index power, lowest axis first. Order does not
// matter within one family (same-family ladders on different axes commute, and
// on the same axis they compose diagonally).
inline HermiteExpansion apply_lowering_power(const MultiIndex& alpha, const HermiteExpansion& f) {
    if (alpha.dim() != f.dim) throw std::invalid_argument("apply_lowering_power: dimension mismatch");
    HermiteExpansion out = f;
    for (int i = 0; i < alpha.dim(); ++i)
        for (int j = 0; j < alpha.k[i]; ++j) out = apply_lowering(i, out);
    return out;
}

inline HermiteExpansion apply_raising_power(const MultiIndex& alpha, const HermiteExpansion& f) {
    if (alpha.dim() != f.dim) throw std::invalid_argument("apply_raising_power: dimension mismatch");
    HermiteExpansion out = f;
    for (int i = 0; i < alpha.dim(); ++i)
        for (int j = 0; j < alpha.k[i]; ++j) out = apply_raising(i, out);
    return out;
}

// --- diagonal operators ---------------------------------------------------

// number: multiplier |alpha| (the Ornstein-Uhlenbeck generator);
// shifted: multiplier |alpha| + 1 (generator plus identity).
enum class OuVariant { number, shifted };

inline double ou_multiplier(OuVariant v, int order) {
    return v == OuVariant::number ? static_cast<double>(order)
                                  : static_cast<double>(order) + 1.0;
}

inline HermiteExpansion apply_generator(OuVariant v, const HermiteExpansion& f) {
    HermiteExpansion out;
    out.dim = f.dim;
    for (const auto& [a, c] : f.coeffs) out.add(a, c * ou_multiplier(v, a.order()));
    return out;
}

inline HermiteExpansion ou_semigroup(OuVariant v, double t, const HermiteExpansion& f) {
    if (!(t >= 0.0)) throw std::domain_error("ou_semigroup: time must be nonnegative");
    HermiteExpansion out;
    out.dim = f.dim;
    for (const auto& [a, c] : f.coeffs)
        out.add(a, c * std::exp(-t * ou_multiplier(v, a.order())));
    return out;
}

// Negative fractional power of the generator. The number variant is only
// defined on the orthogonal complement of constants; a nonzero mean is
// rejected rather than silently projected.
inline HermiteExpansion fractional_integral(OuVariant v, double beta, const HermiteExpansion& f) {
    if (!(beta >= 0.0)) throw std::domain_error("fractional_integral: order must be nonnegative");
    HermiteExpansion out;
    out.dim = f.dim;
    for (const auto& [a, c] : f.coeffs) {
        int n = a.order();
        if (v == OuVariant::number && n == 0) {
            if (beta == 0.0) {
                out.add(a, c);
                continue;
            }
            throw std::domain_error("fractional_integral: number variant needs zero mean");
        }
        out.add(a, c * std::pow(ou_multiplier(v, n), -beta));
    }
    return out;
}

// --- Riesz transforms -----------------------------------------------------

// lowering family: iterated lowering after a fractional integral of the number
// variant (defined on zero-mean inputs);
// raising family: iterated raising after a fractional integral of the shifted
// variant (defined everywhere).
enum class RieszVariant { lowering, raising };

inline HermiteExpansion riesz_transform(RieszVariant v, const MultiIndex& alpha,
                                        const HermiteExpansion& f) {
    if (alpha.dim() != f.dim) throw std::invalid_argument("riesz_transform: dimension mismatch");
    const double half_order = 0.5 * alpha.order();
    if (v == RieszVariant::lowering) {
        if (f.coeff(MultiIndex::zero(f.dim)) != 0.0)
            throw std::domain_error("riesz_transform: lowering variant needs zero mean");
        return apply_lowering_power(alpha, fractional_integral(OuVariant::number, half_order, f));
    }
    return apply_raising_power(alpha, fractional_integral(OuVariant::shifted, half_order, f));
}

// Closed-form action on a single basis element, used as the dual route in
// tests and by the kernel calibration:
//   lowering: h_beta -> |beta|^{-|alpha|/2} prod sqrt(beta_i!/(beta_i-alpha_i)!) h_{beta-alpha}
//   raising:  h_beta -> (|beta|+1)^{-|alpha|/2} prod sqrt((beta_i+alpha_i)!/beta_i!) h_{beta+alpha}
inline HermiteExpansion riesz_on_basis(RieszVariant v, const MultiIndex& alpha,
                                       const MultiIndex& beta) {
    if (alpha.dim() != beta.dim()) throw std::invalid_argument("riesz_on_basis: dimension mismatch");
    const int d = alpha.dim();
    HermiteExpansion out;
    out.dim = d;
    if (v == RieszVariant::lowering) {
        if (beta.order() == 0) {
            if (alpha.order() == 0) return HermiteExpansion::basis(beta);
            throw std::domain_error("riesz_on_basis: lowering variant needs zero mean");
        }
        MultiIndex target = beta;
        double factor = std::pow(static_cast<double>(beta.order()), -0.5 * alpha.order());
        for (int i = 0; i < d; ++i) {
            if (beta.k[i] < alpha.k[i]) return out;  // annihilated
            for (int j = 0; j < alpha.k[i]; ++j) {
                factor *= std::sqrt(static_cast<double>(beta.k[i] - j));
                target.k[i] -= 1;
            }
        }
        out.add(target, factor);
        return out;
    }
    MultiIndex target = beta;
    double factor = std::pow(static_cast<double>(beta.order()) + 1.0, -0.5 * alpha.order());
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < alpha.k[i]; ++j) {
            factor *= std::sqrt(static_cast<double>(beta.k[i] + j + 1));
            target.k[i] += 1;
        }
    }
    out.add(target, factor);
    return out;
}

// Sum over axes of raising_i . lowering_i Riesz transforms; equals identity
// minus the projection onto constants, which tests verify coefficientwise.
inline HermiteExpansion riesz_identity_sum(const HermiteExpansion& f) {
    HermiteExpansion zero_mean = f;
    zero_mean.coeffs.erase(MultiIndex::zero(f.dim));
    HermiteExpansion acc;
    acc.dim = f.dim;
    for (int i = 0; i < f.dim; ++i) {
        MultiIndex e = MultiIndex::unit(f.dim, i);
        HermiteExpansion term =
            riesz_transform(RieszVariant::raising, e,
                            riesz_transform(RieszVariant::lowering, e, zero_mean));
        acc = axpy(1.0, term, acc);
    }
    return acc;
}

// --- analysis / synthesis -------------------------------------------------

// Coefficients via tensor Gauss-Hermite quadrature,
//   c_alpha = pi^{-d/2} int f(x) h_alpha(x) e^{-|x|^2} dx,
// exact for polynomial f of degree <= cap when the node count clears
// (2*order - 1) >= 2*cap.
inline HermiteExpansion analyze(const std::function<double(std::span<const double>)>& f, int dim,
                                int degree_cap) {
    if (dim < 1 || dim > 4) throw std::invalid_argument("analyze: dimension out of range");
    if (degree_cap < 0 || degree_cap > 40) throw std::invalid_argument("analyze: bad degree cap");
    const int order = degree_cap + 3;
    const QuadNodes& q = gauss_hermite_nodes(order);

    // per-axis orthonormal columns at every node
    std::vector<std::vector<double>> cols(order);
    for (int j = 0; j < order; ++j) hermite_orthonormal_column(degree_cap, q.x[j], cols[j]);

    HermiteExpansion out;
    out.dim = dim;
    std::vector<int> node_idx(dim, 0);
    const double norm = std::pow(M_PI, -0.5 * dim);

    // enumerate tensor nodes once, accumulate all coefficients
    std::vector<MultiIndex> alphas;
    {
        std::vector<int> a(dim, 0);
        std::function<void(int, int)> rec = [&](int axis, int remaining) {
            if (axis == dim) {
                alphas.emplace_back(a);
                return;
            }
            for (int v = 0; v <= remaining; ++v) {
                a[axis] = v;
                rec(axis + 1, remaining - v);
            }
            a[axis] = 0;
        };
        rec(0, degree_cap);
    }
    std::vector<double> acc(alphas.size(), 0.0);

    Point x(dim);
    std::function<void(int, double)> loop = [&](int axis, double wprod) {
        if (axis == dim) {
            double fv = f(x);
            if (fv == 0.0) return;
            for (std::size_t t = 0; t < alphas.size(); ++t) {
                double hv = 1.0;
                for (int i = 0; i < dim; ++i) hv *= cols[node_idx[i]][alphas[t].k[i]];
                acc[t] += wprod * fv * hv;
            }
            return;
        }
        for (int j = 0; j < order; ++j) {
            node_idx[axis] = j;
            x[axis] = q.x[j];
            loop(axis + 1, wprod * q.w[j]);
        }
    };
    loop(0, 1.0);

    for (std::size_t t = 0; t < alphas.size(); ++t) {
        double c = acc[t] * norm;
        if (c != 0.0) out.coeffs[alphas[t]] = c;
    }
    return out;
}

// Largest absolute coefficient difference, the metric for operator identities.
inline double max_coeff_gap(const HermiteExpansion& f, const HermiteExpansion& g) {
    if (f.dim != g.dim) throw std::invalid_argument("max_coeff_gap: dimension mismatch");
    double m = 0.0;
    for (const auto& [a, c] : f.coeffs) m = std::max(m, std::fabs(c - g.coeff(a)));
    for (const auto& [a, c] : g.coeffs) m = std::max(m, std::fabs(c - f.coeff(a)));
    return m;
}

}  // namespace gaussvar
