#pragma once

// Integral kernels of the Gaussian Riesz transforms and their numerical
// machinery.
//
// The lowering-family transform applies the kernel
//
//   K_alpha(x,y) = C int_0^1 r^{m-1} ((-log r)/(1-r^2))^{(m-2)/2}
//                    H_alpha((y-rx)/sqrt(1-r^2))
//                    e^{-|y-rx|^2/(1-r^2)} (1-r^2)^{-d/2-1} dr,
//
// and the raising family applies, for a Gaussian-orthogonal F in C^1 with
// sub-Gaussian growth,
//
//   K_F(x,y) = int_0^1 ((-log r)/(1-r^2))^{(m-2)/2} F((x-ry)/sqrt(1-r^2))
//                e^{-|x-ry|^2/(1-r^2)} (1-r^2)^{-d/2-1} dr  e^{|x|^2-|y|^2}.
//
// The substitution t = 1 - r^2 turns the raising kernel into
//
//   K_F(x,y) = int_0^1 phi_m(t) F((x-sqrt(1-t)y)/sqrt(t)) e^{-u(t)} t^{-d/2-1} dt,
//
// with  psi_m(t) = ((-log(1-t))/t)^{(m-2)/2} 2^{-(m-2)/2},
//       phi_m(t) = psi_m(t)/sqrt(1-t),
//       u(t) = |y - sqrt(1-t)x|^2/t,   ubar(t) = |x - sqrt(1-t)y|^2/t,
//       ubar = u + |x|^2 - |y|^2,
//
// which absorbs the e^{|x|^2-|y|^2} weight into e^{-u} and removes the large
// exponential factor from the numerics. With a = |x|^2 + |y|^2 and
// b = 2<x,y>, u has its minimum at
//
//   t0 = 2 sqrt(a^2-b^2)/(a + sqrt(a^2-b^2))  if b > 0, else 1,
//   u0 = (|y|^2 - |x|^2 + |x+y||x-y|)/2       if b > 0, else |y|^2.
//
// Near the diagonal the kernel is governed by the homogeneous degree -d
// kernel Omega(z')/|z|^d with Omega(z') = 2 int_0^infty F(s z') s^{d-1}
// e^{-s^2} ds, whose spherical mean vanishes by Gaussian orthogonality; the
// principal value is computed on a shrinking exclusion ladder and
// extrapolated to radius zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaussvar/common.hpp"
#include "gaussvar/exponent.hpp"
#include "gaussvar/gauss_measure.hpp"
#include "gaussvar/grid.hpp"
#include "gaussvar/hermite.hpp"
#include "gaussvar/norms.hpp"
#include "gaussvar/quadrature.hpp"

namespace gaussvar {

// --- families and configuration ------------------------------------------

struct KernelFamily {
    HermiteExpansion F;  // Gaussian-orthogonal part, as a finite expansion
    double m = 1.0;      // order parameter of psi_m
    double eps = 0.05;   // growth parameter of the sub-Gaussian envelope
    double scale = 1.0;  // multiplicative normalization
    double local = 0.0;  // identity-term coefficient of the calibrated transform
};

inline void validate_family(const KernelFamily& fam) {
    if (!(fam.m > 0.0)) throw std::invalid_argument("KernelFamily: order must be positive");
    if (!(fam.eps > 0.0)) throw std::invalid_argument("KernelFamily: growth parameter must be positive");
    if (!std::isfinite(fam.scale)) throw std::invalid_argument("KernelFamily: bad scale");
    if (fam.F.coeff(MultiIndex::zero(fam.F.dim)) != 0.0)
        throw std::invalid_argument("KernelFamily: F must have zero Gaussian mean");
}

inline KernelFamily kernel_family(const MultiIndex& alpha, double scale = 1.0) {
    if (alpha.order() < 1) throw std::invalid_argument("kernel_family: order must be >= 1");
    KernelFamily fam;
    fam.F = HermiteExpansion::basis(alpha);
    fam.m = alpha.order();
    fam.scale = scale;
    validate_family(fam);
    return fam;
}

inline KernelFamily kernel_family(const HermiteExpansion& F, double m, double scale = 1.0) {
    KernelFamily fam;
    fam.F = F;
    fam.m = m;
    fam.scale = scale;
    validate_family(fam);
    return fam;
}

// d/dx_i of an expansion: h_n' = sqrt(2n) h_{n-1} on each axis
inline HermiteExpansion partial_derivative(const HermiteExpansion& e, int axis) {
    if (axis < 0 || axis >= e.dim) throw std::invalid_argument("partial_derivative: axis out of range");
    HermiteExpansion out;
    out.dim = e.dim;
    for (const auto& [a, c] : e.coeffs) {
        if (a.k[axis] == 0) continue;
        MultiIndex t = a;
        t.k[axis] -= 1;
        out.add(t, c * std::sqrt(2.0 * a.k[axis]));
    }
    return out;
}

// fitted growth constants sup |F| e^{-eps|x|^2} and sup |grad F| e^{-eps|x|^2}
// over a sphere ladder
struct GrowthReport {
    double c_value = 0.0;
    double c_gradient = 0.0;
    int n_samples = 0;
};

inline GrowthReport growth_report(const KernelFamily& fam, std::uint64_t seed = 0x9A0F5ULL) {
    const double eps = fam.eps;
    if (!(eps > 0.0)) throw std::invalid_argument("growth_report: eps must be positive");
    const int d = fam.F.dim;
    std::vector<HermiteExpansion> grad;
    for (int i = 0; i < d; ++i) grad.push_back(partial_derivative(fam.F, i));
    Rng rng(seed);
    GrowthReport r;
    Point x(d);
    for (double radius = 0.25; radius <= 8.0; radius *= 1.3) {
        for (int j = 0; j < 32; ++j) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                x[i] = rng.normal();
                s += x[i] * x[i];
            }
            s = std::sqrt(std::max(s, 1e-300));
            for (int i = 0; i < d; ++i) x[i] *= radius / s;
            double damp = std::exp(-eps * radius * radius);
            r.c_value = std::max(r.c_value, std::fabs(fam.scale * fam.F.eval(x)) * damp);
            double g = 0.0;
            for (int i = 0; i < d; ++i) g += grad[i].eval(x) * grad[i].eval(x);
            r.c_gradient = std::max(r.c_gradient, std::fabs(fam.scale) * std::sqrt(g) * damp);
            ++r.n_samples;
        }
    }
    return r;
}

enum class EndpointMap { none, double_exponential };

struct QuadratureConfig {
    int t_panels = 8;  // initial panel hint for adaptive passes
    EndpointMap endpoint_map = EndpointMap::double_exponential;
    std::vector<double> pv_radii = {0.5,     0.25,     0.125,     0.0625,
                                    0.03125, 0.015625, 0.0078125, 0.00390625};
    double domain_truncation_radius = 0.0;  // 0 selects max(8, |x| + 6)
    double tol = 1e-9;
    double pv_tol = 5e-4;          // Cauchy acceptance for the exclusion ladder
    double singular_floor = 1e-7;  // direct kernel evaluation proximity guard
    int n_theta = 32;              // angular rule for planar shell integrals
};

inline void validate_quadrature(const QuadratureConfig& cfg) {
    if (!(cfg.tol > 0.0) || !(cfg.pv_tol > 0.0))
        throw std::invalid_argument("QuadratureConfig: tolerances must be positive");
    if (cfg.pv_radii.size() < 3) throw std::invalid_argument("QuadratureConfig: need >= 3 pv radii");
    for (std::size_t k = 0; k < cfg.pv_radii.size(); ++k) {
        if (!(cfg.pv_radii[k] > 0.0)) throw std::invalid_argument("QuadratureConfig: pv radii must be positive");
        if (k > 0 && !(cfg.pv_radii[k] < cfg.pv_radii[k - 1]))
            throw std::invalid_argument("QuadratureConfig: pv radii must decrease strictly");
    }
}

// --- psi, phi, and the exponent geometry ----------------------------------

inline double psi_m(double m, double t) {
    if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("psi_m: t must lie in [0,1)");
    double half = 0.5 * (m - 2.0);
    if (t == 0.0) return std::pow(0.5, half);
    double ratio = -std::log1p(-t) / t;
    return std::pow(0.5 * ratio, half);
}

inline double phi_m(double m, double t) { return psi_m(m, t) / std::sqrt(1.0 - t); }

inline std::pair<double, double> psi_phi(double m, double t) {
    double psi = psi_m(m, t);
    return {psi, psi / std::sqrt(1.0 - t)};
}

inline double u_value(std::span<const double> x, std::span<const double> y, double t) {
    if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("u_value: t must lie in (0,1]");
    double c = std::sqrt(1.0 - t), s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double diff = y[i] - c * x[i];
        s += diff * diff;
    }
    return s / t;
}

inline double ubar_value(std::span<const double> x, std::span<const double> y, double t) {
    return u_value(y, x, t);
}

struct KernelGeometry {
    double a = 0.0;   // |x|^2 + |y|^2
    double b = 0.0;   // 2 <x, y>
    double t0 = 1.0;  // argmin of u over (0, 1]
    double u0 = 0.0;  // min of u
};

inline KernelGeometry kernel_geometry(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel_geometry: dimension mismatch");
    KernelGeometry g;
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    g.a = norm_sq(x) + norm_sq(y);
    g.b = 2.0 * dot;
    if (g.a == 0.0) throw std::invalid_argument("kernel_geometry: x = y = 0 is degenerate");
    if (g.b > 0.0) {
        double root = std::sqrt(std::max(g.a * g.a - g.b * g.b, 0.0));
        g.t0 = 2.0 * root / (g.a + root);
        double sum = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double s = x[i] + y[i], d = x[i] - y[i];
            sum += s * s;
            diff += d * d;
        }
        g.u0 = 0.5 * (norm_sq(y) - norm_sq(x) + std::sqrt(sum) * std::sqrt(diff));
    } else {
        g.t0 = 1.0;
        g.u0 = norm_sq(y);
    }
    return g;
}

// --- direct kernel evaluation ---------------------------------------------

inline bool singular_proximity(std::span<const double> x, std::span<const double> y,
                               const QuadratureConfig& cfg) {
    return dist(x, y) < cfg.singular_floor;
}

namespace detail {

// integrand argument (x - sqrt(1-t) y)/sqrt(t) written into scratch
inline void kernel_argument(std::span<const double> x, std::span<const double> y, double t, Point& arg) {
    double c = std::sqrt(1.0 - t), rt = std::sqrt(t);
    arg.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) arg[i] = (x[i] - c * y[i]) / rt;
}

}  // namespace detail

// raising-family kernel through the t-form; the e^{|x|^2-|y|^2} weight is
// cancelled analytically against e^{-ubar}
inline double kernel_new(std::span<const double> x, std::span<const double> y, const KernelFamily& fam,
                         const QuadratureConfig& cfg) {
    validate_family(fam);
    validate_quadrature(cfg);
    const int d = static_cast<int>(x.size());
    if (y.size() != x.size()) throw std::invalid_argument("kernel_new: dimension mismatch");
    double separation = dist(x, y);
    if (separation == 0.0) throw std::domain_error("kernel_new: diagonal is singular");
    KernelGeometry geo = kernel_geometry(x, y);
    // e^{-u(t)} underflows to zero at every node once u0 is this large
    if (geo.u0 > 760.0) return 0.0;

    Point arg;
    auto integrand = [&](double t) {
        double e = std::exp(-u_value(x, y, t));
        if (e == 0.0) return 0.0;
        detail::kernel_argument(x, y, t, arg);
        return phi_m(fam.m, t) * fam.F.eval(arg) * e * std::pow(t, -0.5 * d - 1.0);
    };

    // mass below t_min sits under e^{-u} with u > 2000; dead numerically
    double t_min = std::min(separation * separation / 6000.0, 0.499);
    double split = 10.0 * geo.t0;
    double low;
    if (split > t_min && split < 0.4) {
        low = integrate_log_sub(integrand, t_min, split, cfg.tol) +
              integrate_log_sub(integrand, split, 0.5, cfg.tol);
    } else {
        low = integrate_log_sub(integrand, t_min, 0.5, cfg.tol);
    }

    double high = 0.0;
    if (cfg.endpoint_map == EndpointMap::double_exponential) {
        auto tail = [&](double v) {
            double t = 1.0 - v * v;
            double e = std::exp(-u_value(x, y, t));
            if (e == 0.0) return 0.0;
            double ratio = -2.0 * std::log(v) / t;
            double psi = std::pow(0.5 * ratio, 0.5 * (fam.m - 2.0));
            detail::kernel_argument(x, y, t, arg);
            return 2.0 * psi * fam.F.eval(arg) * e * std::pow(t, -0.5 * d - 1.0);
        };
        high = tanh_sinh_0(tail, std::sqrt(0.5), cfg.tol);
    } else {
        auto plain = [&](double t) {
            double e = std::exp(-u_value(x, y, t));
            if (e == 0.0) return 0.0;
            detail::kernel_argument(x, y, t, arg);
            return phi_m(fam.m, t) * fam.F.eval(arg) * e * std::pow(t, -0.5 * d - 1.0);
        };
        high = adaptive_gauss_legendre(plain, 0.5, 1.0 - 1e-12, cfg.tol, cfg.t_panels);
    }
    return fam.scale * (low + high);
}

// raising-family kernel through the original r-integral, as a consistency
// route; carries the explicit exponential weight
inline double kernel_new_r_form(std::span<const double> x, std::span<const double> y,
                                const KernelFamily& fam, const QuadratureConfig& cfg) {
    validate_family(fam);
    const int d = static_cast<int>(x.size());
    if (y.size() != x.size()) throw std::invalid_argument("kernel_new_r_form: dimension mismatch");
    double separation = dist(x, y);
    if (separation == 0.0) throw std::domain_error("kernel_new_r_form: diagonal is singular");
    KernelGeometry geo = kernel_geometry(x, y);
    if (geo.u0 + norm_sq(x) - norm_sq(y) > 760.0) return 0.0;

    Point arg(x.size());
    auto integrand = [&](double r) {
        double omr2 = (1.0 - r) * (1.0 + r);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double diff = x[i] - r * y[i];
            s += diff * diff;
        }
        double e = std::exp(-s / omr2);
        if (e == 0.0) return 0.0;
        double root = std::sqrt(omr2);
        for (std::size_t i = 0; i < x.size(); ++i) arg[i] = (x[i] - r * y[i]) / root;
        double factor = std::pow(-std::log(r) / omr2, 0.5 * (fam.m - 2.0));
        return factor * fam.F.eval(arg) * e * std::pow(omr2, -0.5 * d - 1.0);
    };

    double low = tanh_sinh_0(integrand, 0.5, cfg.tol);
    double w_min = std::min(separation * separation / 6000.0, 0.499);
    auto tail = [&](double w) { return integrand(1.0 - w); };
    double wsplit = 10.0 * geo.t0;
    double high;
    if (wsplit > w_min && wsplit < 0.4) {
        high = integrate_log_sub(tail, w_min, wsplit, cfg.tol) +
               integrate_log_sub(tail, wsplit, 0.5, cfg.tol);
    } else {
        high = integrate_log_sub(tail, w_min, 0.5, cfg.tol);
    }
    // the Jacobian of t = 1 - r^2 is dt = 2r dr, so the r-parameterization of
    // the t-form kernel carries an explicit factor 2
    return 2.0 * fam.scale * (low + high) * std::exp(norm_sq(x) - norm_sq(y));
}

// lowering-family kernel in its r-form
inline double kernel_old(std::span<const double> x, std::span<const double> y, const MultiIndex& alpha,
                         const QuadratureConfig& cfg, double scale = 1.0) {
    const int d = alpha.dim();
    if (static_cast<int>(x.size()) != d || y.size() != x.size())
        throw std::invalid_argument("kernel_old: dimension mismatch");
    const int m = alpha.order();
    if (m < 1) throw std::invalid_argument("kernel_old: order must be >= 1");
    double separation = dist(x, y);
    if (separation == 0.0) throw std::domain_error("kernel_old: diagonal is singular");
    KernelGeometry geo = kernel_geometry(x, y);
    if (geo.u0 > 760.0) return 0.0;
    HermiteExpansion h = HermiteExpansion::basis(alpha);

    Point arg(x.size());
    auto integrand = [&](double r) {
        double omr2 = (1.0 - r) * (1.0 + r);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double diff = y[i] - r * x[i];
            s += diff * diff;
        }
        double e = std::exp(-s / omr2);
        if (e == 0.0) return 0.0;
        double root = std::sqrt(omr2);
        for (std::size_t i = 0; i < x.size(); ++i) arg[i] = (y[i] - r * x[i]) / root;
        double factor = std::pow(r, m - 1.0) * std::pow(-std::log(r) / omr2, 0.5 * (m - 2.0));
        return factor * h.eval(arg) * e * std::pow(omr2, -0.5 * d - 1.0);
    };

    double low = tanh_sinh_0(integrand, 0.5, cfg.tol);
    double w_min = std::min(separation * separation / 6000.0, 0.499);
    auto tail = [&](double w) { return integrand(1.0 - w); };
    double wsplit = 10.0 * geo.t0;
    double high;
    if (wsplit > w_min && wsplit < 0.4) {
        high = integrate_log_sub(tail, w_min, wsplit, cfg.tol) +
               integrate_log_sub(tail, wsplit, 0.5, cfg.tol);
    } else {
        high = integrate_log_sub(tail, w_min, 0.5, cfg.tol);
    }
    return scale * (low + high);
}

// --- homogeneous Calderon-Zygmund part ------------------------------------

// Omega(x') = 2 int_0^infty F(s x') s^{d-1} e^{-s^2} ds on a unit direction
inline double homogeneous_omega(const KernelFamily& fam, std::span<const double> direction) {
    const int d = fam.F.dim;
    if (static_cast<int>(direction.size()) != d)
        throw std::invalid_argument("homogeneous_omega: dimension mismatch");
    Point arg(d);
    auto integrand = [&](double s) {
        for (int i = 0; i < d; ++i) arg[i] = s * direction[i];
        return 2.0 * fam.F.eval(arg) * std::pow(s, d - 1.0) * std::exp(-s * s);
    };
    return fam.scale * adaptive_gauss_legendre(integrand, 0.0, 12.0, 1e-12, 6);
}

inline double homogeneous_kernel(const KernelFamily& fam, std::span<const double> x) {
    double r = norm(x);
    if (r == 0.0) throw std::domain_error("homogeneous_kernel: origin is singular");
    Point direction(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) direction[i] = x[i] / r;
    return homogeneous_omega(fam, direction) / std::pow(r, static_cast<double>(fam.F.dim));
}

// spherical mean of Omega; vanishes for Gaussian-orthogonal F
inline double spherical_mean_omega(const KernelFamily& fam) {
    const int d = fam.F.dim;
    if (d == 1) return homogeneous_omega(fam, Point{1.0}) + homogeneous_omega(fam, Point{-1.0});
    if (d == 2) {
        const int n = 64;
        double acc = 0.0;
        Point u(2);
        for (int j = 0; j < n; ++j) {
            double th = 2.0 * M_PI * (j + 0.5) / n;
            u[0] = std::cos(th);
            u[1] = std::sin(th);
            acc += homogeneous_omega(fam, u);
        }
        return acc * 2.0 * M_PI / n;
    }
    if (d == 3) {
        const int n_phi = 48;
        Point u(3);
        auto slice = [&](double c) {
            double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            double acc = 0.0;
            for (int j = 0; j < n_phi; ++j) {
                double ph = 2.0 * M_PI * (j + 0.5) / n_phi;
                u[0] = s * std::cos(ph);
                u[1] = s * std::sin(ph);
                u[2] = c;
                acc += homogeneous_omega(fam, u);
            }
            return acc * 2.0 * M_PI / n_phi;
        };
        return adaptive_gauss_legendre(slice, -1.0, 1.0, 1e-10, 4);
    }
    throw std::invalid_argument("spherical_mean_omega: dimension must be <= 3");
}

// --- principal value machinery --------------------------------------------

struct ScalarField {
    std::function<double(std::span<const double>)> eval;
    Box support;

    double operator()(std::span<const double> y) const {
        if (!support.contains(y)) return 0.0;
        return eval(y);
    }
};

inline ScalarField field_from_expansion(const HermiteExpansion& e, double half_width = 16.0) {
    ScalarField f;
    HermiteExpansion copy = e;
    f.eval = [copy](std::span<const double> y) { return copy.eval(y); };
    f.support = Box::cube(e.dim, half_width);
    return f;
}

inline ScalarField field_from_grid(const GridFunction& g) {
    ScalarField f;
    auto owned = std::make_shared<GridFunction>(g);
    auto interp = std::make_shared<GridInterpolator>(*owned);
    f.eval = [owned, interp](std::span<const double> y) { return (*interp)(y); };
    f.support = owned->domain;
    return f;
}

struct PvResult {
    double value = 0.0;            // extrapolated limit at exclusion radius 0
    std::vector<double> partial;   // partial integrals along the radius ladder
    bool cauchy = false;
    double uncertainty = 0.0;
    double truncation_radius = 0.0;
};

namespace detail {

// integral of g over the shell r_in < |y - x| < r_out; d = 1 sums the two
// rays, d = 2 uses a periodic angular rule under a log-radial substitution
// sums whose terms cancel to within their own rounding noise carry no
// information; snapping them to zero keeps the adaptive passes from chasing
// roundoff on symmetric integrands
inline double denoised_sum(double acc, double mag) {
    if (std::fabs(acc) < 64.0 * std::numeric_limits<double>::epsilon() * mag) return 0.0;
    return acc;
}

template <class G>
double shell_integral(int d, const Point& x, G&& g, double r_in, double r_out, double tol, int n_theta) {
    if (!(r_out > r_in)) return 0.0;
    if (d == 1) {
        auto ray = [&](double s) {
            Point lo{x[0] - s}, hi{x[0] + s};
            double a = g(lo), b = g(hi);
            return denoised_sum(a + b, std::fabs(a) + std::fabs(b));
        };
        return integrate_log_sub(ray, r_in, r_out, tol);
    }
    if (d == 2) {
        Point y(2);
        auto ring = [&](double s) {
            double acc = 0.0, mag = 0.0;
            for (int j = 0; j < n_theta; ++j) {
                double th = 2.0 * M_PI * (j + 0.5) / n_theta;
                y[0] = x[0] + s * std::cos(th);
                y[1] = x[1] + s * std::sin(th);
                double v = g(y);
                acc += v;
                mag += std::fabs(v);
            }
            return denoised_sum(acc, mag) * (2.0 * M_PI / n_theta) * s;
        };
        return integrate_log_sub(ring, r_in, r_out, tol);
    }
    throw std::invalid_argument("shell_integral: principal values support dimension <= 2");
}

inline double aitken_limit(const std::vector<double>& v, std::size_t last) {
    double d1 = v[last] - v[last - 1];
    double d0 = v[last - 1] - v[last - 2];
    double denom = d1 - d0;
    if (std::fabs(denom) < 1e-14 * (std::fabs(d1) + std::fabs(d0)) || denom == 0.0) return v[last];
    double a = v[last] - d1 * d1 / denom;
    // reject wild extrapolations when the ratio is not contracting
    if (std::fabs(a - v[last]) > 4.0 * (std::fabs(d1) + std::fabs(d0))) return v[last];
    return a;
}

inline bool geometric_ladder(const std::vector<double>& radii, double& ratio) {
    ratio = radii[1] / radii[0];
    for (std::size_t k = 1; k + 1 < radii.size(); ++k) {
        double r = radii[k + 1] / radii[k];
        if (std::fabs(r - ratio) > 1e-6 * ratio) return false;
    }
    return true;
}

struct ExtrapResult {
    double value = 0.0;
    double uncertainty = 0.0;
};

// for smooth expansions the truncation error of the exclusion ladder behaves
// like A·rho + B·rho·log(rho) + C·rho^2 + D·rho^2·log(rho); a log pair is a
// k·q^k mode and is removed by applying the same-ratio elimination twice
inline ExtrapResult extrapolate_ladder(const std::vector<double>& partial, double ratio) {
    std::vector<double> s = partial;
    const double qs[4] = {ratio, ratio, ratio * ratio, ratio * ratio};
    int stages = std::min(4, static_cast<int>(s.size()) - 2);
    for (int stage = 0; stage < stages; ++stage) {
        double q = qs[stage];
        std::vector<double> next(s.size() - 1);
        for (std::size_t k = 0; k + 1 < s.size(); ++k) next[k] = (s[k + 1] - q * s[k]) / (1.0 - q);
        s = std::move(next);
    }
    ExtrapResult r;
    r.value = s.back();
    r.uncertainty = s.size() >= 2 ? std::fabs(s.back() - s[s.size() - 2]) : 0.0;
    return r;
}

template <class K, class G>
PvResult pv_core(int d, K&& kernel_at, G&& f, const Point& x, const QuadratureConfig& cfg,
                 double outer_radius) {
    validate_quadrature(cfg);
    auto g = [&](const Point& y) {
        double fv = f(y);
        if (fv == 0.0) return 0.0;
        return kernel_at(y) * fv;
    };
    const auto& radii = cfg.pv_radii;
    double shell_tol = std::max(10.0 * cfg.tol, 1e-8);

    PvResult r;
    r.truncation_radius = outer_radius;
    double acc = shell_integral(d, x, g, radii.front(), outer_radius, shell_tol, cfg.n_theta);
    r.partial.push_back(acc);
    for (std::size_t k = 1; k < radii.size(); ++k) {
        acc += shell_integral(d, x, g, radii[k], radii[k - 1], shell_tol, cfg.n_theta);
        r.partial.push_back(acc);
    }

    double ratio = 0.5;
    if (geometric_ladder(radii, ratio)) {
        ExtrapResult e = extrapolate_ladder(r.partial, ratio);
        r.value = e.value;
        r.uncertainty = e.uncertainty;
    } else {
        std::size_t last = r.partial.size() - 1;
        double a1 = aitken_limit(r.partial, last);
        double a0 = aitken_limit(r.partial, last - 1);
        r.value = a1;
        r.uncertainty = std::fabs(a1 - a0);
    }
    r.cauchy = r.uncertainty <= cfg.pv_tol * std::max(1.0, std::fabs(r.value));
    return r;
}

inline double truncation_radius(const Point& x, const QuadratureConfig& cfg) {
    if (cfg.domain_truncation_radius > 0.0) return cfg.domain_truncation_radius;
    return std::max(8.0, norm(x) + 6.0);
}

}  // namespace detail

inline PvResult pv_apply(const KernelFamily& fam, const ScalarField& f, const Point& x,
                         const QuadratureConfig& cfg) {
    auto k = [&](const Point& y) { return kernel_new(x, y, fam, cfg); };
    PvResult r = detail::pv_core(static_cast<int>(x.size()), k, f, x, cfg, detail::truncation_radius(x, cfg));
    if (!r.cauchy) throw std::runtime_error("pv_apply: exclusion ladder did not converge");
    return r;
}

inline PvResult pv_apply_old(const MultiIndex& alpha, double scale, const ScalarField& f, const Point& x,
                             const QuadratureConfig& cfg) {
    auto k = [&](const Point& y) { return kernel_old(x, y, alpha, cfg, scale); };
    PvResult r = detail::pv_core(static_cast<int>(x.size()), k, f, x, cfg, detail::truncation_radius(x, cfg));
    if (!r.cauchy) throw std::runtime_error("pv_apply_old: exclusion ladder did not converge");
    return r;
}

inline PvResult pv_apply(const KernelFamily& fam, const GridFunction& f, const Point& x,
                         const QuadratureConfig& cfg) {
    return pv_apply(fam, field_from_grid(f), x, cfg);
}

inline PvResult pv_apply_old(const MultiIndex& alpha, double scale, const GridFunction& f, const Point& x,
                             const QuadratureConfig& cfg) {
    return pv_apply_old(alpha, scale, field_from_grid(f), x, cfg);
}

// convolution with the homogeneous kernel, with symmetric annular exclusion
inline PvResult pv_homogeneous(const KernelFamily& fam, const ScalarField& f, const Point& x,
                               const QuadratureConfig& cfg) {
    auto k = [&](const Point& y) {
        Point z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
        return homogeneous_kernel(fam, z);
    };
    PvResult r = detail::pv_core(static_cast<int>(x.size()), k, f, x, cfg, detail::truncation_radius(x, cfg));
    if (!r.cauchy) throw std::runtime_error("pv_homogeneous: exclusion ladder did not converge");
    return r;
}

// --- local/global split ----------------------------------------------------

struct SplitResult {
    double local_part = 0.0;
    double global_part = 0.0;
};

inline SplitResult local_global_split(const KernelFamily& fam, const ScalarField& f, const Point& x,
                                      const QuadratureConfig& cfg) {
    const int d = static_cast<int>(x.size());
    double rh = hyperbolic_radius(x);
    auto k = [&](const Point& y) { return kernel_new(x, y, fam, cfg); };
    auto g = [&](const Point& y) {
        double fv = f(y);
        return fv == 0.0 ? 0.0 : k(y) * fv;
    };

    QuadratureConfig local_cfg = cfg;
    local_cfg.pv_radii.clear();
    for (int j = 1; j <= 8; ++j) local_cfg.pv_radii.push_back(rh * std::pow(2.0, -j));
    PvResult local = detail::pv_core(d, k, f, x, local_cfg, rh);
    if (!local.cauchy) throw std::runtime_error("local_global_split: local ladder did not converge");

    SplitResult r;
    r.local_part = local.value;
    r.global_part =
        detail::shell_integral(d, x, g, rh, detail::truncation_radius(x, cfg), std::max(cfg.tol, 1e-9), cfg.n_theta);
    return r;
}

// --- structured check reports ----------------------------------------------

struct KernelCheckReport {
    std::string check;
    std::string sample;
    int n_samples = 0;
    double fitted_constant = 0.0;
    double stability_delta = 0.0;
    bool pass = false;
    std::string notes;
};

// non-centered Hardy-Littlewood maximal function of f restricted to a ball,
// approximated over a candidate family of balls containing x
inline double hardy_littlewood_restricted(const ScalarField& f, const Ball& window, const Point& x,
                                          double max_radius) {
    const int d = static_cast<int>(x.size());
    auto ball_average = [&](const Ball& b) {
        auto g = [&](const Point& y) {
            return window.contains(y) ? std::fabs(f(y)) : 0.0;
        };
        double vol, integral;
        if (d == 1) {
            vol = 2.0 * b.radius;
            integral = adaptive_gauss_legendre(
                [&](double t) {
                    Point y{b.center[0] + t};
                    return g(y);
                },
                -b.radius, b.radius, 1e-7, 4);
        } else {
            vol = M_PI * b.radius * b.radius;
            Point y(2);
            auto ring = [&](double s) {
                double acc = 0.0;
                const int n_th = 16;
                for (int j = 0; j < n_th; ++j) {
                    double th = 2.0 * M_PI * (j + 0.5) / n_th;
                    y[0] = b.center[0] + s * std::cos(th);
                    y[1] = b.center[1] + s * std::sin(th);
                    acc += g(y);
                }
                return acc * (2.0 * M_PI / n_th) * s;
            };
            integral = adaptive_gauss_legendre(ring, 0.0, b.radius, 1e-7, 4);
        }
        return integral / vol;
    };

    double best = 0.0;
    for (double radius = max_radius; radius >= 1e-3; radius *= 0.5) {
        for (double off : {0.0, -0.6, 0.6}) {
            Ball b(x, radius);
            b.center[0] = x[0] + off * radius;
            if (!b.contains(x)) continue;
            best = std::max(best, ball_average(b));
        }
    }
    return best;
}

// pointwise domination of the local part by the homogeneous singular integral
// plus the maximal function, summed over the balls of the admissible family
// that contain the sample point; family_hat holds the parallel dilates
inline KernelCheckReport local_domination_check(const KernelFamily& fam, const ScalarField& f,
                                                const std::vector<Point>& sample_x,
                                                const std::vector<Ball>& family,
                                                const std::vector<Ball>& family_hat,
                                                const QuadratureConfig& cfg) {
    if (family.size() != family_hat.size())
        throw std::invalid_argument("local_domination_check: families must be parallel");
    KernelCheckReport rep;
    rep.check = "local_domination";
    double worst = 0.0;
    int used = 0;
    for (const Point& x : sample_x) {
        bool covered = false;
        double rhs = 0.0;
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (!family[i].contains(x)) continue;
            covered = true;
            const Ball& hat = family_hat[i];
            ScalarField f_hat = f;
            auto base_eval = f.eval;
            Box base_support = f.support;
            f_hat.eval = [base_eval, base_support, hat](std::span<const double> y) {
                if (!hat.contains(y) || !base_support.contains(y)) return 0.0;
                return base_eval(y);
            };
            double tf = std::fabs(pv_homogeneous(fam, f_hat, x, cfg).value);
            double mhl = hardy_littlewood_restricted(f, hat, x, 2.0 * hat.radius);
            rhs += tf + mhl;
        }
        ++rep.n_samples;
        if (!covered) continue;

        SplitResult split = local_global_split(fam, f, x, cfg);
        double lhs = std::fabs(split.local_part);
        if (lhs <= 1e-14 && rhs <= 1e-14) continue;
        if (rhs <= 1e-14) {
            rep.notes = "zero majorant against nonzero local part";
            rep.fitted_constant = std::numeric_limits<double>::infinity();
            rep.pass = false;
            return rep;
        }
        worst = std::max(worst, lhs / rhs);
        ++used;
    }
    rep.fitted_constant = worst;
    rep.pass = used == 0 || std::isfinite(worst);
    return rep;
}

// admissible eps range for the global comparison: 0 < eps < 1/(2 p_inf') and 1/d
inline double global_eps_limit(double p_inf, int d) {
    double conj = p_inf / (p_inf - 1.0);
    return std::min(1.0 / (2.0 * conj), 1.0 / d);
}

inline double alpha_infinity(double p_inf, double eps) {
    return 0.5 * (1.0 - eps) - std::fabs(1.0 / p_inf - 0.5 * (1.0 - 3.0 * eps));
}

struct GlobalBoundReport {
    double eps = 0.0;
    double alpha_inf = 0.0;
    double fitted_c = 0.0;   // sup |Gf| / majorant over the sample
    double d_sup = 0.0;      // sup of the P-kernel integral over the sample
    int n_samples = 0;
    bool pass = false;
};

inline GlobalBoundReport global_bound_check(const KernelFamily& fam, const ExponentSpec& pspec, double eps,
                                            const ScalarField& f, const std::vector<Point>& sample_x,
                                            const QuadratureConfig& cfg) {
    const int d = fam.F.dim;
    if (pspec.dim != d) throw std::invalid_argument("global_bound_check: dimension mismatch");
    std::optional<double> p_inf = p_limit(pspec);
    if (!p_inf) throw std::invalid_argument("global_bound_check: exponent needs a limit at infinity");
    if (!(eps > 0.0 && eps < global_eps_limit(*p_inf, d)))
        throw std::invalid_argument("global_bound_check: eps outside the admissible range");

    GlobalBoundReport rep;
    rep.eps = eps;
    rep.alpha_inf = alpha_infinity(*p_inf, eps);
    const double p_minus = p_min(pspec);

    // Gaussian p^- norm of f through the shared grid quadrature
    GridFunction grid = default_grid(MeasureHandle{MeasureKind::gaussian, d});
    fill(grid, [&](const Point& y) { return f(y); });
    ExponentSpec const_spec;
    const_spec.kind = ExponentKind::constant;
    const_spec.dim = d;
    const_spec.value = p_minus;
    double norm_pminus = luxemburg_norm(grid, const_spec);

    for (const Point& x : sample_x) {
        SplitResult split = local_global_split(fam, f, x, cfg);
        double lhs = std::fabs(split.global_part);

        double rh = hyperbolic_radius(x);
        double px = evaluate(pspec, x);
        auto weighted = [&](const Point& y) {
            double fv = std::fabs(f(y));
            if (fv == 0.0) return 0.0;
            double sum = 0.0, diff = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                double s = x[i] + y[i], dd = x[i] - y[i];
                sum += s * s;
                diff += dd * dd;
            }
            double p_kernel = std::pow(std::sqrt(sum), static_cast<double>(d)) *
                              std::exp(-rep.alpha_inf * std::sqrt(sum) * std::sqrt(diff));
            return p_kernel * fv * std::exp(-norm_sq(y) / evaluate(pspec, y));
        };
        double p_integral = detail::shell_integral(d, x, weighted, rh, detail::truncation_radius(x, cfg),
                                                   1e-8, cfg.n_theta);
        rep.d_sup = std::max(rep.d_sup, p_integral);

        double majorant = std::exp(eps * norm_sq(x)) * norm_pminus +
                          std::exp(norm_sq(x) / px) * p_integral;
        ++rep.n_samples;
        if (majorant > 0.0) rep.fitted_c = std::max(rep.fitted_c, lhs / majorant);
    }
    rep.pass = std::isfinite(rep.fitted_c) && std::isfinite(rep.d_sup);
    return rep;
}

struct BoundsExpReport {
    double eps = 0.0;
    double c_eps_bneg = 0.0;       // fitted constant for pairs with b <= 0
    double c_eps_bpos = 0.0;       // fitted constant for pairs with b > 0
    double delta_bneg = 0.0;       // growth of the constants when doubling
    double delta_bpos = 0.0;
    int n_bneg = 0;
    int n_bpos = 0;
    bool pass = false;
};

namespace detail {

inline void random_direction(Rng& rng, Point& out) {
    double s = 0.0;
    for (double& c : out) {
        c = rng.normal();
        s += c * c;
    }
    s = std::sqrt(std::max(s, 1e-300));
    for (double& c : out) c /= s;
}

// ratio of |kernel| to the closed-form bound for the sign class of b
inline double boundsexp_ratio(std::span<const double> x, std::span<const double> y,
                              const KernelFamily& fam, double eps, const QuadratureConfig& cfg) {
    KernelGeometry geo = kernel_geometry(x, y);
    double val = std::fabs(kernel_new(x, y, fam, cfg));
    if (val == 0.0) return 0.0;
    double log_bound;
    if (geo.b <= 0.0) {
        log_bound = eps * norm_sq(x) - norm_sq(y);
    } else {
        log_bound = -(1.0 - eps) * geo.u0 - 0.5 * double(x.size()) * std::log(geo.t0) +
                    eps * (norm_sq(x) - norm_sq(y));
    }
    return val * std::exp(-log_bound);
}

// coordinate pattern search with shrinking steps; moves that do not improve
// the value are undone, and p ends at the best point found
inline double pattern_search_max(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double>& p, std::span<const double> steps,
                                 double value) {
    double h = 1.0;
    for (int round = 0; round < 60 && h > 2e-3; ++round) {
        bool improved = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            for (double sgn : {1.0, -1.0}) {
                double save = p[i];
                p[i] = save + sgn * h * steps[i];
                double v = f(p);
                if (v > value) {
                    value = v;
                    improved = true;
                    break;
                }
                p[i] = save;
            }
        }
        if (!improved) h *= 0.5;
    }
    return value;
}

// rescale v onto [lo, hi] radii without changing its direction; returns false
// when v is too close to the origin to carry a direction
inline bool clamp_radius(std::vector<double>& v, double lo, double hi) {
    double r = std::sqrt(norm_sq(v));
    if (r < 1e-12) return false;
    double target = std::clamp(r, lo, hi);
    if (target != r)
        for (double& c : v) c *= target / r;
    return true;
}

}  // namespace detail

// fitted constants of the two global kernel bounds over seeded global-region
// pairs, n_pairs per sign class; stability compares the constant fitted on the
// first n_pairs samples of a class against the one fitted after doubling.
// The b > 0 class is stratified over u0 (log-uniform targets reached by
// bisection along a ray from x) because the extremal ratio lives on a thin
// band of u0 values that plain offset sampling rarely visits, and each stage
// sharpens its raw maximum by a pattern search started at the best sample, so
// the fitted constant estimates the supremum over the whole sampling family
// rather than the largest draw.
inline BoundsExpReport boundsexp_check(const KernelFamily& fam, double eps, int n_pairs,
                                       std::uint64_t seed, const QuadratureConfig& cfg) {
    const int d = fam.F.dim;
    if (!(eps > 0.0 && eps < 1.0 / d))
        throw std::invalid_argument("boundsexp_check: need 0 < eps < 1/d");
    if (n_pairs < 2) throw std::invalid_argument("boundsexp_check: need n_pairs >= 2");
    Rng rng(seed);
    BoundsExpReport rep;
    rep.eps = eps;

    // b > 0: params are (x, ray direction, log target u0)
    auto eval_bpos = [&](std::span<const double> p) -> double {
        Point xx(p.begin(), p.begin() + d);
        Point ee(p.begin() + d, p.begin() + 2 * d);
        if (!detail::clamp_radius(xx, 0.2, 3.5) || !detail::clamp_radius(ee, 1.0, 1.0)) return -1.0;
        double target = std::exp(std::clamp(p[2 * d], std::log(1e-2), std::log(400.0)));
        Point yy(d);
        auto place = [&](double s) {
            for (int i = 0; i < d; ++i) yy[i] = xx[i] + s * ee[i];
        };
        double s_lo = hyperbolic_radius(xx), s_hi = 60.0;
        place(s_lo);
        double u_lo = kernel_geometry(xx, yy).u0;
        place(s_hi);
        double u_hi = kernel_geometry(xx, yy).u0;
        if (!(target > u_lo && target < u_hi)) return -1.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (s_lo + s_hi);
            place(mid);
            if (kernel_geometry(xx, yy).u0 < target)
                s_lo = mid;
            else
                s_hi = mid;
        }
        place(0.5 * (s_lo + s_hi));
        if (!(dot(xx, yy) > 0.0)) return -1.0;
        return detail::boundsexp_ratio(xx, yy, fam, eps, cfg);
    };

    // b <= 0: params are (x, y) directly
    auto eval_bneg = [&](std::span<const double> p) -> double {
        Point xx(p.begin(), p.begin() + d);
        Point yy(p.begin() + d, p.begin() + 2 * d);
        if (!detail::clamp_radius(xx, 0.2, 3.5) || !detail::clamp_radius(yy, 0.05, 3.0)) return -1.0;
        if (dot(xx, yy) > 0.0 || dist(xx, yy) < hyperbolic_radius(xx)) return -1.0;
        return detail::boundsexp_ratio(xx, yy, fam, eps, cfg);
    };

    {
        std::vector<double> p(2 * d + 1), best_p(2 * d + 1);
        std::vector<double> steps(2 * d + 1, 0.5);
        steps[2 * d] = 0.8;
        double raw_best = -1.0, polished = 0.0;
        for (int n = 0; n < 2 * n_pairs; ++n) {
            double val = -1.0;
            Point xdir(d), e(d);
            while (val < 0.0) {
                detail::random_direction(rng, xdir);
                double rad = rng.uniform(0.2, 3.5);
                detail::random_direction(rng, e);
                for (int i = 0; i < d; ++i) {
                    p[i] = rad * xdir[i];
                    p[d + i] = e[i];
                }
                p[2 * d] = std::log(rng.log_uniform(1e-2, 400.0));
                val = eval_bpos(p);
            }
            if (val > raw_best) {
                raw_best = val;
                best_p = p;
            }
            ++rep.n_bpos;
            if (rep.n_bpos == n_pairs || rep.n_bpos == 2 * n_pairs) {
                std::vector<double> q = best_p;
                double v = detail::pattern_search_max(eval_bpos, q, steps, raw_best);
                polished = std::max(polished, v);
                if (rep.n_bpos == n_pairs)
                    rep.c_eps_bpos = polished;
                else
                    rep.delta_bpos = polished > 0.0 ? 1.0 - rep.c_eps_bpos / polished : 0.0;
            }
        }
        rep.c_eps_bpos = polished;
    }

    {
        std::vector<double> p(2 * d), steps(2 * d, 0.4), best_p(2 * d);
        double raw_best = -1.0, polished = 0.0;
        Point x(d), y(d);
        for (int n = 0; n < 2 * n_pairs; ++n) {
            double val = -1.0;
            while (val < 0.0) {
                detail::random_direction(rng, x);
                double rad = rng.uniform(0.2, 3.5);
                detail::random_direction(rng, y);
                if (dot(x, y) > 0.0)
                    for (int i = 0; i < d; ++i) y[i] = -y[i];
                double ry = rng.uniform(0.05, 3.0);
                for (int i = 0; i < d; ++i) {
                    p[i] = rad * x[i];
                    p[d + i] = ry * y[i];
                }
                val = eval_bneg(p);
            }
            if (val > raw_best) {
                raw_best = val;
                best_p = p;
            }
            ++rep.n_bneg;
            if (rep.n_bneg == n_pairs || rep.n_bneg == 2 * n_pairs) {
                std::vector<double> q = best_p;
                double v = detail::pattern_search_max(eval_bneg, q, steps, raw_best);
                polished = std::max(polished, v);
                if (rep.n_bneg == n_pairs)
                    rep.c_eps_bneg = polished;
                else
                    rep.delta_bneg = polished > 0.0 ? 1.0 - rep.c_eps_bneg / polished : 0.0;
            }
        }
        rep.c_eps_bneg = polished;
    }

    rep.pass = std::isfinite(rep.c_eps_bneg) && std::isfinite(rep.c_eps_bpos) &&
               rep.delta_bneg < 0.10 && rep.delta_bpos < 0.10;
    return rep;
}

// --- spectral calibration ---------------------------------------------------

// the r-truncated definition of the transform and the annular principal
// value differ by a multiple of the identity (the absolute t-integral
// diverges at t = 0, so the two integration orders have a finite defect);
// the calibrated transform is  scale·(annular pv) + local·f(x), with both
// constants pinned by solving two eigenfunction equations
struct KernelCalibration {
    double scale = 1.0;
    double local = 0.0;
    Point x1, x2;  // calibration points used for the linear solve
};

namespace detail {

// solve target_i = scale * pv_i + local * f(x_i) from the best-conditioned
// pair among the candidate points
inline KernelCalibration solve_calibration(const std::vector<Point>& candidates,
                                           const std::vector<double>& pv_values,
                                           const std::vector<double>& f_values,
                                           const std::vector<double>& targets) {
    KernelCalibration best;
    double best_det = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            double det = pv_values[i] * f_values[j] - pv_values[j] * f_values[i];
            double norm = std::max({std::fabs(pv_values[i]), std::fabs(pv_values[j]), 1e-300}) *
                          std::max({std::fabs(f_values[i]), std::fabs(f_values[j]), 1e-300});
            double quality = std::fabs(det) / norm;
            if (quality > best_det) {
                best_det = quality;
                best.scale = (targets[i] * f_values[j] - targets[j] * f_values[i]) / det;
                best.local = (pv_values[i] * targets[j] - pv_values[j] * targets[i]) / det;
                best.x1 = candidates[i];
                best.x2 = candidates[j];
            }
        }
    }
    if (best_det <= 1e-10) throw std::runtime_error("solve_calibration: degenerate point pair");
    return best;
}

inline std::vector<Point> calibration_points(int d) {
    std::vector<Point> pts;
    for (double c : {0.35, 0.6, -0.5}) pts.emplace_back(d, c / std::sqrt(static_cast<double>(d)));
    return pts;
}

}  // namespace detail

inline KernelCalibration calibrate_new(const MultiIndex& alpha, const QuadratureConfig& cfg) {
    KernelFamily fam = kernel_family(alpha);
    HermiteExpansion basis = HermiteExpansion::basis(alpha);
    ScalarField f = field_from_expansion(basis);
    HermiteExpansion target = riesz_on_basis(RieszVariant::raising, alpha, alpha);

    std::vector<Point> pts = detail::calibration_points(alpha.dim());
    std::vector<double> pv, fv, tv;
    for (const Point& x : pts) {
        pv.push_back(pv_apply(fam, f, x, cfg).value);
        fv.push_back(basis.eval(x));
        tv.push_back(target.eval(x));
    }
    return detail::solve_calibration(pts, pv, fv, tv);
}

inline KernelCalibration calibrate_old(const MultiIndex& alpha, const QuadratureConfig& cfg) {
    HermiteExpansion basis = HermiteExpansion::basis(alpha);
    ScalarField f = field_from_expansion(basis);
    HermiteExpansion target = riesz_on_basis(RieszVariant::lowering, alpha, alpha);

    std::vector<Point> pts = detail::calibration_points(alpha.dim());
    // keep the conventional interior point among the candidates
    pts.emplace_back(alpha.dim(), 0.7 / std::sqrt(static_cast<double>(alpha.dim())));
    std::vector<double> pv, fv, tv;
    for (const Point& x : pts) {
        pv.push_back(pv_apply_old(alpha, 1.0, f, x, cfg).value);
        fv.push_back(basis.eval(x));
        tv.push_back(target.eval(x));
    }
    return detail::solve_calibration(pts, pv, fv, tv);
}

inline KernelFamily calibrated_family(const MultiIndex& alpha, const QuadratureConfig& cfg) {
    KernelCalibration cal = calibrate_new(alpha, cfg);
    KernelFamily fam = kernel_family(alpha, cal.scale);
    fam.local = cal.local;
    return fam;
}

// calibrated raising transform through its kernel
inline double riesz_kernel_apply(const KernelFamily& fam, const ScalarField& f, const Point& x,
                                 const QuadratureConfig& cfg) {
    return pv_apply(fam, f, x, cfg).value + fam.local * f(x);
}

// calibrated lowering transform through its kernel
inline double riesz_kernel_apply_old(const MultiIndex& alpha, const KernelCalibration& cal,
                                     const ScalarField& f, const Point& x, const QuadratureConfig& cfg) {
    return pv_apply_old(alpha, cal.scale, f, x, cfg).value + cal.local * f(x);
}

}  // namespace gaussvar
