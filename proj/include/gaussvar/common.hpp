#pragma once

// Shared small utilities: dense point/vector helpers, axis-aligned boxes,
// a deterministic RNG with canonical uniform/normal draws, and extended
// power/exponent arithmetic used by the variable-exponent machinery.
//
// The RNG is fixed to a specific algorithm (splitmix64 seeding + xoshiro256++)
// with explicit bit-to-double conversion so that sampled experiments are
// reproducible across standard library implementations; std::uniform_*
// distributions are implementation-defined and are deliberately avoided.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaussvar {

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

inline double dist(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dist: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Axis-aligned box, the sampling domain for pair/ball generators and grids.
struct Box {
    Point lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }

    static Box cube(int d, double half_width) {
        if (d < 1) throw std::invalid_argument("Box::cube: dimension must be >= 1");
        Box b;
        b.lo.assign(d, -half_width);
        b.hi.assign(d, half_width);
        return b;
    }

    bool contains(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

// Closed Euclidean ball, the common geometric object of the oscillation and
// measure machinery.
struct Ball {
    Point center;
    double radius = 1.0;

    int dim() const { return static_cast<int>(center.size()); }

    Ball() = default;
    Ball(Point c, double r) : center(std::move(c)), radius(r) {
        if (!(radius > 0.0)) throw std::invalid_argument("Ball: radius must be positive");
        if (center.empty()) throw std::invalid_argument("Ball: empty center");
    }

    bool contains(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim()) return false;
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) {
            double d = x[i] - center[i];
            s += d * d;
        }
        return s <= radius * radius * (1.0 + 1e-15);
    }
};

// --- deterministic RNG ----------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives independent stream seeds from a base seed and a purpose tag, so each
// sampler in a run has its own reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = base ^ 0x51b365ad1a5bd179ULL;
    for (char c : tag) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h = splitmix64(h);
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        spare_valid_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Log-uniform over [a,b], a,b > 0.
    double log_uniform(double a, double b) {
        if (!(a > 0.0) || !(b >= a)) throw std::invalid_argument("log_uniform: need 0 < a <= b");
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    int uniform_int(int n) {  // 0..n-1
        if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    // Standard normal via Marsaglia polar; algorithm fixed for reproducibility.
    double normal() {
        if (spare_valid_) {
            spare_valid_ = false;
            return spare_;
        }
        double u, v, q;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        spare_valid_ = true;
        return u * f;
    }

    Point point_in(const Box& box) {
        Point x(box.dim());
        for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i], box.hi[i]);
        return x;
    }

    // Uniform direction on the unit sphere.
    Point direction(int d) {
        if (d == 1) return Point{uniform() < 0.5 ? -1.0 : 1.0};
        Point x(d);
        double n2;
        do {
            for (auto& v : x) v = normal();
            n2 = norm_sq(x);
        } while (n2 == 0.0);
        double inv = 1.0 / std::sqrt(n2);
        for (auto& v : x) v *= inv;
        return x;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool spare_valid_ = false;
};

// --- extended arithmetic --------------------------------------------------

constexpr double inf = std::numeric_limits<double>::infinity();

// t^e for t in [0,1] with the conventions t^inf = 0 for t < 1 and 1^inf = 1,
// matching the pointwise meaning of gamma^{q(x,y)} when q is infinite.
inline double pow_ext(double t, double e) {
    if (t < 0.0 || t > 1.0) throw std::domain_error("pow_ext: base must lie in [0,1]");
    if (std::isinf(e)) return t < 1.0 ? 0.0 : 1.0;
    if (t == 0.0) return e == 0.0 ? 1.0 : 0.0;
    return std::pow(t, e);
}

// Holder conjugate with the endpoint conventions 1' = inf and inf' = 1.
inline double conjugate(double p) {
    if (p < 1.0) throw std::domain_error("conjugate: exponent below 1");
    if (p == 1.0) return inf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

inline double relative_gap(double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

}  // namespace gaussvar
