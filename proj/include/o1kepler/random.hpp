/**
 * @file random.hpp
 * @brief Deterministic random inputs for property checks.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "geometry.hpp"

namespace o1kepler {

/// SplitMix64: a 64-bit generator whose streams can be split by index.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Independent stream for trial `index` of a run seeded with `seed`.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 mixer(seed ^ index);
        mixer();
        return SplitMix64(mixer());
    }

private:
    std::uint64_t state_;
};

inline double uniform(SplitMix64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector random_vector(SplitMix64& rng, int n, double lo = -1.0, double hi = 1.0) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = uniform(rng, lo, hi);
    return x;
}

/// Nonzero vector with norm in [lo, hi] (log-uniform) and uniform direction.
inline Vector random_vector_with_norm(SplitMix64& rng, int n, double lo, double hi) {
    std::normal_distribution<double> normal;
    Vector x(n);
    do {
        for (int i = 0; i < n; ++i) x(i) = normal(rng);
    } while (x.norm() < 1e-3);
    const double r = std::exp(uniform(rng, std::log(lo), std::log(hi)));
    return x.normalized() * r;
}

inline Matrix random_orthogonal(SplitMix64& rng, int n) {
    Matrix a(n, n);
    std::normal_distribution<double> normal;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// Well-conditioned invertible matrix: orthogonal * diag in [0.5, 2] * orthogonal.
inline Matrix random_invertible(SplitMix64& rng, int n) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
    return random_orthogonal(rng, n) * d.asDiagonal() * random_orthogonal(rng, n);
}

/**
 * @brief Random unit-scale non-colliding spec of the given class.
 *
 * |u|, |v| are drawn from [0.5, 1.5] with |sin(angle(u, v))| >= min_sine.
 * Hyperbolic specs get |v|^2 >= |u|^2 + 0.25; parabolic specs are normalised
 * to v^2 = 1/2.
 */
inline TrajectorySpec random_spec(SplitMix64& rng, EnergyClass cls, int n, double min_sine = 0.3) {
    for (;;) {
        Vector u = random_vector_with_norm(rng, n, 0.5, 1.5);
        Vector v = random_vector_with_norm(rng, n, 0.5, 1.5);
        const double cosine = u.dot(v) / (u.norm() * v.norm());
        if (1.0 - cosine * cosine < min_sine * min_sine) continue;
        if (cls == EnergyClass::Parabolic) v *= std::sqrt(0.5) / v.norm();
        if (cls == EnergyClass::Hyperbolic) {
            const double target = std::sqrt(u.squaredNorm() + uniform(rng, 0.25, 2.0));
            v *= target / v.norm();
        }
        return TrajectorySpec(cls, u, v);
    }
}

/// Random point of the rank-one cone with trace in roughly [1e-2, 1e2].
inline ConePoint random_cone_point(SplitMix64& rng, int n) {
    return q_map(random_vector_with_norm(rng, n, 0.1, 10.0) / std::sqrt(static_cast<double>(n)));
}

}  // namespace o1kepler
