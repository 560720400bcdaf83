/**
 * @file trajectories.hpp
 * @brief Closed-form motions in the fictitious time tau and their physical time laws.
 *
 * Upstairs, a motion is X(tau) = cos tau u + sin tau v (E < 0), u + tau v
 * (E = 0) or cosh tau u + sinh tau v (E > 0); the physical time obeys
 * dt/dtau = c X(tau)^2 with c = sqrt(2/|E|), or c = 1 for E = 0 with the
 * normalisation v^2 = 1/2.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "regularization.hpp"

namespace o1kepler {

enum class EnergyClass { Elliptic, Parabolic, Hyperbolic };

inline std::string_view to_string(EnergyClass c) {
    switch (c) {
        case EnergyClass::Elliptic: return "elliptic";
        case EnergyClass::Parabolic: return "parabolic";
        case EnergyClass::Hyperbolic: return "hyperbolic";
    }
    return "unknown";
}

inline std::optional<EnergyClass> parse_energy_class(std::string_view s) {
    if (s == "elliptic") return EnergyClass::Elliptic;
    if (s == "parabolic") return EnergyClass::Parabolic;
    if (s == "hyperbolic") return EnergyClass::Hyperbolic;
    return std::nullopt;
}

namespace tol {
inline constexpr double dependence = 1e-12;   ///< |u.v|^2 >= (1 - this) u^2 v^2 means dependent
inline constexpr double time = 1e-12;         ///< relative residual accepted by invert_time
inline constexpr double normalized = 1e-12;   ///< |v^2 - 1/2| for a normalised parabolic spec
}  // namespace tol

/// Closed interval [begin, end] of physical or fictitious time.
struct TimeSpan {
    double begin;
    double end;
};

/// (class, u, v): the full closed-form description of one motion.
struct TrajectorySpec {
    EnergyClass energy_class;
    Vector u;
    Vector v;

    TrajectorySpec(EnergyClass c, Vector u_, Vector v_)
        : energy_class(c), u(std::move(u_)), v(std::move(v_)) {
        if (u.size() < 2) throw InvalidInput("TrajectorySpec: dimension must be at least 2");
        if (u.size() != v.size()) throw InvalidInput("TrajectorySpec: u and v dimensions differ");
        if (!u.allFinite() || !v.allFinite())
            throw InvalidInput("TrajectorySpec: non-finite component");
        if (!(u.norm() >= tol::origin)) throw InvalidInput("TrajectorySpec: u must be nonzero");
        if (c == EnergyClass::Parabolic && !(v.norm() > 0.0))
            throw InvalidInput("TrajectorySpec: parabolic motion needs v != 0");
        if (c == EnergyClass::Hyperbolic && !(v.squaredNorm() > u.squaredNorm()))
            throw InvalidInput("TrajectorySpec: hyperbolic motion needs v^2 > u^2");
    }

    int n() const { return static_cast<int>(u.size()); }
};

/// u and v linearly dependent, i.e. the motion hits the origin.
inline bool colliding(const TrajectorySpec& s) {
    const double uv = s.u.dot(s.v);
    return uv * uv >= (1.0 - tol::dependence) * s.u.squaredNorm() * s.v.squaredNorm();
}

inline Vector position_up(const TrajectorySpec& s, double tau) {
    switch (s.energy_class) {
        case EnergyClass::Elliptic: return std::cos(tau) * s.u + std::sin(tau) * s.v;
        case EnergyClass::Parabolic: return s.u + tau * s.v;
        case EnergyClass::Hyperbolic: return std::cosh(tau) * s.u + std::sinh(tau) * s.v;
    }
    return s.u;
}

/// dX/dtau.
inline Vector velocity_up(const TrajectorySpec& s, double tau) {
    switch (s.energy_class) {
        case EnergyClass::Elliptic: return -std::sin(tau) * s.u + std::cos(tau) * s.v;
        case EnergyClass::Parabolic: return s.v;
        case EnergyClass::Hyperbolic: return std::sinh(tau) * s.u + std::cosh(tau) * s.v;
    }
    return s.v;
}

inline ConePoint position_down(const TrajectorySpec& s, double tau) {
    const Vector X = position_up(s, tau);
    if (!(X.norm() >= tol::origin))
        throw CollisionError("position_down: collision at tau = " + std::to_string(tau), tau);
    return q_map(X);
}

inline double energy_of(const TrajectorySpec& s) {
    switch (s.energy_class) {
        case EnergyClass::Elliptic: return -1.0 / (s.u.squaredNorm() + s.v.squaredNorm());
        case EnergyClass::Parabolic: return 0.0;
        case EnergyClass::Hyperbolic: {
            const double gap = s.v.squaredNorm() - s.u.squaredNorm();
            if (!(gap > 0.0)) throw InvalidInput("energy_of: hyperbolic spec needs v^2 > u^2");
            return 1.0 / gap;
        }
    }
    return 0.0;
}

inline bool is_normalized(const TrajectorySpec& s) {
    return s.energy_class != EnergyClass::Parabolic ||
           std::abs(s.v.squaredNorm() - 0.5) <= tol::normalized;
}

/// A parabolic spec rescaled to v^2 = 1/2; tau_canonical = tau * tau_scale.
struct Canonical {
    TrajectorySpec spec;
    double tau_scale;
};

inline Canonical canonicalize(const TrajectorySpec& s) {
    if (s.energy_class != EnergyClass::Parabolic || is_normalized(s)) return {s, 1.0};
    const double speed = s.v.norm();
    if (!(speed > 0.0)) throw InvalidInput("canonicalize: parabolic spec with v = 0");
    const double scale = std::sqrt(2.0) * speed;
    return {TrajectorySpec(s.energy_class, s.u, s.v / scale), scale};
}

namespace detail {
inline void require_normalized(const TrajectorySpec& s, const char* op) {
    if (!is_normalized(s))
        throw InvalidInput(std::string(op) + ": parabolic spec must satisfy v^2 = 1/2; canonicalize first");
}
}  // namespace detail

/// c in dt/dtau = c X(tau)^2; for parabolic specs c = sqrt(2) |v|, which is 1 once normalised.
inline double time_scale(const TrajectorySpec& s) {
    if (s.energy_class == EnergyClass::Parabolic) return std::sqrt(2.0) * s.v.norm();
    return std::sqrt(2.0 / std::abs(energy_of(s)));
}

/// dt/dtau at tau.
inline double time_rate(const TrajectorySpec& s, double tau) {
    return time_scale(s) * position_up(s, tau).squaredNorm();
}

/// Physical time t(tau) with t(0) = 0.
inline double time_law(const TrajectorySpec& s, double tau) {
    detail::require_normalized(s, "time_law");
    const double u2 = s.u.squaredNorm();
    const double v2 = s.v.squaredNorm();
    const double uv = s.u.dot(s.v);
    switch (s.energy_class) {
        case EnergyClass::Elliptic:
            return std::sqrt(2.0 * (u2 + v2)) *
                   (0.5 * (u2 + v2) * tau + 0.25 * (u2 - v2) * std::sin(2.0 * tau) +
                    0.5 * uv * (1.0 - std::cos(2.0 * tau)));
        case EnergyClass::Parabolic:
            return u2 * tau + uv * tau * tau + tau * tau * tau / 6.0;
        case EnergyClass::Hyperbolic:
            return std::sqrt(2.0 * (v2 - u2)) *
                   (0.5 * (u2 - v2) * tau + 0.25 * (u2 + v2) * std::sinh(2.0 * tau) +
                    0.5 * uv * (std::cosh(2.0 * tau) - 1.0));
    }
    return 0.0;
}

/// Physical time for any spec; parabolic specs are rescaled internally.
inline double physical_time(const TrajectorySpec& s, double tau) {
    const Canonical c = canonicalize(s);
    return time_law(c.spec, tau * c.tau_scale);
}

/**
 * @brief tau with time_law(s, tau) = t.
 *
 * Bracketed Newton: t(tau) is strictly increasing, so the bracket is grown
 * geometrically from a first guess until it straddles t, and Newton steps
 * that leave the bracket fall back to bisection.
 */
inline double invert_time(const TrajectorySpec& s, double t, int max_iter = 200) {
    if (colliding(s)) throw InvalidInput("invert_time: colliding spec");
    detail::require_normalized(s, "invert_time");
    if (!std::isfinite(t)) throw InvalidInput("invert_time: non-finite time");

    double guess = 0.0;
    if (s.energy_class == EnergyClass::Elliptic) {
        // t(tau) stays within a bounded distance of its linear part
        const double slope = time_scale(s) * 0.5 * (s.u.squaredNorm() + s.v.squaredNorm());
        guess = t / slope;
    }
    const auto residual = [&](double tau) { return time_law(s, tau) - t; };

    double lo = guess, hi = guess;
    for (double step = 1.0; residual(lo) > 0.0; step *= 2.0) lo -= step;
    for (double step = 1.0; residual(hi) < 0.0; step *= 2.0) hi += step;

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double tau = std::clamp(guess, lo, hi);
    bool converged = false;
    for (int iter = 0; iter < max_iter && !converged; ++iter) {
        const double f = residual(tau);
        if (f == 0.0) {
            converged = true;
            break;
        }
        (f < 0.0 ? lo : hi) = tau;
        const double rate = time_rate(s, tau);
        double next = tau - f / rate;
        if (!(rate > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = next - tau;
        tau = next;
        const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
        converged = std::abs(step) <= 4.0 * eps * std::max(1.0, std::abs(tau)) ||
                    hi - lo <= 2.0 * eps * scale;
    }
    if (!converged || std::abs(residual(tau)) > tol::time * std::max(1.0, std::abs(t)))
        throw NumericalFailure("invert_time: no convergence for t = " + std::to_string(t));
    return tau;
}

/// Phase state (X, dX/dt) of the motion at tau.
inline RegState state_at(const TrajectorySpec& s, double tau) {
    const Vector X = position_up(s, tau);
    return RegState(X, velocity_up(s, tau) / time_rate(s, tau));
}

/**
 * @brief The spec whose motion passes through s at tau = 0.
 *
 * The class follows the sign of energy_reg(s), with |E| <= tol::energy_band
 * treated as zero; then u = X and v = c X^2 X'.
 */
inline TrajectorySpec spec_from_state(const RegState& s) {
    const double e = energy_reg(s);
    const double r2 = s.X.squaredNorm();
    if (std::abs(e) <= tol::energy_band)
        return TrajectorySpec(EnergyClass::Parabolic, s.X, r2 * s.Xdot);
    const EnergyClass c = e < 0.0 ? EnergyClass::Elliptic : EnergyClass::Hyperbolic;
    return TrajectorySpec(c, s.X, std::sqrt(2.0 / std::abs(e)) * r2 * s.Xdot);
}

}  // namespace o1kepler
