/**
 * @file checks.hpp
 * @brief Randomised invariant suites, one per module.
 *
 * Trial i of every suite draws from SplitMix64::stream(seed, i), so a run is
 * reproducible from (suite, trials, seed) alone.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dynamics.hpp"
#include "geometry.hpp"
#include "random.hpp"

namespace o1kepler {

struct PropertyResult {
    std::string suite;
    std::string name;
    double worst = 0.0;      ///< largest residual seen (or failure count)
    double threshold = 0.0;  ///< pass iff worst <= threshold
    bool passed = true;
};

namespace detail {

/// Running maximum of one property.
class Property {
public:
    Property(std::string suite, std::string name, double threshold)
        : r_{std::move(suite), std::move(name), 0.0, threshold, true} {}

    void observe(double residual) {
        if (!(residual <= r_.worst)) r_.worst = std::isnan(residual) ? INFINITY : residual;
    }
    /// Count a failed boolean check.
    void fail() { r_.worst += 1.0; }
    void require(bool ok) {
        if (!ok) fail();
    }

    PropertyResult finish() {
        r_.passed = r_.worst <= r_.threshold;
        return r_;
    }

private:
    PropertyResult r_;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline constexpr EnergyClass all_classes[] = {EnergyClass::Elliptic, EnergyClass::Parabolic,
                                              EnergyClass::Hyperbolic};

inline int order_for(int trial) { return 2 + trial % 7; }

inline SymMatrix random_sym(SplitMix64& rng, int n) { return SymMatrix(random_vector(rng, n * n).reshaped(n, n)); }

}  // namespace detail

inline std::vector<PropertyResult> check_jordan(int trials, std::uint64_t seed) {
    using detail::Property;
    Property assoc("jordan", "trace form associative", 1e-12);
    Property inverse("jordan", "restricted inverse on range", 1e-10);
    Property idempotent("jordan", "range projection idempotent", 1e-12);
    Property homog("jordan", "metric homogeneous of degree 2", 1e-12);
    Property cone("jordan", "q(X) lies on the rank-one cone", 0.0);
    for (int i = 0; i < trials; ++i) {
        auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        const int n = detail::order_for(i);
        const SymMatrix a = detail::random_sym(rng, n), b = detail::random_sym(rng, n), c = detail::random_sym(rng, n);
        assoc.observe(detail::rel(trace_inner(jordan_product(a, b), c), trace_inner(b, jordan_product(a, c))));

        const ConePoint x = random_cone_point(rng, n);
        const SymMatrix w = range_project(x, detail::random_sym(rng, n));
        const SymMatrix back = jordan_product(x.base(), restricted_inverse(TangentVector(x, w)).dir());
        inverse.observe((back - w).frobenius() / std::max(1e-300, w.frobenius()));
        idempotent.observe((range_project(x, w) - w).frobenius() / std::max(1.0, w.frobenius()));

        const double alpha = uniform(rng, -3.0, 3.0);
        const double base = metric_norm_sq(TangentVector(x, w));
        homog.observe(std::abs(metric_norm_sq(TangentVector(x, w * alpha)) - alpha * alpha * base) /
                      std::max(1e-300, alpha * alpha * base));

        cone.require(cone_check(q_map(random_vector_with_norm(rng, n, 1e-2, 1e2)).base(), tol::cone));
    }
    return {assoc.finish(), inverse.finish(), idempotent.finish(), homog.finish(), cone.finish()};
}

inline std::vector<PropertyResult> check_regularization(int trials, std::uint64_t seed) {
    using detail::Property;
    Property deck("regularization", "deck transformation q(-X) = q(X)", 0.0);
    Property kinetic("regularization", "kinetic term 4 X^2 Xdot^2", 1e-10);
    Property lagr("regularization", "pulled-back Lagrangian", 1e-10);
    Property energ("regularization", "pulled-back energy", 1e-10);
    Property trace("regularization", "velocity trace identity", 1e-10);
    Property lifted("regularization", "lift recovers both preimages", 1e-12);
    for (int i = 0; i < trials; ++i) {
        auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        const int n = detail::order_for(i);
        const RegState s(random_vector_with_norm(rng, n, 0.1, 10.0), random_vector(rng, n, -2.0, 2.0));
        deck.require(q_map(-s.X).base() == q_map(s.X).base());
        const TangentVector v = tangent_q(s);
        const double k = 4.0 * s.X.squaredNorm() * s.Xdot.squaredNorm();
        kinetic.observe(std::abs(metric_norm_sq(v) - k) / std::max(1.0, k));
        lagr.observe(detail::rel(lagrangian(v), lagrangian_reg(s)));
        energ.observe(detail::rel(energy(v), energy_reg(s)));
        trace.observe(velocity_trace_identity_check(s));
        const auto pre = lift(q_map(s.X));
        lifted.observe(std::min((pre[0] - s.X).norm(), (pre[1] - s.X).norm()) / s.X.norm());
    }
    return {deck.finish(), kinetic.finish(), lagr.finish(), energ.finish(), trace.finish(), lifted.finish()};
}

inline std::vector<PropertyResult> check_trajectories(int trials, std::uint64_t seed) {
    using detail::Property;
    Property consistent("trajectories", "energy_of matches energy of the state", 1e-9);
    Property zero("trajectories", "parabolic states have zero energy", 1e-12);
    Property monotone("trajectories", "time law strictly increasing", 0.0);
    Property inverse("trajectories", "invert_time o time_law = id", 1e-10);
    Property period("trajectories", "elliptic image has period pi", 1e-12);
    Property on_cone("trajectories", "images lie on the cone", 0.0);
    for (int i = 0; i < trials; ++i) {
        auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        for (EnergyClass cls : detail::all_classes) {
            const TrajectorySpec s = random_spec(rng, cls, detail::order_for(i));
            const double tau = uniform(rng, -3.0, 3.0);
            const double e = energy_of(s), got = energy_reg(state_at(s, tau));
            if (cls == EnergyClass::Parabolic)
                zero.observe(std::abs(got));
            else
                consistent.observe(std::abs(got - e) / std::abs(e));

            double a = uniform(rng, -5.0, 5.0), b = uniform(rng, -5.0, 5.0);
            if (a > b) std::swap(a, b);
            if (a < b) monotone.require(time_law(s, a) < time_law(s, b));

            const double t0 = uniform(rng, -10.0, 10.0);
            inverse.observe(std::abs(invert_time(s, time_law(s, t0)) - t0));

            on_cone.require(cone_check(position_down(s, tau).base(), tol::cone));
            if (cls == EnergyClass::Elliptic) {
                const SymMatrix x0 = position_down(s, tau).base();
                const SymMatrix x1 = position_down(s, tau + std::numbers::pi).base();
                period.observe((x0 - x1).frobenius() / std::max(1.0, x0.frobenius()));
            }
        }
    }
    return {consistent.finish(), zero.finish(), monotone.finish(), inverse.finish(), period.finish(), on_cone.finish()};
}

namespace detail {

/// Fixed-step endpoint errors of the fictitious circular motion over tau in [0, 8].
inline double fixed_step_error(double h) {
    IntegratorConfig cfg;
    cfg.rtol = cfg.atol = 1e6;
    cfg.max_step = cfg.initial_step = h;
    const Vector u = Vector::Unit(2, 0), v = Vector::Unit(2, 1);
    const auto out = integrate_fictitious(EnergyClass::Elliptic, u, v, {0.0, 8.0}, cfg);
    return (out.back().X - (std::cos(8.0) * u + std::sin(8.0) * v)).norm();
}

}  // namespace detail

/// Least-squares slope of log(error) against log(h) for h = 0.4, 0.2, 0.1, 0.05.
inline double convergence_order() {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double hs[] = {0.4, 0.2, 0.1, 0.05};
    for (double h : hs) {
        const double x = std::log(h), y = std::log(detail::fixed_step_error(h));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = std::size(hs);
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline std::vector<PropertyResult> check_dynamics(int trials, std::uint64_t seed) {
    using detail::Property;
    Property agree("dynamics", "physical integration matches closed form", 1e-6);
    Property drift("dynamics", "energy drift at rtol 1e-10", 1e-8);
    Property scaled("dynamics", "energy drift <= 10 rtol", 1.0);
    Property fict("dynamics", "fictitious integration matches closed form", 1e-8);
    for (int i = 0; i < trials; ++i) {
        auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        for (EnergyClass cls : detail::all_classes) {
            const TrajectorySpec s = random_spec(rng, cls, 2 + i % 4);
            std::vector<double> taus, times;
            for (int k = 0; k <= 10; ++k) {
                taus.push_back(k / 10.0);
                times.push_back(time_law(s, taus.back()));
            }
            const Trace tr = integrate_physical(state_at(s, 0.0), {0.0, times.back()}, IntegratorConfig{}, times);
            for (std::size_t k = 0; k < tr.size(); ++k) {
                const SymMatrix a = q_map(tr[k].state.X).base(), b = position_down(s, taus[k]).base();
                agree.observe((a - b).frobenius() / b.frobenius());
            }
            drift.observe(energy_drift(tr));

            const auto fs = integrate_fictitious(cls, s.u, s.v, {0.0, 1.0}, IntegratorConfig{});
            fict.observe((fs.back().X - position_up(s, 1.0)).norm() / position_up(s, 1.0).norm());
        }
        if (i < 5) {
            const RegState s0 = state_at(random_spec(rng, EnergyClass::Elliptic, 2 + i % 4), 0.0);
            for (double rtol : {1e-8, 1e-6}) {
                IntegratorConfig cfg;
                cfg.rtol = rtol;
                cfg.atol = rtol * 1e-2;
                scaled.observe(energy_drift(integrate_physical(s0, {0.0, 2.0 * std::numbers::pi}, cfg)) /
                               (10.0 * rtol));
            }
        }
    }
    PropertyResult order{"dynamics", "convergence order estimate (5 +- 0.5)", 0.0, 0.5, true};
    const double slope = convergence_order();
    order.worst = std::abs(slope - 5.0);
    order.passed = order.worst <= order.threshold;
    char buf[64];
    std::snprintf(buf, sizeof buf, " slope %.3f", slope);
    order.name += buf;
    return {agree.finish(), drift.finish(), scaled.finish(), fict.finish(), order};
}

inline std::vector<PropertyResult> check_geometry(int trials, std::uint64_t seed) {
    using detail::Property;
    Property planar("geometry", "images lie on the affine plane", 1e-9);
    Property fitted("geometry", "independent plane fit residual", 1e-9);
    Property conic("geometry", "conic fit agrees with energy class", 0.0);
    Property equiv("geometry", "group action commutes with q", 1e-12);
    Property transitive("geometry", "transporter residual", 1e-8);
    Property bounded("geometry", "elliptic image bounded by n(u^2 + v^2)", 1e-12);
    Property growth("geometry", "open images grow without bound", 0.0);
    for (int i = 0; i < trials; ++i) {
        auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        const int n = 2 + i % 4;
        for (EnergyClass cls : detail::all_classes) {
            const TrajectorySpec s = random_spec(rng, cls, n);
            const PlaneChart chart = plane_of(s);
            std::vector<SymMatrix> pts;
            for (double tau : tau_grid(cls, default_tau_window(cls), 24)) {
                pts.push_back(position_down(s, tau).base());
                planar.observe(plane_residual(chart, pts.back()) / std::max(1.0, pts.back().frobenius()));
            }
            double scale = 1.0;
            for (const auto& p : pts) scale = std::max(scale, p.frobenius());
            fitted.observe(fit_plane(pts).max_residual / scale);
            conic.require(classify_conic(sample_plane_points(s, 64)) == classify_spec(s));

            const GroupElement g(random_invertible(rng, n));
            const Vector X = position_up(s, 0.3);
            const SymMatrix lhs = q_map(g.matrix() * X).base();
            const SymMatrix rhs = act_point(g, q_map(X)).base();
            equiv.observe((lhs - rhs).frobenius() / std::max(1.0, rhs.frobenius()));

            if (cls == EnergyClass::Elliptic) {
                const double cap = n * (s.u.squaredNorm() + s.v.squaredNorm());
                for (double tau : tau_grid(cls, default_tau_window(cls), 24))
                    bounded.observe(std::max(0.0, position_down(s, tau).base().frobenius() - cap) / cap);
            } else {
                // quadratic (parabolic) or exponential (hyperbolic) growth: doubling |tau| from 20 at least doubles the norm
                for (double sign : {-1.0, 1.0}) {
                    const double near = position_down(s, 20.0 * sign).base().frobenius();
                    const double far = position_down(s, 40.0 * sign).base().frobenius();
                    growth.require(far >= 2.0 * near);
                }
            }
            if (cls != EnergyClass::Hyperbolic) {
                const TrajectorySpec to = random_spec(rng, cls, n);
                transitive.observe(transport_residual(transporter(s, to), s, to));
            }
        }
    }
    return {planar.finish(),     fitted.finish(),  conic.finish(), equiv.finish(),
            transitive.finish(), bounded.finish(), growth.finish()};
}

inline const std::vector<std::string_view>& suite_names() {
    static const std::vector<std::string_view> names = {"jordan", "regularization", "trajectories", "dynamics",
                                                        "geometry", "all"};
    return names;
}

/// @throws InvalidInput for an unknown suite or trials < 1.
inline std::vector<PropertyResult> run_checks(std::string_view suite, int trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidInput("check: trials must be >= 1");
    std::vector<PropertyResult> out;
    const auto add = [&](std::vector<PropertyResult> r) { out.insert(out.end(), r.begin(), r.end()); };
    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "jordan") known = true, add(check_jordan(trials, seed));
    if (all || suite == "regularization") known = true, add(check_regularization(trials, seed));
    if (all || suite == "trajectories") known = true, add(check_trajectories(trials, seed));
    if (all || suite == "dynamics") known = true, add(check_dynamics(trials, seed));
    if (all || suite == "geometry") known = true, add(check_geometry(trials, seed));
    if (!known) throw InvalidInput("check: unknown suite '" + std::string(suite) + "'");
    return out;
}

}  // namespace o1kepler
