/**
 * @file dynamics.hpp
 * @brief Numerical integration of the regularized equations of motion, used
 *        as an independent check of the closed-form trajectories.
 *
 * In physical time the Euler-Lagrange equation of 2 X^2 X'^2 + 1/X^2 reads
 * d/dt(4 X^2 X') = 2 E X / X^2. Expanding the left side gives
 *
 *     X'' = E X / (2 X^4) - 2 (X.X') X' / X^2,
 *
 * with E = energy_reg(s0) frozen at the initial state.
 */
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ode.hpp"
#include "trajectories.hpp"

namespace o1kepler {

struct TracePoint {
    double t;
    RegState state;
};

using Trace = std::vector<TracePoint>;

/// Integration stopped early; carries everything computed before the stop.
class IntegrationError : public std::runtime_error {
public:
    enum class Kind { Singularity, Budget };

    IntegrationError(Kind kind, const std::string& what, Trace partial)
        : std::runtime_error(what), kind_(kind), partial_(std::move(partial)) {}

    Kind kind() const noexcept { return kind_; }
    const Trace& partial() const noexcept { return partial_; }

private:
    Kind kind_;
    Trace partial_;
};

namespace tol {
inline constexpr double collision_r2 = 1e-10;  ///< X^2 below this stops physical integration
}

namespace detail {

inline Eigen::VectorXd pack(const Vector& a, const Vector& b) {
    Eigen::VectorXd y(a.size() + b.size());
    y << a, b;
    return y;
}

inline Trace to_trace(const std::vector<ode::Sample>& samples, Eigen::Index n) {
    Trace out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({s.t, RegState(s.y.head(n), s.y.tail(n))});
    return out;
}

}  // namespace detail

/// Right-hand side (X', V') of the physical-time system with frozen energy.
inline Eigen::VectorXd physical_field(const Eigen::VectorXd& y, double energy) {
    const auto n = y.size() / 2;
    const auto X = y.head(n);
    const auto V = y.tail(n);
    const double r2 = X.squaredNorm();
    Eigen::VectorXd dy(y.size());
    dy.head(n) = V;
    dy.tail(n) = (energy / (2.0 * r2 * r2)) * X - (2.0 * X.dot(V) / r2) * V;
    return dy;
}

/**
 * @brief Integrate from s0 over span in physical time.
 *
 * Samples are reported at `sample_times` (dense output) or, when that is
 * empty, at every accepted step. Throws IntegrationError on X^2 < 1e-10, on
 * step-size underflow, or when cfg.max_steps is exhausted.
 */
inline Trace integrate_physical(const RegState& s0, TimeSpan span, const IntegratorConfig& cfg,
                                std::span<const double> sample_times = {}) {
    const auto n = s0.X.size();
    const double energy = energy_reg(s0);
    const double r2 = s0.X.squaredNorm();
    const double speed = s0.Xdot.norm();
    const double h0 = speed > 0.0 ? std::min(1.0, 0.01 * r2 / speed) : 0.01 * std::min(1.0, r2);

    const auto rhs = [energy](double, const Eigen::VectorXd& y) { return physical_field(y, energy); };
    const auto hits_origin = [n](const Eigen::VectorXd& y) {
        return !(y.head(n).squaredNorm() >= tol::collision_r2);
    };
    ode::Result r = ode::dopri5(rhs, span.begin, span.end, detail::pack(s0.X, s0.Xdot),
                                sample_times, cfg, hits_origin, h0);

    switch (r.status) {
        case ode::Status::Completed:
            return detail::to_trace(r.samples, n);
        case ode::Status::BudgetExceeded:
            throw IntegrationError(IntegrationError::Kind::Budget,
                                   "integrate_physical: step budget exhausted at t = " +
                                       std::to_string(r.t_last),
                                   detail::to_trace(r.samples, n));
        case ode::Status::Singular:
        case ode::Status::StepUnderflow:
            break;
    }
    Trace partial = detail::to_trace(r.samples, n);
    if (partial.empty() || partial.back().t != r.t_last)
        partial.push_back({r.t_last, RegState(r.y_last.head(n), r.y_last.tail(n))});
    throw IntegrationError(IntegrationError::Kind::Singularity,
                           "integrate_physical: collision singularity after t = " +
                               std::to_string(r.t_last),
                           std::move(partial));
}

struct FictitiousSample {
    double tau;
    Vector X;
    Vector Xprime;  ///< dX/dtau
    double t;       ///< physical time accumulated from tau_span.begin
};

/**
 * @brief Integrate the linear equation X'' = -X, 0 or +X in tau, with
 *        X(0) = u, X'(0) = v, and the physical time by quadrature of
 *        dt/dtau = c X^2 alongside.
 */
inline std::vector<FictitiousSample> integrate_fictitious(EnergyClass cls, const Vector& u,
                                                          const Vector& v, TimeSpan tau_span,
                                                          const IntegratorConfig& cfg,
                                                          std::span<const double> sample_taus = {}) {
    const TrajectorySpec spec(cls, u, v);
    const double c = time_scale(spec);
    const double sign = cls == EnergyClass::Elliptic ? -1.0 : (cls == EnergyClass::Hyperbolic ? 1.0 : 0.0);
    const auto n = u.size();

    Eigen::VectorXd y0(2 * n + 1);
    y0 << position_up(spec, tau_span.begin), velocity_up(spec, tau_span.begin), 0.0;

    const auto rhs = [n, sign, c](double, const Eigen::VectorXd& y) {
        Eigen::VectorXd dy(y.size());
        dy.head(n) = y.segment(n, n);
        dy.segment(n, n) = sign * y.head(n);
        dy(2 * n) = c * y.head(n).squaredNorm();
        return dy;
    };
    const auto never = [](const Eigen::VectorXd&) { return false; };
    const double h0 = std::min(0.01, 0.01 * (tau_span.end - tau_span.begin));
    ode::Result r = ode::dopri5(rhs, tau_span.begin, tau_span.end, y0, sample_taus, cfg, never, h0);
    if (r.status != ode::Status::Completed)
        throw NumericalFailure("integrate_fictitious: integration stopped at tau = " +
                               std::to_string(r.t_last));

    std::vector<FictitiousSample> out;
    out.reserve(r.samples.size());
    for (const auto& s : r.samples)
        out.push_back({s.t, s.y.head(n), s.y.segment(n, n), s.y(2 * n)});
    return out;
}

/// Worst relative deviation of energy_reg from its initial value along a trace.
inline double energy_drift(const Trace& trace) {
    if (trace.empty()) throw InvalidInput("energy_drift: empty trace");
    const double e0 = energy_reg(trace.front().state);
    double worst = 0.0;
    for (const auto& p : trace) worst = std::max(worst, std::abs(energy_reg(p.state) - e0));
    return worst / std::max(1.0, std::abs(e0));
}

}  // namespace o1kepler
