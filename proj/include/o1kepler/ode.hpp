/**
 * @file ode.hpp
 * @brief Dormand-Prince 5(4) embedded Runge-Kutta pair with PI step control
 *        and the fourth-order continuous extension for dense output.
 *
 * Coefficients follow Hairer, Norsett & Wanner, Solving ODEs I, Table 5.2
 * and the dense-output formula of DOPRI5.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace o1kepler {

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 10'000'000;
    /// First trial step; 0 lets the caller's characteristic time decide.
    double initial_step = 0.0;

    void validate() const {
        if (!(rtol > 0.0)) throw InvalidInput("IntegratorConfig: rtol must be positive");
        if (!(atol > 0.0)) throw InvalidInput("IntegratorConfig: atol must be positive");
        if (!(max_step > 0.0)) throw InvalidInput("IntegratorConfig: max_step must be positive");
        if (max_steps == 0) throw InvalidInput("IntegratorConfig: max_steps must be positive");
        if (initial_step < 0.0) throw InvalidInput("IntegratorConfig: initial_step must be >= 0");
    }
};

namespace ode {

enum class Status { Completed, StepUnderflow, Singular, BudgetExceeded };

struct Sample {
    double t;
    Eigen::VectorXd y;
};

struct Result {
    Status status = Status::Completed;
    std::vector<Sample> samples;
    /// Last accepted point; the end of the span on success.
    double t_last = 0.0;
    Eigen::VectorXd y_last;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// fifth-order weights minus the embedded fourth-order ones
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

/**
 * @brief Integrate y' = f(t, y) over [t0, t1], t1 > t0.
 *
 * @param outputs  sorted times in [t0, t1] to report through dense output;
 *                 when empty every accepted step is reported, starting at t0.
 * @param singular predicate on an accepted state; true stops the run with
 *                 Status::Singular and leaves the previous state in y_last.
 * @param h0       first trial step when cfg.initial_step is 0.
 */
/**
 * Each step's error estimate is held to local_tolerance_factor * (atol + rtol |y|).
 * Per-step errors accumulate over a run, so the factor is what lets rtol act
 * as a bound on the error of a whole run (measured: energy drift <= rtol over
 * one orbit for rtol in [1e-10, 1e-3]) rather than on a single step.
 */
inline constexpr double local_tolerance_factor = 1e-3;

template <class Rhs, class Singular>
Result dopri5(Rhs&& f, double t0, double t1, const Eigen::VectorXd& y0,
              std::span<const double> outputs, const IntegratorConfig& cfg, Singular&& singular,
              double h0) {
    using Eigen::VectorXd;
    cfg.validate();
    if (!(t1 > t0)) throw InvalidInput("dopri5: span end must exceed span start");
    // times that overshoot t1 by rounding (t1 * k / k) are reported at t1
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t0), std::abs(t1));
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i] < t0 || outputs[i] > t1 + slack)
            throw InvalidInput("dopri5: output time outside the integration span");
        if (i > 0 && outputs[i] < outputs[i - 1])
            throw InvalidInput("dopri5: output times must be sorted");
    }

    Result res;
    const double span = t1 - t0;
    const bool every_step = outputs.empty();
    std::size_t next_out = 0;
    if (every_step) {
        res.samples.push_back({t0, y0});
    } else {
        while (next_out < outputs.size() && outputs[next_out] == t0)
            res.samples.push_back({outputs[next_out++], y0});
    }

    double t = t0;
    VectorXd y = y0;
    VectorXd k1 = f(t, y);
    double h = cfg.initial_step > 0.0 ? cfg.initial_step : h0;
    h = std::min({h, cfg.max_step, span});
    double err_prev = 1e-4;
    const double h_min = 1e-14 * span;
    const double rtol_local = std::max(cfg.rtol * local_tolerance_factor, 1e-15);
    const double atol_local = cfg.atol * local_tolerance_factor;

    auto finish = [&](Status s) {
        res.status = s;
        res.t_last = t;
        res.y_last = y;
        return res;
    };

    while (t < t1) {
        if (res.accepted + res.rejected >= cfg.max_steps) return finish(Status::BudgetExceeded);
        if (t + 1.0000001 * h >= t1) h = t1 - t;
        if (h < h_min && t + h < t1) return finish(Status::StepUnderflow);

        using namespace dp;
        const VectorXd k2 = f(t + c2 * h, y + h * (a21 * k1));
        const VectorXd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const VectorXd k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const VectorXd k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const VectorXd k6 =
            f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const VectorXd y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const VectorXd k7 = f(t + h, y1);

        const VectorXd err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const VectorXd scale = (atol_local + rtol_local * y.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
        double err = std::sqrt(err_vec.cwiseQuotient(scale).squaredNorm() / err_vec.size());
        if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

        if (err > 1.0) {
            ++res.rejected;
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= fac;
            if (h < h_min) return finish(Status::StepUnderflow);
            continue;
        }

        if (singular(y1)) return finish(Status::Singular);

        ++res.accepted;
        const double t_new = (h == t1 - t) ? t1 : t + h;
        if (every_step) {
            res.samples.push_back({t_new, y1});
        } else {
            const VectorXd r2 = y1 - y;
            const VectorXd r3 = h * k1 - r2;
            const VectorXd r4 = r2 - h * k7 - r3;
            const VectorXd r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            while (next_out < outputs.size() && (outputs[next_out] <= t_new || t_new == t1)) {
                const double to = outputs[next_out++];
                if (to >= t_new) {
                    res.samples.push_back({to, y1});
                    continue;
                }
                const double th = (to - t) / h;
                const double th1 = 1.0 - th;
                res.samples.push_back({to, y + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))});
            }
        }

        const double safe_err = std::max(err, 1e-10);
        double fac = 0.9 * std::pow(safe_err, -0.17) * std::pow(err_prev, 0.04);
        fac = std::clamp(fac, 0.2, 10.0);
        err_prev = std::max(err, 1e-4);
        t = t_new;
        y = y1;
        k1 = k7;
        h = std::min(h * fac, cfg.max_step);
    }
    return finish(Status::Completed);
}

}  // namespace ode
}  // namespace o1kepler
