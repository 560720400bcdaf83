/**
 * @file regularization.hpp
 * @brief The quadratic covering q(X) = n X X^t from R^n \ {0} onto the
 *        rank-one cone, its tangent map and the pulled-back Lagrangian.
 */
#pragma once

#include <array>
#include <cmath>
#include <string>

#include "jordan.hpp"

namespace o1kepler {

namespace tol {
inline constexpr double origin = 1e-12;  ///< |X| below this is the collision point upstairs
inline constexpr double energy_band = 1e-12;  ///< |E| at or below this counts as zero energy
}  // namespace tol

/// Phase point (X, X') upstairs in the double cover.
struct RegState {
    Vector X;
    Vector Xdot;

    RegState(Vector position, Vector velocity) : X(std::move(position)), Xdot(std::move(velocity)) {
        if (X.size() < 2)
            throw InvalidInput("RegState: dimension must be at least 2");
        if (X.size() != Xdot.size())
            throw InvalidInput("RegState: position and velocity dimensions differ");
        if (!(X.norm() >= tol::origin))
            throw InvalidInput("RegState: position is at the origin");
    }

    int n() const { return static_cast<int>(X.size()); }
};

/// q(X) = n X X^t.
inline ConePoint q_map(const Vector& X) {
    if (X.size() < 2) throw InvalidInput("q_map: dimension must be at least 2");
    if (!(X.norm() >= tol::origin)) throw InvalidInput("q_map: X = 0 leaves the cone");
    const double n = static_cast<double>(X.size());
    return ConePoint(SymMatrix(n * (X * X.transpose())));
}

/// Tangent map: (X, X') -> (q(X), n (X' X^t + X X'^t)).
inline TangentVector tangent_q(const RegState& s) {
    const double n = s.n();
    return TangentVector(q_map(s.X), SymMatrix(2.0 * n * (s.Xdot * s.X.transpose())));
}

/**
 * @brief Both preimages {X, -X} of a cone point.
 *
 * X is the column of the largest diagonal entry j, scaled by 1/sqrt(n x_jj).
 * Choosing a continuous branch along a path is left to the caller.
 */
inline std::array<Vector, 2> lift(const ConePoint& x) {
    Eigen::Index j = 0;
    const Matrix& m = x.base().matrix();
    m.diagonal().maxCoeff(&j);
    const Vector X = m.col(j) / std::sqrt(x.n() * m(j, j));
    return {X, -X};
}

inline double lagrangian_reg(const RegState& s) {
    const double r2 = s.X.squaredNorm();
    return 2.0 * r2 * s.Xdot.squaredNorm() + 1.0 / r2;
}

/// Pulled-back energy 2 X^2 X'^2 - 1/X^2; conserved along motions.
inline double energy_reg(const RegState& s) {
    const double r2 = s.X.squaredNorm();
    return 2.0 * r2 * s.Xdot.squaredNorm() - 1.0 / r2;
}

/**
 * @brief Residual of tr(d(XX^t) . L^{-1}_{XX^t} d(XX^t)) = 4 X'^2.
 *
 * Returned as |lhs - 4X'^2| / max(1, 4X'^2). Works on the unscaled outer
 * product XX^t, without the factor n of q.
 */
inline double velocity_trace_identity_check(const RegState& s) {
    const ConePoint x(SymMatrix(s.X * s.X.transpose()));
    const TangentVector d(x, SymMatrix(2.0 * (s.Xdot * s.X.transpose())));
    const double lhs = s.n() * trace_inner(d.dir(), restricted_inverse(d).dir());
    const double rhs = 4.0 * s.Xdot.squaredNorm();
    return std::abs(lhs - rhs) / std::max(1.0, rhs);
}

}  // namespace o1kepler
