/**
 * @file jordan.hpp
 * @brief The Jordan algebra of real symmetric matrices, its rank-one cone and
 *        the kinetic metric that defines the O(1)-Kepler Lagrangian.
 *
 * Everything here is a pure function of immutable values.
 */
#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace o1kepler {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tol {
inline constexpr double cone = 1e-9;     ///< relative Frobenius residual of x^2 = (tr x) x
inline constexpr double range = 1e-9;    ///< relative change under projection onto Range L_x
inline constexpr double solve = 1e-10;   ///< residual of L_x w = v after the restricted inverse
inline constexpr double trace = 1e-12;   ///< tr x at or below this is the collision boundary
}  // namespace tol

/**
 * @brief Element of H_n(R), stored dense.
 *
 * Symmetry is enforced at construction by averaging with the transpose, so
 * the stored representative is exactly symmetric.
 */
class SymMatrix {
public:
    explicit SymMatrix(const Matrix& m) {
        if (m.rows() != m.cols())
            throw InvalidInput("SymMatrix: matrix is not square");
        if (m.rows() < 2)
            throw InvalidInput("SymMatrix: order must be at least 2");
        m_ = 0.5 * (m + m.transpose());
    }

    static SymMatrix zero(int n) { return SymMatrix(Matrix::Zero(n, n)); }
    static SymMatrix identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }

    /// E_ii when i == j, otherwise E_ij + E_ji (0-based indices).
    static SymMatrix basis(int n, int i, int j) {
        Matrix m = Matrix::Zero(n, n);
        m(i, j) = 1.0;
        m(j, i) = 1.0;
        return SymMatrix(m);
    }

    /// Symmetrised outer product (x y^t + y x^t) / 2.
    static SymMatrix outer(const Vector& x, const Vector& y) {
        return SymMatrix(x * y.transpose());
    }

    int n() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    double trace() const { return m_.trace(); }
    double frobenius() const { return m_.norm(); }

    SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_, Raw{}); }
    SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_, Raw{}); }
    SymMatrix operator-() const { return SymMatrix(-m_, Raw{}); }
    SymMatrix operator*(double s) const { return SymMatrix(s * m_, Raw{}); }
    friend SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

    bool operator==(const SymMatrix& o) const { return m_ == o.m_; }

private:
    struct Raw {};
    // Sums and scalings of symmetric matrices stay exactly symmetric.
    SymMatrix(Matrix m, Raw) : m_(std::move(m)) {}

    Matrix m_;
};

inline void require_same_order(const SymMatrix& u, const SymMatrix& v, const char* op) {
    if (u.n() != v.n())
        throw InvalidInput(std::string(op) + ": dimension mismatch (" + std::to_string(u.n()) +
                           " vs " + std::to_string(v.n()) + ")");
}

/// Jordan product u o v = (uv + vu)/2.
inline SymMatrix jordan_product(const SymMatrix& u, const SymMatrix& v) {
    require_same_order(u, v, "jordan_product");
    const Matrix uv = u.matrix() * v.matrix();
    return SymMatrix(uv);  // averaging with the transpose yields (uv + vu)/2
}

/// Trace form <u, v> = tr(uv)/n.
inline double trace_inner(const SymMatrix& u, const SymMatrix& v) {
    require_same_order(u, v, "trace_inner");
    return u.matrix().cwiseProduct(v.matrix()).sum() / u.n();
}

/// Membership test for the rank-one cone: x^2 = (tr x) x and tr x > 0.
inline bool cone_check(const SymMatrix& x, double tolerance) {
    const double tr = x.trace();
    if (!(tr > 0.0)) return false;
    const Matrix residual = x.matrix() * x.matrix() - tr * x.matrix();
    return residual.norm() <= tolerance * tr * tr;
}

/**
 * @brief A configuration: a point of the rank-one cone, x = a p p^t with a = tr x.
 *
 * The unit direction p is extracted once from the column of the largest
 * diagonal entry; its sign is arbitrary.
 */
class ConePoint {
public:
    explicit ConePoint(SymMatrix x) : x_(std::move(x)) {
        const double tr = x_.trace();
        if (!(tr > tol::trace))
            throw InvalidInput("ConePoint: trace " + std::to_string(tr) +
                               " is not positive (collision boundary)");
        if (!cone_check(x_, tol::cone))
            throw InvalidInput("ConePoint: matrix is not a rank-one semi-positive element");
        Eigen::Index j = 0;
        x_.matrix().diagonal().maxCoeff(&j);
        direction_ = x_.matrix().col(j) / std::sqrt(tr * x_(j, j));
        direction_.normalize();
    }

    const SymMatrix& base() const { return x_; }
    int n() const { return x_.n(); }
    double trace() const { return x_.trace(); }
    /// Unit vector p with base = tr(base) p p^t.
    const Vector& direction() const { return direction_; }

private:
    SymMatrix x_;
    Vector direction_;
};

namespace detail {

/// Householder reflection H with H p = +-e_1, so H x H = (tr x) E_11.
class RankOneFrame {
public:
    explicit RankOneFrame(const Vector& p) : h_(p) {
        h_(0) += (p(0) >= 0.0 ? 1.0 : -1.0);
        h_ /= h_.norm();
    }

    /// H w H for symmetric w; H is its own inverse.
    Matrix conjugate(const Matrix& w) const {
        const Vector wh = w * h_;
        const double hwh = h_.dot(wh);
        // (I - 2hh^t) w (I - 2hh^t) = w - 2 h (wh)^t - 2 (wh) h^t + 4 (h^t w h) h h^t
        return w - 2.0 * (h_ * wh.transpose() + wh * h_.transpose()) +
               4.0 * hwh * (h_ * h_.transpose());
    }

private:
    Vector h_;
};

inline void clear_complement_block(Matrix& w) {
    const auto m = w.rows() - 1;
    w.bottomRightCorner(m, m).setZero();
}

}  // namespace detail

/// Orthogonal projection (trace form) of w onto Range L_x.
inline SymMatrix range_project(const ConePoint& x, const SymMatrix& w) {
    require_same_order(x.base(), w, "range_project");
    const detail::RankOneFrame frame(x.direction());
    Matrix rotated = frame.conjugate(w.matrix());
    detail::clear_complement_block(rotated);
    return SymMatrix(frame.conjugate(rotated));
}

/// A velocity at a cone point; the direction must lie in Range L_x.
class TangentVector {
public:
    TangentVector(ConePoint at, SymMatrix dir) : at_(std::move(at)), dir_(std::move(dir)) {
        require_same_order(at_.base(), dir_, "TangentVector");
        const double scale = dir_.frobenius();
        const double moved = (range_project(at_, dir_) - dir_).frobenius();
        if (moved > tol::range * scale)
            throw InvalidInput("TangentVector: direction is not tangent to the cone (residual " +
                               std::to_string(moved / scale) + ")");
    }

    const ConePoint& at() const { return at_; }
    const SymMatrix& dir() const { return dir_; }

private:
    ConePoint at_;
    SymMatrix dir_;
};

/**
 * @brief Inverse of L_x restricted to Range L_x.
 *
 * In the frame where x = a E_11, L_x acts by a on E_11 and by a/2 on
 * E_1j + E_j1, so the inverse is a diagonal rescaling there.
 */
inline TangentVector restricted_inverse(const TangentVector& v) {
    const ConePoint& x = v.at();
    const double a = x.trace();
    const detail::RankOneFrame frame(x.direction());
    Matrix rotated = frame.conjugate(v.dir().matrix());
    detail::clear_complement_block(rotated);
    rotated(0, 0) /= a;
    const auto m = rotated.rows() - 1;
    rotated.topRightCorner(1, m) *= 2.0 / a;
    rotated.bottomLeftCorner(m, 1) *= 2.0 / a;
    return TangentVector(x, SymMatrix(frame.conjugate(rotated)));
}

/// Squared kinetic norm |x'|^2 = (tr x / n) <x', L_x^{-1} x'>.
inline double metric_norm_sq(const TangentVector& v) {
    const ConePoint& x = v.at();
    return x.trace() / x.n() * trace_inner(v.dir(), restricted_inverse(v).dir());
}

/// Potential term n / tr x.
inline double potential_term(const ConePoint& x) { return x.n() / x.trace(); }

inline double lagrangian(const TangentVector& v) {
    return 0.5 * metric_norm_sq(v) + potential_term(v.at());
}

inline double energy(const TangentVector& v) {
    return 0.5 * metric_norm_sq(v) - potential_term(v.at());
}

}  // namespace o1kepler
