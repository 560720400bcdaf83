/**
 * @file geometry.hpp
 * @brief Planes carrying trajectories, conic classification of their images,
 *        and the linear group action X -> gX with its induced x -> g x g^t.
 */
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "trajectories.hpp"

namespace o1kepler {

/// Affine 2-plane center + span{e1, e2}, orthonormal under trace_inner.
struct PlaneChart {
    SymMatrix center;
    SymMatrix e1;
    SymMatrix e2;
};

namespace detail {

/// Gram-Schmidt under trace_inner.
inline PlaneChart make_chart(const SymMatrix& center, const SymMatrix& a, const SymMatrix& b) {
    const double na = std::sqrt(trace_inner(a, a));
    if (!(na > 0.0)) throw InvalidInput("plane_of: degenerate plane");
    const SymMatrix e1 = a * (1.0 / na);
    SymMatrix rest = b - e1 * trace_inner(e1, b);
    rest = rest - e1 * trace_inner(e1, rest);  // second pass for orthogonality to rounding
    const double nb = std::sqrt(trace_inner(rest, rest));
    if (!(nb > 1e-12 * std::sqrt(trace_inner(b, b)))) throw InvalidInput("plane_of: degenerate plane");
    return {center, e1, rest * (1.0 / nb)};
}

}  // namespace detail

/**
 * @brief The affine plane containing the image of a non-colliding motion.
 *
 * Expanding q over the trigonometric, polynomial or hyperbolic basis gives
 * q(X(tau)) = center + f(tau) A + g(tau) B exactly:
 *   elliptic   center n/2 (uu^t + vv^t), A = n/2 (uu^t - vv^t), B = n/2 (uv^t + vu^t)
 *   parabolic  center n uu^t,            A = n (uv^t + vu^t),    B = n vv^t
 *   hyperbolic center n/2 (uu^t - vv^t), A = n/2 (uu^t + vv^t), B = n/2 (uv^t + vu^t)
 */
inline PlaneChart plane_of(const TrajectorySpec& s) {
    if (colliding(s)) throw InvalidInput("plane_of: colliding spec has no plane");
    const double n = s.n();
    const SymMatrix uu(s.u * s.u.transpose());
    const SymMatrix vv(s.v * s.v.transpose());
    const SymMatrix uv(s.u * s.v.transpose());  // symmetrised: (uv^t + vu^t)/2
    switch (s.energy_class) {
        case EnergyClass::Elliptic:
            return detail::make_chart((uu + vv) * (0.5 * n), (uu - vv) * (0.5 * n), uv * n);
        case EnergyClass::Parabolic:
            return detail::make_chart(uu * n, uv * (2.0 * n), vv * n);
        case EnergyClass::Hyperbolic:
            return detail::make_chart((uu - vv) * (0.5 * n), (uu + vv) * (0.5 * n), uv * n);
    }
    throw InvalidInput("plane_of: unknown class");
}

/// Frobenius distance from x to the chart's affine plane.
inline double plane_residual(const PlaneChart& chart, const SymMatrix& x) {
    const SymMatrix d = x - chart.center;
    const SymMatrix r = d - chart.e1 * trace_inner(chart.e1, d) - chart.e2 * trace_inner(chart.e2, d);
    return r.frobenius();
}

namespace tol {
inline constexpr double on_plane = 1e-8;  ///< relative off-plane distance accepted by plane_coords
}

/// trace_inner coordinates of x - center against (e1, e2).
inline Eigen::Vector2d plane_coords(const PlaneChart& chart, const ConePoint& x) {
    const SymMatrix d = x.base() - chart.center;
    const double res = plane_residual(chart, x.base());
    const double scale = std::max({1.0, d.frobenius(), chart.center.frobenius()});
    if (res > tol::on_plane * scale)
        throw InvalidInput("plane_coords: point is off the plane (residual " + std::to_string(res) + ")");
    return {trace_inner(chart.e1, d), trace_inner(chart.e2, d)};
}

/// Least-squares affine plane through a point cloud, with its worst residual.
struct PlaneFit {
    PlaneChart chart;
    double max_residual;
};

/**
 * @brief Fit an affine 2-plane to points by SVD of the centred cloud.
 *
 * Independent of plane_of: uses only the sampled points.
 */
inline PlaneFit fit_plane(std::span<const SymMatrix> points) {
    if (points.size() < 3) throw InvalidInput("fit_plane: need at least 3 points");
    const int n = points.front().n();
    Matrix mean = Matrix::Zero(n, n);
    for (const auto& p : points) mean += p.matrix();
    mean /= static_cast<double>(points.size());

    Matrix cloud(points.size(), n * n);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Matrix d = points[i].matrix() - mean;
        cloud.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(d.data(), n * n);
    }
    const Eigen::JacobiSVD<Matrix> svd(cloud, Eigen::ComputeThinV);
    const auto V = svd.matrixV();
    const SymMatrix a(Eigen::Map<const Matrix>(V.col(0).data(), n, n));
    const SymMatrix b(Eigen::Map<const Matrix>(V.col(1).data(), n, n));
    PlaneFit fit{detail::make_chart(SymMatrix(mean), a, b), 0.0};
    for (const auto& p : points) fit.max_residual = std::max(fit.max_residual, plane_residual(fit.chart, p));
    return fit;
}

enum class ConicClass { Ellipse, Parabola, HyperbolaBranch, Colliding };

inline std::string_view to_string(ConicClass c) {
    switch (c) {
        case ConicClass::Ellipse: return "ellipse";
        case ConicClass::Parabola: return "parabola";
        case ConicClass::HyperbolaBranch: return "hyperbola-branch";
        case ConicClass::Colliding: return "colliding";
    }
    return "unknown";
}

namespace tol {
inline constexpr double discriminant = 1e-6;  ///< |B^2 - 4AC| band treated as parabolic
inline constexpr double conic_rank = 1e-8;    ///< relative singular-value floor for a unique fit
}

/// Fitted conic A x^2 + B xy + C y^2 + D x + E y + F = 0 in normalised coordinates.
struct ConicFit {
    std::array<double, 6> coeffs;
    double discriminant;
    ConicClass kind;
};

/**
 * @brief Fit a conic to planar points and classify it by B^2 - 4AC.
 *
 * Points are translated to their centroid and scaled to unit RMS radius, and
 * the coefficient vector is the unit-norm minimiser of the algebraic residual
 * (last right singular vector of the design matrix).
 */
inline ConicFit fit_conic(std::span<const Eigen::Vector2d> points) {
    if (points.size() < 6) throw InvalidInput("classify_conic: need at least 6 points");
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : points) centroid += p;
    centroid /= static_cast<double>(points.size());
    double ms = 0.0;
    for (const auto& p : points) ms += (p - centroid).squaredNorm();
    const double rms = std::sqrt(ms / points.size());
    if (!(rms > 0.0) || !std::isfinite(rms)) throw InvalidInput("classify_conic: degenerate point set");

    Eigen::MatrixXd design(points.size(), 6);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Eigen::Vector2d q = (points[i] - centroid) / rms;
        design.row(static_cast<Eigen::Index>(i)) << q.x() * q.x(), q.x() * q.y(), q.y() * q.y(), q.x(), q.y(), 1.0;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(4) > tol::conic_rank * sv(0)))
        throw InvalidInput("classify_conic: rank-deficient fit (points collinear or too few distinct)");

    ConicFit fit{};
    const Eigen::VectorXd c = svd.matrixV().col(5);
    for (int i = 0; i < 6; ++i) fit.coeffs[i] = c(i);
    fit.discriminant = c(1) * c(1) - 4.0 * c(0) * c(2);
    if (fit.discriminant < -tol::discriminant)
        fit.kind = ConicClass::Ellipse;
    else if (fit.discriminant > tol::discriminant)
        fit.kind = ConicClass::HyperbolaBranch;
    else
        fit.kind = ConicClass::Parabola;
    return fit;
}

inline ConicClass classify_conic(std::span<const Eigen::Vector2d> points) { return fit_conic(points).kind; }

/// Classification straight from the class tag; Colliding for dependent (u, v).
inline ConicClass classify_spec(const TrajectorySpec& s) {
    if (colliding(s)) return ConicClass::Colliding;
    switch (s.energy_class) {
        case EnergyClass::Elliptic: return ConicClass::Ellipse;
        case EnergyClass::Parabolic: return ConicClass::Parabola;
        case EnergyClass::Hyperbolic: return ConicClass::HyperbolaBranch;
    }
    return ConicClass::Colliding;
}

/**
 * @brief Classification from sampled image points alone.
 *
 * Points come from position_down over the default window (collision samples
 * skipped). A centred cloud of numerical rank one is a segment through the
 * origin (Colliding); otherwise the points are charted on their SVD plane and
 * passed to fit_conic. Shares no code with plane_of.
 */
inline ConicClass classify_by_fit(const TrajectorySpec& s, int count = 64);

/// tau window used when sampling an image: one full ellipse, a stretch of parabola or branch.
inline TimeSpan default_tau_window(EnergyClass c) {
    switch (c) {
        case EnergyClass::Elliptic: return {0.0, std::numbers::pi};
        case EnergyClass::Parabolic: return {-2.0, 2.0};
        case EnergyClass::Hyperbolic: return {-1.5, 1.5};
    }
    return {0.0, 1.0};
}

/// Uniform tau grid over [w.begin, w.end) for closed windows, inclusive otherwise.
inline std::vector<double> tau_grid(EnergyClass c, TimeSpan w, int count) {
    std::vector<double> taus(count);
    const bool periodic = c == EnergyClass::Elliptic;
    const double denom = periodic ? count : count - 1;
    for (int i = 0; i < count; ++i) taus[i] = w.begin + (w.end - w.begin) * i / denom;
    return taus;
}

/// Plane coordinates of `count` sampled image points over the default window.
inline std::vector<Eigen::Vector2d> sample_plane_points(const TrajectorySpec& s, int count) {
    const PlaneChart chart = plane_of(s);
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(count);
    for (double tau : tau_grid(s.energy_class, default_tau_window(s.energy_class), count))
        pts.push_back(plane_coords(chart, position_down(s, tau)));
    return pts;
}

/// Invertible g modulo +-I.
class GroupElement {
public:
    explicit GroupElement(Matrix g) : g_(std::move(g)) {
        if (g_.rows() != g_.cols() || g_.rows() < 2)
            throw InvalidInput("GroupElement: need a square matrix of order >= 2");
        if (!(std::abs(g_.determinant()) >= 1e-12)) throw InvalidInput("GroupElement: singular matrix");
    }

    int n() const { return static_cast<int>(g_.rows()); }
    const Matrix& matrix() const { return g_; }

    /// Equal as classes: g == h or g == -h.
    bool operator==(const GroupElement& o) const { return g_ == o.g_ || g_ == -o.g_; }

    /// Class equality up to a relative Frobenius tolerance.
    bool approx_equal(const GroupElement& o, double rel) const {
        const double scale = std::max(g_.norm(), o.g_.norm());
        return std::min((g_ - o.g_).norm(), (g_ + o.g_).norm()) <= rel * scale;
    }

private:
    Matrix g_;
};

/// x -> g x g^t.
inline ConePoint act_point(const GroupElement& g, const ConePoint& x) {
    if (g.n() != x.n()) throw InvalidInput("act_point: dimension mismatch");
    return ConePoint(SymMatrix(g.matrix() * x.base().matrix() * g.matrix().transpose()));
}

/// (u, v) -> (gu, gv) with the class kept.
inline TrajectorySpec act_spec(const GroupElement& g, const TrajectorySpec& s) {
    if (g.n() != s.n()) throw InvalidInput("act_spec: dimension mismatch");
    if (colliding(s)) throw InvalidInput("act_spec: colliding spec");
    const Vector gu = g.matrix() * s.u;
    const Vector gv = g.matrix() * s.v;
    if (s.energy_class == EnergyClass::Hyperbolic && !(gv.squaredNorm() > gu.squaredNorm()))
        throw InvalidInput("act_spec: image of a hyperbolic spec violates v^2 > u^2");
    return TrajectorySpec(s.energy_class, gu, gv);
}

namespace detail {

/// Columns u, v followed by an orthonormal basis of span{u, v}^perp, chosen
/// greedily from the coordinate vectors by Gram-Schmidt.
inline Matrix complete_basis(const Vector& u, const Vector& v) {
    const auto n = u.size();
    Matrix q(n, n);
    q.col(0) = u.normalized();
    Vector w = v - q.col(0).dot(v) * q.col(0);
    q.col(1) = w.normalized();
    for (Eigen::Index k = 2; k < n; ++k) {
        Vector best;
        double best_norm = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector r = Vector::Unit(n, i);
            for (int pass = 0; pass < 2; ++pass)
                r -= q.leftCols(k) * (q.leftCols(k).transpose() * r);
            if (r.norm() > best_norm) {
                best_norm = r.norm();
                best = r;
            }
        }
        q.col(k) = best / best_norm;
    }
    Matrix basis = q;
    basis.col(0) = u;
    basis.col(1) = v;
    return basis;
}

}  // namespace detail

/**
 * @brief g with g u_from = u_to and g v_from = v_to.
 *
 * Both pairs are completed to bases with orthonormal complements matched
 * index-wise, so g is one representative of the coset of solutions; only its
 * action on the trajectory is meaningful.
 */
inline GroupElement transporter(const TrajectorySpec& from, const TrajectorySpec& to) {
    if (from.energy_class != to.energy_class)
        throw InvalidInput("transporter: energy classes differ");
    if (from.energy_class == EnergyClass::Hyperbolic)
        throw InvalidInput("transporter: only elliptic and parabolic trajectories are transported");
    if (from.n() != to.n()) throw InvalidInput("transporter: dimension mismatch");
    if (colliding(from) || colliding(to)) throw InvalidInput("transporter: colliding spec");

    const Matrix src = detail::complete_basis(from.u, from.v);
    const Matrix dst = detail::complete_basis(to.u, to.v);
    // g src = dst  <=>  src^t g^t = dst^t
    const Matrix gt = src.transpose().colPivHouseholderQr().solve(dst.transpose());
    return GroupElement(gt.transpose());
}

/**
 * @brief Worst relative Frobenius mismatch between g . image(from) and image(to)
 *        at matching tau, over `samples` points of the default window.
 *
 * Matching at equal tau checks the traversal order as well as the point sets.
 */
inline double transport_residual(const GroupElement& g, const TrajectorySpec& from,
                                 const TrajectorySpec& to, int samples = 50) {
    double worst = 0.0;
    for (double tau : tau_grid(from.energy_class, default_tau_window(from.energy_class), samples)) {
        const ConePoint mapped = act_point(g, position_down(from, tau));
        const ConePoint target = position_down(to, tau);
        const double diff = (mapped.base() - target.base()).frobenius();
        worst = std::max(worst, diff / std::max(1.0, target.base().frobenius()));
    }
    return worst;
}

inline ConicClass classify_by_fit(const TrajectorySpec& s, int count) {
    std::vector<SymMatrix> pts;
    for (double tau : tau_grid(s.energy_class, default_tau_window(s.energy_class), count)) {
        try {
            pts.push_back(position_down(s, tau).base());
        } catch (const CollisionError&) {
        }
    }
    if (pts.size() < 6) throw InvalidInput("classify_by_fit: too few samples");
    const int n = s.n();
    Matrix mean = Matrix::Zero(n, n);
    for (const auto& p : pts) mean += p.matrix();
    mean /= static_cast<double>(pts.size());
    Matrix cloud(pts.size(), n * n);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Matrix d = pts[i].matrix() - mean;
        cloud.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(d.data(), n * n);
    }
    const Eigen::JacobiSVD<Matrix> svd(cloud);
    const auto sv = svd.singularValues();
    if (sv.size() < 2 || sv(1) <= tol::conic_rank * sv(0)) return ConicClass::Colliding;

    const PlaneFit fit = fit_plane(pts);
    std::vector<Eigen::Vector2d> coords;
    coords.reserve(pts.size());
    for (const auto& p : pts) {
        const SymMatrix d = p - fit.chart.center;
        coords.emplace_back(trace_inner(fit.chart.e1, d), trace_inner(fit.chart.e2, d));
    }
    return classify_conic(coords);
}

}  // namespace o1kepler
