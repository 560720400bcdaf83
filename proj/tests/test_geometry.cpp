#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <o1kepler/geometry.hpp>
#include <o1kepler/random.hpp>

using namespace o1kepler;
using std::numbers::pi;

namespace {

Vector e(int n, int i) { return Vector::Unit(n, i); }

const EnergyClass kClasses[] = {EnergyClass::Elliptic, EnergyClass::Parabolic, EnergyClass::Hyperbolic};

TrajectorySpec circular() { return {EnergyClass::Elliptic, e(2, 0), e(2, 1)}; }
TrajectorySpec parabolic() { return {EnergyClass::Parabolic, e(2, 0), e(2, 1) / std::sqrt(2.0)}; }
TrajectorySpec hyperbolic() { return {EnergyClass::Hyperbolic, 0.5 * e(2, 0), e(2, 1)}; }

std::vector<Eigen::Vector2d> sample_conic(double a, double b, double c, int count, double lo, double hi,
                                          int kind) {
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < count; ++i) {
        const double s = lo + (hi - lo) * i / (count - 1);
        if (kind == 0) pts.push_back({a * std::cos(s) + c, b * std::sin(s)});
        if (kind == 1) pts.push_back({s, a * s * s + c});
        if (kind == 2) pts.push_back({a * std::cosh(s) + c, b * std::sinh(s)});
    }
    return pts;
}

}  // namespace

TEST(PlaneOf, CircularChart) {
    const PlaneChart chart = plane_of(circular());
    EXPECT_LT((chart.center - SymMatrix::identity(2)).frobenius(), 1e-15);
    const SymMatrix a = SymMatrix::basis(2, 0, 0) - SymMatrix::basis(2, 1, 1);
    EXPECT_LT((chart.e1 - a).frobenius(), 1e-15);
    EXPECT_LT((chart.e2 - SymMatrix::basis(2, 0, 1)).frobenius(), 1e-15);
}

TEST(PlaneOf, RejectsColliding) {
    EXPECT_THROW(plane_of(TrajectorySpec(EnergyClass::Parabolic, e(2, 0), 2.0 * e(2, 0))), InvalidInput);
}

TEST(PlaneOf, ChartIsOrthonormalAndContainsImage) {
    SplitMix64 rng(71);
    for (EnergyClass cls : kClasses) {
        for (int trial = 0; trial < 100; ++trial) {
            const TrajectorySpec s = random_spec(rng, cls, 2 + trial % 6);
            const PlaneChart c = plane_of(s);
            EXPECT_NEAR(trace_inner(c.e1, c.e1), 1.0, 1e-12);
            EXPECT_NEAR(trace_inner(c.e2, c.e2), 1.0, 1e-12);
            EXPECT_LE(std::abs(trace_inner(c.e1, c.e2)), 1e-12);
            for (double tau : tau_grid(cls, {-3.0, 3.0}, 40)) {
                const double res = plane_residual(c, position_down(s, tau).base());
                EXPECT_LE(res, 1e-9 * (1.0 + c.center.frobenius()));
            }
        }
    }
}

TEST(PlaneOf, FittedPlaneAgrees) {
    SplitMix64 rng(73);
    for (EnergyClass cls : kClasses) {
        for (int trial = 0; trial < 20; ++trial) {
            const TrajectorySpec s = random_spec(rng, cls, 3 + trial % 3);
            std::vector<SymMatrix> pts;
            for (double tau : tau_grid(cls, default_tau_window(cls), 32)) pts.push_back(position_down(s, tau).base());
            const PlaneFit fit = fit_plane(pts);
            EXPECT_LE(fit.max_residual, 1e-9 * (1.0 + fit.chart.center.frobenius()));
            // same plane: each fitted direction lies in the closed-form span
            const PlaneChart c = plane_of(s);
            for (const SymMatrix& d : {fit.chart.e1, fit.chart.e2}) {
                const SymMatrix r = d - c.e1 * trace_inner(c.e1, d) - c.e2 * trace_inner(c.e2, d);
                EXPECT_LE(r.frobenius(), 1e-9 * d.frobenius());
            }
        }
    }
}

TEST(PlaneOf, OrthogonalEquivariance) {
    SplitMix64 rng(79);
    for (EnergyClass cls : kClasses) {
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + trial % 4;
            const TrajectorySpec s = random_spec(rng, cls, n);
            const Matrix g = random_orthogonal(rng, n);
            const PlaneChart moved = plane_of(TrajectorySpec(cls, g * s.u, g * s.v));
            const PlaneChart base = plane_of(s);
            const auto conj = [&](const SymMatrix& m) { return SymMatrix(g * m.matrix() * g.transpose()); };
            EXPECT_LE((moved.center - conj(base.center)).frobenius(), 1e-12 * (1.0 + moved.center.frobenius()));
            for (const SymMatrix& d : {conj(base.e1), conj(base.e2)}) {
                const SymMatrix r = d - moved.e1 * trace_inner(moved.e1, d) - moved.e2 * trace_inner(moved.e2, d);
                EXPECT_LE(r.frobenius(), 1e-12 * d.frobenius());
            }
        }
    }
}

TEST(PlaneCoords, Examples) {
    const PlaneChart chart = plane_of(circular());
    const Eigen::Vector2d c0 = plane_coords(chart, position_down(circular(), 0.0));
    EXPECT_NEAR(c0.x(), 1.0, 1e-15);
    EXPECT_NEAR(c0.y(), 0.0, 1e-15);
    for (double tau : {0.1, 0.7, 2.0, 3.0}) {
        const Eigen::Vector2d p = plane_coords(chart, position_down(circular(), tau));
        EXPECT_NEAR(p.norm(), 1.0, 1e-14);
        EXPECT_NEAR(p.x(), std::cos(2 * tau), 1e-14);
        EXPECT_NEAR(p.y(), std::sin(2 * tau), 1e-14);
    }
    // center + 0.3 e1 -> (0.3, 0): use a chart whose center lies on the cone
    const PlaneChart par = plane_of(parabolic());
    const Eigen::Vector2d origin = plane_coords(par, ConePoint(par.center));
    EXPECT_LT(origin.norm(), 1e-15);
    const PlaneChart shifted{par.center - par.e1 * 0.3, par.e1, par.e2};
    const Eigen::Vector2d p = plane_coords(shifted, ConePoint(par.center));
    EXPECT_NEAR(p.x(), 0.3, 1e-15);
    EXPECT_NEAR(p.y(), 0.0, 1e-15);
}

TEST(PlaneCoords, RejectsOffPlanePoint) {
    const PlaneChart chart = plane_of(circular());
    EXPECT_THROW(plane_coords(chart, ConePoint(SymMatrix::basis(2, 0, 0) * 5.0)), InvalidInput);
}

TEST(ClassifyConic, SyntheticConics) {
    EXPECT_EQ(classify_conic(sample_conic(2.0, 1.0, 0.5, 32, 0.0, 2 * pi, 0)), ConicClass::Ellipse);
    EXPECT_EQ(classify_conic(sample_conic(0.7, 0.0, 1.0, 32, -3.0, 3.0, 1)), ConicClass::Parabola);
    EXPECT_EQ(classify_conic(sample_conic(1.0, 2.0, -1.0, 32, -1.5, 1.5, 2)), ConicClass::HyperbolaBranch);
}

TEST(ClassifyConic, RejectsDegenerateInput) {
    std::vector<Eigen::Vector2d> line;
    for (int i = 0; i < 10; ++i) line.push_back({i * 1.0, 2.0 * i - 1.0});
    EXPECT_THROW(classify_conic(line), InvalidInput);
    std::vector<Eigen::Vector2d> few = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 3}};
    EXPECT_THROW(classify_conic(few), InvalidInput);
}

TEST(ClassifyConic, SampledTrajectoryImages) {
    EXPECT_EQ(classify_conic(sample_plane_points(circular(), 32)), ConicClass::Ellipse);
    EXPECT_EQ(classify_conic(sample_plane_points(parabolic(), 32)), ConicClass::Parabola);
    EXPECT_EQ(classify_conic(sample_plane_points(hyperbolic(), 32)), ConicClass::HyperbolaBranch);
}

TEST(ClassifySpec, Examples) {
    EXPECT_EQ(classify_spec(circular()), ConicClass::Ellipse);
    EXPECT_EQ(classify_spec(TrajectorySpec(EnergyClass::Parabolic, e(2, 0), 2.0 * e(2, 0))), ConicClass::Colliding);
    EXPECT_EQ(classify_spec(hyperbolic()), ConicClass::HyperbolaBranch);
}

TEST(ClassifySpec, AgreesWithFit) {
    SplitMix64 rng(83);
    for (EnergyClass cls : kClasses) {
        for (int trial = 0; trial < 100; ++trial) {
            const TrajectorySpec s = random_spec(rng, cls, 2 + trial % 6);
            EXPECT_EQ(classify_conic(sample_plane_points(s, 32)), classify_spec(s));
        }
    }
}

TEST(GroupElement, QuotientEquality) {
    Matrix g(2, 2);
    g << 2, 1, 0, 1;
    EXPECT_EQ(GroupElement(g), GroupElement(-g));
    EXPECT_FALSE(GroupElement(g) == GroupElement(Matrix::Identity(2, 2)));
    EXPECT_THROW(GroupElement(Matrix::Zero(2, 2)), InvalidInput);
}

TEST(ActPoint, Examples) {
    const Matrix diag = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    const ConePoint x(SymMatrix::basis(2, 0, 0) * 2.0);
    EXPECT_EQ(act_point(GroupElement(diag), x).base(), SymMatrix::basis(2, 0, 0) * 8.0);
    EXPECT_EQ(act_point(GroupElement(Matrix::Identity(2, 2)), x).base(), x.base());
    SplitMix64 rng(89);
    const Matrix q = random_orthogonal(rng, 3);
    const ConePoint y = random_cone_point(rng, 3);
    EXPECT_NEAR(act_point(GroupElement(q), y).trace(), y.trace(), 1e-13 * y.trace());
    EXPECT_EQ(act_point(GroupElement(-q), y).base(), act_point(GroupElement(q), y).base());
}

TEST(ActPoint, EquivariantWithQ) {
    SplitMix64 rng(97);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 6;
        const GroupElement g(random_invertible(rng, n));
        const Vector X = random_vector_with_norm(rng, n, 0.1, 10.0);
        const SymMatrix lhs = act_point(g, q_map(X)).base();
        const SymMatrix rhs = q_map(g.matrix() * X).base();
        EXPECT_LE((lhs - rhs).frobenius(), 1e-12 * rhs.frobenius());
    }
}

TEST(ActSpec, Examples) {
    const Matrix diag = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    const TrajectorySpec moved = act_spec(GroupElement(diag), circular());
    EXPECT_EQ(moved.u, 2.0 * e(2, 0));
    EXPECT_EQ(moved.v, e(2, 1));
    EXPECT_DOUBLE_EQ(energy_of(moved), -0.2);

    Matrix rot(2, 2);
    rot << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
    const TrajectorySpec s(EnergyClass::Elliptic, e(2, 0), (Vector(2) << 0.3, 1.2).finished());
    EXPECT_NEAR(energy_of(act_spec(GroupElement(rot), s)), energy_of(s), 1e-15);

    const TrajectorySpec same = act_spec(GroupElement(Matrix::Identity(2, 2)), s);
    EXPECT_EQ(same.u, s.u);
    EXPECT_EQ(same.v, s.v);
}

TEST(ActSpec, HyperbolicConstraintAndColliding) {
    const Matrix squash = Eigen::Vector2d(4.0, 0.25).asDiagonal();
    EXPECT_THROW(act_spec(GroupElement(squash), hyperbolic()), InvalidInput);
    EXPECT_THROW(act_spec(GroupElement(squash), TrajectorySpec(EnergyClass::Elliptic, e(2, 0), e(2, 0))), InvalidInput);
}

TEST(ActSpec, ImageCommutesWithAction) {
    SplitMix64 rng(101);
    for (EnergyClass cls : {EnergyClass::Elliptic, EnergyClass::Parabolic}) {
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 2 + trial % 4;
            const GroupElement g(random_invertible(rng, n));
            const TrajectorySpec s = random_spec(rng, cls, n);
            const TrajectorySpec gs = act_spec(g, s);
            for (double tau : {-1.0, 0.0, 0.5, 2.0}) {
                const SymMatrix a = position_down(gs, tau).base();
                const SymMatrix b = act_point(g, position_down(s, tau)).base();
                EXPECT_LE((a - b).frobenius(), 1e-12 * b.frobenius());
            }
        }
    }
}

TEST(Transporter, Examples) {
    const TrajectorySpec stretched(EnergyClass::Elliptic, 2.0 * e(2, 0), e(2, 1));
    const GroupElement g = transporter(circular(), stretched);
    const Matrix diag = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    EXPECT_TRUE(g.approx_equal(GroupElement(diag), 1e-14));
    EXPECT_LE(transport_residual(g, circular(), stretched), 1e-14);

    const TrajectorySpec s3(EnergyClass::Elliptic, e(3, 0) + e(3, 2), e(3, 1));
    const GroupElement id = transporter(s3, s3);
    EXPECT_LT((id.matrix() * s3.u - s3.u).norm(), 1e-14);
    EXPECT_LT((id.matrix() * s3.v - s3.v).norm(), 1e-14);

    EXPECT_THROW(transporter(circular(), parabolic()), InvalidInput);
    EXPECT_THROW(transporter(hyperbolic(), hyperbolic()), InvalidInput);
    EXPECT_THROW(transporter(circular(), TrajectorySpec(EnergyClass::Elliptic, e(2, 0), e(2, 0))), InvalidInput);
}

TEST(Transporter, RandomPairs) {
    SplitMix64 rng(103);
    for (EnergyClass cls : {EnergyClass::Elliptic, EnergyClass::Parabolic}) {
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + trial % 4;
            const TrajectorySpec from = random_spec(rng, cls, n);
            const TrajectorySpec to = random_spec(rng, cls, n);
            const GroupElement g = transporter(from, to);
            const TrajectorySpec moved = act_spec(g, from);
            EXPECT_LE((moved.u - to.u).norm(), 1e-10);
            EXPECT_LE((moved.v - to.v).norm(), 1e-10);
            EXPECT_LE(transport_residual(g, from, to), 1e-8);
        }
    }
}

TEST(Boundedness, EllipticBoundedOthersGrow) {
    SplitMix64 rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 4;
        const TrajectorySpec ell = random_spec(rng, EnergyClass::Elliptic, n);
        const double bound = n * (ell.u.squaredNorm() + ell.v.squaredNorm());
        for (int k = 0; k <= 200; ++k)
            EXPECT_LE(position_down(ell, 2 * pi * k / 200).base().frobenius(), bound);
        // |q(X)|_F = n X^2: parabolic images grow like n tau^2 v^2, hyperbolic ones like e^{2|tau|}
        const TrajectorySpec par = random_spec(rng, EnergyClass::Parabolic, n);
        for (double tau : {-20.0, 20.0, -100.0, 100.0}) {
            const double lower = n * std::pow(std::max(0.0, std::abs(tau) * par.v.norm() - par.u.norm()), 2);
            EXPECT_GE(position_down(par, tau).base().frobenius(), lower * (1.0 - 1e-12));
        }
        EXPECT_GT(position_down(par, 100.0).base().frobenius(), 1e3);
        const TrajectorySpec hyp = random_spec(rng, EnergyClass::Hyperbolic, n);
        EXPECT_GT(position_down(hyp, 20.0).base().frobenius(), 1e3);
        EXPECT_GT(position_down(hyp, -20.0).base().frobenius(), 1e3);
    }
}
