#include <gtest/gtest.h>

#include <o1kepler/jordan.hpp>
#include <o1kepler/random.hpp>
#include <o1kepler/regularization.hpp>

#include "oracles.hpp"

using namespace o1kepler;

namespace {

SymMatrix E(int n, int i, int j) { return SymMatrix::basis(n, i, j); }

double rel_diff(const SymMatrix& a, const SymMatrix& b) {
    return (a - b).frobenius() / std::max(1.0, b.frobenius());
}

}  // namespace

TEST(SymMatrix, ConstructionSymmetrises) {
    Matrix m(2, 2);
    m << 1.0, 2.0, 4.0, 3.0;
    const SymMatrix s(m);
    EXPECT_EQ(s(0, 1), 3.0);
    EXPECT_EQ(s(1, 0), 3.0);
    EXPECT_THROW(SymMatrix(Matrix::Zero(2, 3)), InvalidInput);
    EXPECT_THROW(SymMatrix(Matrix::Zero(1, 1)), InvalidInput);
}

TEST(JordanProduct, Examples) {
    const SymMatrix w(Matrix::Random(3, 3));
    EXPECT_EQ(jordan_product(SymMatrix::identity(3), w), w);
    EXPECT_EQ(jordan_product(E(2, 0, 0), E(2, 0, 1)), E(2, 0, 1) * 0.5);
    EXPECT_EQ(jordan_product(E(2, 0, 0), E(2, 0, 0)), E(2, 0, 0));
    EXPECT_THROW(jordan_product(E(2, 0, 0), E(3, 0, 0)), InvalidInput);
}

TEST(JordanProduct, CommutativeAndSymmetric) {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMatrix a(random_vector(rng, 16).reshaped(4, 4));
        const SymMatrix b(random_vector(rng, 16).reshaped(4, 4));
        const SymMatrix ab = jordan_product(a, b);
        EXPECT_EQ(ab, jordan_product(b, a));
        EXPECT_EQ(ab.matrix(), ab.matrix().transpose());
    }
}

TEST(TraceInner, Examples) {
    EXPECT_DOUBLE_EQ(trace_inner(SymMatrix::identity(2), SymMatrix::identity(2)), 1.0);
    EXPECT_DOUBLE_EQ(trace_inner(E(2, 0, 0), E(2, 1, 1)), 0.0);
    EXPECT_DOUBLE_EQ(trace_inner(E(3, 0, 1), E(3, 0, 1)), 2.0 / 3.0);
    EXPECT_THROW(trace_inner(E(2, 0, 0), E(3, 0, 0)), InvalidInput);
}

TEST(TraceInner, AssociativeTraceForm) {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 5;
        const SymMatrix a(random_vector(rng, n * n).reshaped(n, n));
        const SymMatrix b(random_vector(rng, n * n).reshaped(n, n));
        const SymMatrix c(random_vector(rng, n * n).reshaped(n, n));
        const double lhs = trace_inner(jordan_product(a, b), c);
        const double rhs = trace_inner(b, jordan_product(a, c));
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(ConeCheck, Examples) {
    EXPECT_TRUE(cone_check(E(2, 0, 0) * 2.0, tol::cone));
    EXPECT_FALSE(cone_check(SymMatrix::identity(2), tol::cone));
    EXPECT_FALSE(cone_check(E(2, 0, 0) * -1.0, tol::cone));
    EXPECT_FALSE(cone_check(SymMatrix::zero(3), tol::cone));
}

TEST(ConePoint, RejectsOffConeAndCollisionBoundary) {
    EXPECT_THROW(ConePoint(SymMatrix::identity(2)), InvalidInput);
    EXPECT_THROW(ConePoint(E(2, 0, 0) * 1e-13), InvalidInput);
    EXPECT_NO_THROW(ConePoint(E(2, 0, 0) * 2.0));
}

TEST(RangeProject, ExamplesAgreeWithEigenOracle) {
    const ConePoint x(E(2, 0, 0) * 2.0);
    // Oracle: spectral projection of the 3x3 matrix of L_x on H_2.
    EXPECT_LT((oracle::project(x.base().matrix(), E(2, 0, 1).matrix()) - E(2, 0, 1).matrix()).norm(), 1e-14);
    EXPECT_LT(oracle::project(x.base().matrix(), E(2, 1, 1).matrix()).norm(), 1e-14);

    EXPECT_LT(rel_diff(range_project(x, E(2, 0, 1)), E(2, 0, 1)), 1e-15);
    EXPECT_LT(range_project(x, E(2, 1, 1)).frobenius(), 1e-15);
    EXPECT_LT(rel_diff(range_project(x, x.base()), x.base()), 1e-15);
}

TEST(RangeProject, MatchesOracleAndIsIdempotent) {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 6;
        const ConePoint x = random_cone_point(rng, n);
        const SymMatrix w(random_vector(rng, n * n).reshaped(n, n));
        const SymMatrix p = range_project(x, w);
        const Matrix expected = oracle::project(x.base().matrix(), w.matrix());
        EXPECT_LT((p.matrix() - expected).norm(), 1e-12 * std::max(1.0, w.frobenius()));
        EXPECT_LT(rel_diff(range_project(x, p), p), 1e-13);
    }
}

TEST(TangentVector, RejectsNormalDirections) {
    const ConePoint x(E(2, 0, 0) * 2.0);
    EXPECT_THROW(TangentVector(x, E(2, 1, 1)), InvalidInput);
    EXPECT_NO_THROW(TangentVector(x, E(2, 0, 1)));
    EXPECT_NO_THROW(TangentVector(x, SymMatrix::zero(2)));
}

TEST(RestrictedInverse, ProofMatrixForm) {
    // x = a^2 E11, v = a(2 y1 E11 + sum_j y_j (E1j + Ej1)) -> (1/a)(2 y1 E11 + sum_j 2 y_j (E1j + Ej1))
    const int n = 4;
    const double a = 1.7;
    const Vector y = (Vector(n) << 0.3, -1.1, 0.4, 2.0).finished();
    Matrix v = Matrix::Zero(n, n), expected = Matrix::Zero(n, n);
    v(0, 0) = a * 2.0 * y(0);
    expected(0, 0) = 2.0 * y(0) / a;
    for (int j = 1; j < n; ++j) {
        v(0, j) = v(j, 0) = a * y(j);
        expected(0, j) = expected(j, 0) = 2.0 * y(j) / a;
    }
    const ConePoint x(E(n, 0, 0) * (a * a));
    const TangentVector w = restricted_inverse(TangentVector(x, SymMatrix(v)));
    EXPECT_LT((w.dir().matrix() - expected).norm(), 1e-13);
}

TEST(RestrictedInverse, EigenvalueExamples) {
    const ConePoint x(E(2, 0, 0) * 2.0);
    EXPECT_LT(rel_diff(restricted_inverse(TangentVector(x, E(2, 0, 0))).dir(), E(2, 0, 0) * 0.5), 1e-15);
    EXPECT_LT(rel_diff(restricted_inverse(TangentVector(x, E(2, 0, 1))).dir(), E(2, 0, 1)), 1e-15);
}

TEST(RestrictedInverse, InvertsJordanMultiplicationOnRange) {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + trial % 7;
        const ConePoint x = random_cone_point(rng, n);
        const SymMatrix w(random_vector(rng, n * n).reshaped(n, n));
        const SymMatrix p = range_project(x, w);
        const TangentVector inv = restricted_inverse(TangentVector(x, p));
        const SymMatrix back = jordan_product(x.base(), inv.dir());
        EXPECT_LE((back - p).frobenius(), 1e-10 * std::max(1e-300, p.frobenius()));
        if (trial < 60) {
            const Matrix expected = oracle::inverse_on_range(x.base().matrix(), p.matrix());
            EXPECT_LT((inv.dir().matrix() - expected).norm(), 1e-9 * std::max(1.0, expected.norm()));
        }
    }
}

TEST(Metric, Examples) {
    const ConePoint x(E(2, 0, 0) * 2.0);
    EXPECT_DOUBLE_EQ(metric_norm_sq(TangentVector(x, SymMatrix::zero(2))), 0.0);
    EXPECT_NEAR(metric_norm_sq(TangentVector(x, E(2, 0, 1) * 2.0)), 4.0, 1e-14);
    // 4 E11 = tangent_q((e1, e1)).dir, so the value is 4 X^2 X'^2 = 4:
    // L^{-1}(4 E11) = 2 E11 and <4 E11, 2 E11> = tr(8 E11) / 2 = 4.
    EXPECT_NEAR(metric_norm_sq(TangentVector(x, E(2, 0, 0) * 4.0)), 4.0, 1e-14);
}

TEST(Metric, HomogeneousOfDegreeTwo) {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 5;
        const ConePoint x = random_cone_point(rng, n);
        const SymMatrix w = range_project(x, SymMatrix(random_vector(rng, n * n).reshaped(n, n)));
        const double alpha = uniform(rng, -3.0, 3.0);
        const double base = metric_norm_sq(TangentVector(x, w));
        EXPECT_GT(base, 0.0);
        EXPECT_NEAR(metric_norm_sq(TangentVector(x, w * alpha)), alpha * alpha * base,
                    1e-12 * alpha * alpha * base);
    }
}

TEST(LagrangianEnergy, Examples) {
    const ConePoint x(E(2, 0, 0) * 2.0);
    const TangentVector rest(x, SymMatrix::zero(2));
    EXPECT_DOUBLE_EQ(lagrangian(rest), 1.0);
    EXPECT_DOUBLE_EQ(energy(rest), -1.0);
    EXPECT_NEAR(energy(TangentVector(x, E(2, 0, 1) * 2.0)), 1.0, 1e-14);
    for (int n = 2; n <= 8; ++n) {
        const ConePoint xn(E(n, 0, 0) * (2.0 * n));
        EXPECT_DOUBLE_EQ(energy(TangentVector(xn, SymMatrix::zero(n))), -0.5);
    }
}
