#include <doctest.h>

#include <random>

#include "hclab/linalg.hpp"
#include "support/oracles.hpp"

using namespace hclab;

TEST_SUITE("linalg") {

TEST_CASE("inner product is linear in the first slot") {
    CHECK(inner(basis(1, 3), basis(1, 3)) == Complex(1, 0));
    CHECK(inner(basis(1, 3), basis(2, 3)) == Complex(0, 0));
    CHECK(inner(Complex(1, 1) * basis(1, 2), basis(1, 2)) == Complex(1, 1));
    CHECK(inner(basis(1, 2), Complex(1, 1) * basis(1, 2)) == Complex(1, -1));
    CHECK_THROWS_AS(inner(basis(1, 2), basis(1, 3)), DimensionError);
}

TEST_CASE("basis, support and fit") {
    CHECK(basis(3, 4)(2) == Complex(1, 0));
    CHECK_THROWS(basis(0, 4));
    CHECK_THROWS(basis(5, 4));
    CVector v = CVector::Zero(5);
    CHECK(support(v) == 0);
    v(2) = 1.0;
    CHECK(support(v) == 3);
    CHECK(fit(v, 8).size() == 8);
    CHECK(fit(v, 3).size() == 3);
    CHECK_THROWS_AS(fit(v, 2), DimensionError);
}

TEST_CASE("Parseval at the truncation") {
    std::mt19937_64 gen(1);
    const CVector v = oracle::random_vector(gen, 7);
    double s = 0.0;
    for (std::size_t i = 1; i <= 7; ++i) s += std::norm(inner(v, basis(i, 7)));
    CHECK(s == doctest::Approx(v.squaredNorm()).epsilon(1e-15));
}

TEST_CASE("operator norm") {
    CHECK(op_norm(CMatrix::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-12));
    CMatrix d = CMatrix::Zero(3, 3);
    d.diagonal() << 3.0, 1.0, 0.5;
    CHECK(op_norm(d) == doctest::Approx(3.0).epsilon(1e-12));
    CMatrix b = CMatrix::Zero(6, 6);
    for (int i = 0; i < 5; ++i) b(i, i + 1) = 2.0;
    CHECK(op_norm(b) == doctest::Approx(2.0).epsilon(1e-12));

    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix m = oracle::random_matrix(gen, 5, 4);
        const double nm = op_norm(m);
        CHECK(nm == doctest::Approx(std::sqrt(oracle::lipschitz(m))).epsilon(1e-8));
        for (int k = 0; k < 5; ++k) {
            const CVector v = oracle::random_vector(gen, 4);
            CHECK((m * v).norm() <= nm * v.norm() + 1e-9 * v.norm());
        }
    }
}

TEST_CASE("ball membership is strict") {
    const Ball b(basis(1, 2), 0.5);
    CHECK(b.contains(basis(1, 2)));
    CHECK_FALSE(b.contains(basis(1, 2) + 0.5 * basis(2, 2)));
    CHECK(b.contains(basis(1, 4)));  // padded
    CHECK_THROWS_AS(Ball(basis(1, 2), 0.0), InvalidArgument);
    CHECK_THROWS_AS(Ball(basis(1, 2), -1.0), InvalidArgument);
    CHECK(Ball(CVector::Zero(3), 1.0).centered_at_zero());
}

TEST_CASE("constrained least squares: closed forms") {
    std::mt19937_64 gen(3);
    SUBCASE("identity map") {
        for (int trial = 0; trial < 20; ++trial) {
            const CVector a = oracle::random_vector(gen, 3), b = oracle::random_vector(gen, 3);
            const double r = 0.3 + 0.1 * trial;
            const auto sol = constrained_lsq(CMatrix::Identity(3, 3), a, r, b);
            CHECK(sol.dist == doctest::Approx(std::max(0.0, (a - b).norm() - r)).epsilon(1e-10).scale(1.0));
            CHECK((sol.x - a).norm() <= r * (1 + 1e-12));
        }
    }
    SUBCASE("zero map") {
        const CVector a = oracle::random_vector(gen, 3), b = oracle::random_vector(gen, 4);
        const auto sol = constrained_lsq(CMatrix::Zero(4, 3), a, 0.5, b);
        CHECK(sol.x == a);
        CHECK(sol.dist == doctest::Approx(b.norm()));
    }
    SUBCASE("zero radius returns the center") {
        const CMatrix m = oracle::random_matrix(gen, 3, 3);
        const CVector a = oracle::random_vector(gen, 3), b = oracle::random_vector(gen, 3);
        const auto sol = constrained_lsq(m, a, 0.0, b);
        CHECK(sol.x == a);
        CHECK(sol.dist == doctest::Approx((m * a - b).norm()));
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(constrained_lsq(CMatrix::Identity(2, 2), CVector::Zero(3), 1.0, CVector::Zero(2)),
                        DimensionError);
        CHECK_THROWS_AS(constrained_lsq(CMatrix::Identity(2, 2), CVector::Zero(2), -1.0, CVector::Zero(2)),
                        InvalidArgument);
    }
}

TEST_CASE("constrained least squares matches projected gradient") {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rows = 2 + trial % 3, cols = 2 + (trial / 3) % 3;
        CMatrix m = oracle::random_matrix(gen, rows, cols);
        if (trial % 5 == 0) m.col(0).setZero();  // rank deficient
        const CVector a = oracle::random_vector(gen, cols), b = oracle::random_vector(gen, rows, 2.0);
        const double r = 0.5;
        const auto sol = constrained_lsq(m, a, r, b);
        const CVector pg = oracle::projected_gradient(m, a, r, b, a, 100000);
        CHECK(sol.dist == doctest::Approx((m * pg - b).norm()).epsilon(1e-6).scale(1.0));
        CHECK(sol.dist <= (m * pg - b).norm() + 1e-9);
        CHECK((sol.x - a).norm() <= r * (1 + 1e-12));
    }
}

TEST_CASE("dist is monotone in r and reaches the unconstrained optimum") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 30; ++trial) {
        const CMatrix m = oracle::random_matrix(gen, 4, 3);
        const CVector a = oracle::random_vector(gen, 3), b = oracle::random_vector(gen, 4);
        const double r = 0.05 + 0.1 * (trial % 7);
        CHECK(constrained_lsq(m, a, 2 * r, b).dist <= constrained_lsq(m, a, r, b).dist + 1e-12);

        const CVector pinv = m.completeOrthogonalDecomposition().solve(b);
        const double big = (pinv - a).norm() + 10.0;
        const auto sol = constrained_lsq(m, a, big, b);
        CHECK(sol.dist == doctest::Approx((m * pinv - b).norm()).epsilon(1e-7).scale(1.0));
        CHECK_FALSE(sol.on_boundary);
    }
}

TEST_CASE("block-diagonal solve equals the dense solve") {
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 10; ++trial) {
        const BlockDiagonal bd{oracle::random_matrix(gen, 3, 3), 4};
        const CMatrix dense = bd.dense();
        const CVector x = oracle::random_vector(gen, 12);
        CHECK((bd.apply(x) - dense * x).norm() < 1e-12);
        const CVector a = oracle::random_vector(gen, 12), b = oracle::random_vector(gen, 12, 3.0);
        const auto s1 = constrained_lsq(bd, a, 0.7, b);
        const auto s2 = constrained_lsq(dense, a, 0.7, b);
        CHECK(s1.dist == doctest::Approx(s2.dist).epsilon(1e-9).scale(1.0));
        CHECK((s1.x - s2.x).norm() < 1e-7);
    }
}

TEST_CASE("ellipsoid projection agrees with the trust-region route") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 30; ++trial) {
        CMatrix dm = CMatrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i) dm(i, i) = 0.2 + 3.0 * (trial % 4 + i) / 7.0;
        const CVector c = oracle::random_vector(gen, 4);
        const double r = 0.4;
        // min ||u - c|| s.t. ||D u|| <= r  equals  min ||D^{-1} w - c|| s.t. ||w|| <= r
        const auto e = nearest_in_ellipsoid(dm, c, r);
        const auto t = constrained_lsq(dm.inverse(), CVector::Zero(4), r, c);
        CHECK(e.dist == doctest::Approx(t.dist).epsilon(1e-9).scale(1.0));
        CHECK((dm * e.x).norm() <= r * (1 + 1e-9));
    }
}

}
