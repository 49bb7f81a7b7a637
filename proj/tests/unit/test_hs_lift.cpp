#include <doctest.h>

#include <cmath>
#include <random>

#include "hclab/hs_lift.hpp"
#include "support/oracles.hpp"

using namespace hclab;

namespace {

CMatrix outer(std::size_t row, std::size_t col, std::size_t d) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m(static_cast<Eigen::Index>(row - 1), static_cast<Eigen::Index>(col - 1)) = 1.0;
    return m;
}

// Entries bounded by 1 in modulus on the first n columns.
CMatrix random_finite_rank(std::mt19937_64& gen, std::size_t d, std::size_t n, std::size_t rows) {
    std::uniform_real_distribution<double> mod(0.0, 1.0), arg(0.0, 6.283185307179586);
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < rows; ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::polar(mod(gen), arg(gen));
    return m;
}

}

TEST_SUITE("hs_lift") {

TEST_CASE("Hilbert-Schmidt norm") {
    CHECK(hs_norm(CMatrix::Identity(4, 4)) == doctest::Approx(2.0).epsilon(1e-15));
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = oracle::random_matrix(gen, 8, 8);
        const CMatrix u = oracle::random_unitary(gen, 8);
        CHECK((u.adjoint() * u - CMatrix::Identity(8, 8)).norm() < 1e-12);
        CHECK(std::abs(hs_norm(u.adjoint() * a * u) - hs_norm(a)) <= 1e-10);
        CHECK(hs_norm(a) == doctest::Approx(oracle::hs_norm_loops(a)).epsilon(1e-14));
        CHECK(hs_norm(a) >= op_norm(a) * (1 - 1e-14));
        const HSMatrix h(a);
        CHECK(h.hs_norm() == hs_norm(a));
    }
}

TEST_CASE("supports") {
    CMatrix m = CMatrix::Zero(5, 5);
    CHECK(HSMatrix(m).column_support() == 1);
    m(3, 1) = 1.0;
    CHECK(HSMatrix(m).column_support() == 2);
    CHECK(HSMatrix(m).row_support() == 4);
}

TEST_CASE("left multiplication") {
    std::mt19937_64 gen(32);
    const HSMatrix s(oracle::random_matrix(gen, 6, 6));
    CHECK(left_multiply(TruncatedOperator::identity(), s, 6).mat() == s.mat());
    CHECK(left_multiply(TruncatedOperator::zero(), s, 6).mat().norm() == 0.0);
    const auto l = left_multiply(rolewicz(2.0), HSMatrix(outer(2, 1, 4)), 4);
    CHECK((l.mat() - 2.0 * outer(1, 1, 4)).norm() == 0.0);
    for (const auto& t : {rolewicz(2.0), maclane(), salas(1.0)}) {
        CHECK(left_multiply(t, s, 6).hs_norm() <= op_norm(t.materialize(6)) * s.hs_norm() * (1 + 1e-12));
    }
}

TEST_CASE("finite-rank approximation") {
    CHECK(finite_rank_approx(HSMatrix(CMatrix::Identity(3, 3)), 3).mat() == CMatrix::Identity(3, 3));
    const HSMatrix id(CMatrix::Identity(3, 3));
    CHECK(hs_norm(id.mat() - finite_rank_approx(id, 1).mat()) == doctest::Approx(std::sqrt(2.0)));
    CMatrix dg = CMatrix::Zero(3, 3);
    dg.diagonal() << 1.0, 0.5, 0.25;
    CHECK(hs_norm(dg - finite_rank_approx(HSMatrix(dg), 2).mat()) == doctest::Approx(0.25));
    CHECK_THROWS_AS(finite_rank_approx(id, 0), InvalidArgument);
    CHECK_THROWS_AS(finite_rank_approx(id, 4), InvalidArgument);

    std::mt19937_64 gen(33);
    for (int trial = 0; trial < 10; ++trial) {
        const HSMatrix a(oracle::random_matrix(gen, 7, 7));
        for (std::size_t n = 1; n <= 7; ++n) {
            const double err = hs_norm(a.mat() - finite_rank_approx(a, n).mat());
            CHECK(std::abs(err * err - dropped_column_sum(a, n)) <= 1e-13 * a.hs_norm() * a.hs_norm());
        }
    }
}

TEST_CASE("vectorization") {
    std::mt19937_64 gen(34);
    const CMatrix s = oracle::random_matrix(gen, 4, 3);
    const CVector v = vectorize(s);
    CHECK(v.size() == 12);
    CHECK(v(4) == s(0, 1));
    CHECK(unvectorize(v, 4, 3) == s);
    CHECK(v.norm() == doctest::Approx(hs_norm(s)));
    CHECK(vectorize_equivalence(TruncatedOperator::identity(), HSMatrix(s), 4) == 0.0);
    CHECK(vectorize_equivalence(maclane(), HSMatrix(CMatrix::Zero(8, 8)), 8) == 0.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = TruncatedOperator::dense(oracle::random_matrix(gen, 8, 8));
        CHECK(vectorize_equivalence(t, HSMatrix(oracle::random_matrix(gen, 8, 8)), 8) <= 1e-12);
    }
    CHECK(left_multiplication_operator(rolewicz(2.0), 5).blocks() == 5);
}

TEST_CASE("witness: single column by hand") {
    const HSMatrix a(outer(1, 1, 16)), b(outer(1, 1, 16));
    const auto r = construct_witness(rolewicz(2.0), a, b, 0.5, 16);
    REQUIRE(r.success);
    CHECK(r.mode == "constructive");
    CHECK(r.N == 1);
    CHECK(r.radius == doctest::Approx(0.25));
    CHECK((r.y - basis(1, 16)).norm() == 0.0);
    // x = 2^{-n} e_{n+1}
    CHECK((r.x - std::pow(2.0, -static_cast<double>(r.n)) * basis(r.n + 1, 16)).norm() < 1e-15);
    CHECK(r.residual_a < 0.25);
    CHECK(r.residual_a == doctest::Approx(r.x.norm()));
    CHECK(r.residual_b == 0.0);
    CHECK(r.chains_verified);
    CHECK(r.delta > 0.0);
    CHECK(r.norm_x < r.delta);
}

TEST_CASE("witness: random finite-rank pairs") {
    std::mt19937_64 gen(35);
    for (int trial = 0; trial < 5; ++trial) {
        const HSMatrix a(random_finite_rank(gen, 64, 3, 4)), b(random_finite_rank(gen, 64, 3, 4));
        const auto r = construct_witness(rolewicz(2.0), a, b, 0.5, 64);
        REQUIRE(r.success);
        CHECK(r.residual_a < 0.5);
        CHECK(r.residual_b < 0.5);
        CHECK(r.chains_verified);
        CHECK(r.n_exponents.front() == 0);
        CHECK(r.m_exponents.front() == 0);
        for (std::size_t i = 0; i < r.N; ++i) {
            CHECK(r.y_bounds[i] < r.radius);
            CHECK(r.x_bounds[i] < r.radius);
            CHECK(r.s1_tail[i] < r.radius);
            CHECK(r.s2_columns[i] < r.delta * std::pow(r.op_norm_t, static_cast<double>(r.m_exponents[i])));
        }
        // the reported pieces reassemble
        CHECK((r.s.mat() - r.s1.mat() - r.s2.mat()).norm() == 0.0);
        CHECK(r.residual_a == doctest::Approx(hs_norm(r.s.mat() - a.mat())).epsilon(1e-12));
        CHECK(r.residual_a <= r.chain_a_s1 + r.chain_a_s2 + 1e-12);
        CHECK(r.residual_b <= r.chain_b_s1 + r.chain_b_s2 + 1e-12);
    }
}

TEST_CASE("witness: large epsilon is immediate, contraction fails") {
    std::mt19937_64 gen(36);
    const HSMatrix a(random_finite_rank(gen, 16, 2, 2)), b(random_finite_rank(gen, 16, 2, 2));
    const auto easy = construct_witness(rolewicz(2.0), a, b, 2 * (a.hs_norm() + b.hs_norm()) + 1, 16);
    CHECK(easy.success);
    CHECK(easy.gap == 1);
    const auto hard = construct_witness(rolewicz(0.5), a, b, 0.5, 16);
    CHECK_FALSE(hard.success);
    CHECK_FALSE(hard.failure.empty());
    WitnessOptions constructive;
    constructive.mode = WitnessOptions::Mode::Constructive;
    CHECK_THROWS_AS(construct_witness(salas(1.0), a, b, 0.5, 16, constructive), InvalidArgument);
}

TEST_CASE("witness: oracle mode on a small instance") {
    WitnessOptions opts;
    opts.mode = WitnessOptions::Mode::Oracle;
    opts.n_max = 4;
    const HSMatrix a(outer(1, 1, 6)), b(outer(1, 1, 6));
    const auto r = construct_witness(rolewicz(2.0), a, b, 0.9, 6, opts);
    CHECK(r.mode == "oracle");
    if (r.success) {
        CHECK(r.residual_a < 0.9);
        CHECK(r.residual_b < 0.9);
        CHECK(r.chains_verified);
    }
    CHECK_THROWS_AS(construct_witness(rolewicz(2.0), HSMatrix(CMatrix::Identity(8, 8)), HSMatrix(CMatrix::Identity(8, 8)),
                                      0.5, 8, opts),
                    InvalidArgument);
}

}
