#include <doctest.h>

#include <cmath>

#include "hclab/criterion.hpp"

using namespace hclab;

namespace {

bool all_pass(const std::vector<ResidualSeries>& ss) {
    for (const auto& s : ss)
        if (!s.pass) return false;
    return true;
}

}

TEST_SUITE("criterion") {

TEST_CASE("sequence rules") {
    CHECK(SequenceRule::natural().first(4) == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(SequenceRule::linear(3, 2).first(3) == std::vector<std::size_t>{3, 5, 7});
    CHECK(SequenceRule::geometric(2).first(4) == std::vector<std::size_t>{2, 4, 8, 16});
    CHECK(SequenceRule::geometric(2).terms_upto(20) == std::vector<std::size_t>{2, 4, 8, 16});
    CHECK(SequenceRule::parse("list:1,4,9").at(3) == 9);
    CHECK_THROWS_AS(SequenceRule::parse("list:1,4,9").at(4), InvalidArgument);
    CHECK_THROWS_AS(SequenceRule::explicit_list({3, 3}), InvalidArgument);
    CHECK_THROWS_AS(SequenceRule::parse("fib"), InvalidArgument);
    for (const auto* text : {"k", "linear:2,3", "pow:3", "list:2,5,11"}) {
        const auto s = SequenceRule::parse(text);
        CHECK(SequenceRule::parse(s.to_string()).first(3) == s.first(3));
    }
}

TEST_CASE("orbit") {
    const auto o = orbit(rolewicz(2.0), basis(3, 3), 3, 6);
    REQUIRE(o.size() == 4);
    CHECK((o[0] - basis(3, 6)).norm() == 0.0);
    CHECK((o[1] - 2.0 * basis(2, 6)).norm() == 0.0);
    CHECK((o[2] - 4.0 * basis(1, 6)).norm() == 0.0);
    CHECK(o[3].norm() == 0.0);
    for (const auto& v : orbit(TruncatedOperator::identity(), basis(2, 4), 5, 4)) CHECK((v - basis(2, 4)).norm() == 0.0);
    const auto half = TruncatedOperator::diagonal([](std::size_t) { return Complex(0.5); });
    CHECK((orbit(half, basis(1, 1), 4, 1)[4] - basis(1, 1) / 16.0).norm() == 0.0);
    CHECK_THROWS_AS(orbit(rolewicz(2.0), basis(3, 3), 3, 5), GuardBandError);
}

TEST_CASE("verdict rule") {
    ConvergenceRule rule;
    ResidualSeries s;
    s.values = {1.0, 0.0, 0.0, 0.0};
    judge(s, rule);
    CHECK(s.pass);
    CHECK(s.mode == "below_tol");
    s.values = {1.0, 0.5, 0.25, 0.125};
    judge(s, rule);
    CHECK(s.mode == "geometric_decay");
    s.values = {1.0, 0.95, 0.93, 0.92};
    judge(s, rule);
    CHECK_FALSE(s.pass);
    s.values = {0.0, 1e-16, 0.0, 5e-16};  // rounding noise below tol
    judge(s, rule);
    CHECK(s.pass);
    s.values = {1.0, 1.0, 1.0};
    judge(s, rule);
    CHECK_FALSE(s.pass);
    s.values = {1.0, 2.0, 4.0};
    judge(s, rule);
    CHECK_FALSE(s.pass);
    s.values = {1.0, NAN, 0.0};
    judge(s, rule);
    CHECK_FALSE(s.pass);
}

TEST_CASE("certificate for 2B") {
    const auto cert = default_certificate(3);
    const auto r = check_certificate(rolewicz(2.0), cert, 10, {}, 32);
    CHECK(r.pass);
    CHECK(r.d_used == 32);
    REQUIRE(r.y_residuals.size() == 3);
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t k = 1; k <= 10; ++k) {
            const double yk = r.y_residuals[g].values[k - 1];
            if (k > g) CHECK(yk == 0.0);  // e_{g+1} dies after g+1 steps
            else CHECK(yk == std::pow(2.0, static_cast<double>(k)));
            CHECK(r.s_residuals[g].values[k - 1] == doctest::Approx(std::pow(2.0, -static_cast<double>(k))).epsilon(1e-12));
            CHECK(r.inverse_residuals[g].values[k - 1] == 0.0);
        }
    }
}

TEST_CASE("certificate negative controls and tolerance monotonicity") {
    CHECK_FALSE(check_certificate(rolewicz(0.5), default_certificate(), 10).pass);
    const auto id = check_certificate(TruncatedOperator::identity(), default_certificate(), 10);
    CHECK_FALSE(id.pass);
    CHECK_FALSE(all_pass(id.y_residuals));
    CHECK_THROWS_AS(check_certificate(salas(1.0), default_certificate(), 10), InvalidArgument);
    CHECK_THROWS_AS(check_certificate(rolewicz(2.0), default_certificate(), 10, {}, 5), GuardBandError);

    for (const auto& t : {rolewicz(2.0), rolewicz(1.2), rolewicz(0.9), maclane()}) {
        bool passed = false;
        for (double tol : {1e-14, 1e-10, 1e-8, 1e-4, 1.0}) {
            ConvergenceRule rule;
            rule.tol = tol;
            const bool p = check_certificate(t, default_certificate(), 10, rule).pass;
            CHECK((!passed || p));
            passed = passed || p;
        }
    }
}

TEST_CASE("certificate along a sparse sequence and with custom family") {
    auto cert = default_certificate(2);
    cert.seq = SequenceRule::geometric(2);
    CHECK(check_certificate(rolewicz(2.0), cert, 5).pass);

    auto custom = default_certificate(2);
    const auto s = *rolewicz(2.0).right_inverse();
    custom.s_rule = "powers_of_half_shift";
    custom.custom_family = [s](std::size_t n) { return TruncatedOperator::power(s, n); };
    CHECK(check_certificate(rolewicz(2.0), custom, 8).pass);
    custom.custom_family = nullptr;
    CHECK_THROWS_AS(check_certificate(rolewicz(2.0), custom, 8), InvalidArgument);
}

TEST_CASE("certificate validation") {
    Certificate c = default_certificate();
    c.y_gens.clear();
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = default_certificate();
    c.support_bound = 2;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("commuting sequences") {
    const auto p = check_commuting(OperatorSequence::powers_of(rolewicz(2.0)), 5, 12, 1e-12);
    CHECK(p.commute);
    CHECK(p.max_defect == 0.0);
    CHECK(p.pairs == 10);

    OperatorSequence mixed{[](std::size_t n) {
                               return n == 1 ? weighted_backward_shift([](std::size_t) { return Complex(1); })
                                             : TruncatedOperator::diagonal([](std::size_t i) { return Complex(static_cast<double>(i)); });
                           },
                           "B, diag(1,2,3)"};
    CHECK_FALSE(check_commuting(mixed, 2, 3, 1e-12).commute);

    OperatorSequence diags{[](std::size_t n) {
                               return TruncatedOperator::diagonal([n](std::size_t i) { return Complex(1.0 / static_cast<double>(i + n)); });
                           },
                           "diagonals"};
    CHECK(check_commuting(diags, 6, 8, 1e-14).commute);
}

TEST_CASE("dense range at truncation") {
    CHECK(has_dense_range(rolewicz(2.0), 10));
    CHECK(has_dense_range(salas(1.0), 10));
    CHECK(has_dense_range(make_operator("harmonic"), 10));
    CHECK_FALSE(has_dense_range(TruncatedOperator::zero(), 10));
    CHECK_FALSE(has_dense_range(rank_one(basis(1, 3), basis(1, 3)), 6));
}

}
