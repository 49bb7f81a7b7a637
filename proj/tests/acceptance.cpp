// Acceptance run: one [PASS]/[FAIL] line per criterion, tolerances pinned
// below. Exit status is the number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hclab/battery.hpp"
#include "hclab/criterion.hpp"
#include "hclab/hs_lift.hpp"
#include "hclab/oracle.hpp"
#include "hclab/serialize.hpp"
#include "support/oracles.hpp"

using namespace hclab;

namespace {

constexpr double kRelShift = 1e-12;      // ||S^k z|| against 2^-k ||z||
constexpr double kDistAgree = 1e-6;      // oracle vs grid + projected gradient
constexpr double kVecEq = 1e-12;         // vectorization identity
constexpr double kUnitary = 1e-10;       // HS norm under basis change
constexpr double kPreimage = 1e-8;       // preimage form vs inverse form
constexpr double kMachine = 4 * 2.220446049250313e-16;

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

int failures = 0;

void run(const char* id, const char* title, double budget_ms, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.fail(std::string("exception: ") + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (budget_ms > 0 && ms > budget_ms) {
        std::ostringstream os;
        os << "took " << ms << " ms, budget " << budget_ms << " ms";
        o.fail(os.str());
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %s %s (%.0f ms)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, ms, o.pass ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
}

std::string str(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

Outcome ac1() {
    Outcome o;
    const auto cert = default_certificate(3);
    const auto r = check_certificate(rolewicz(2.0), cert, 10, {}, 32);
    if (!r.pass) o.fail("2B certificate did not pass");
    for (std::size_t g = 0; g < cert.y_gens.size(); ++g) {
        const auto supp = support(cert.y_gens[g]);
        const double zn = cert.z_gens[g].norm();
        for (std::size_t k = 1; k <= 10; ++k) {
            if (k >= supp && r.y_residuals[g].values[k - 1] != 0.0) o.fail("T^k y not exactly 0 at k=" + std::to_string(k));
            const double want = std::pow(2.0, -static_cast<double>(k)) * zn;
            if (std::abs(r.s_residuals[g].values[k - 1] - want) > kRelShift * want) o.fail("||S^k z|| off at k=" + std::to_string(k));
            if (r.inverse_residuals[g].values[k - 1] != 0.0) o.fail("T^k S^k z - z not exactly 0");
        }
    }
    if (check_certificate(TruncatedOperator::identity(), cert, 10, {}, 32).pass) o.fail("identity passed");
    if (check_certificate(rolewicz(0.5), cert, 10, {}, 32).pass) o.fail("(1/2)B passed");
    return o;
}

Outcome ac2() {
    Outcome o;
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> dim(1, 4), pow(1, 6);
    std::uniform_real_distribution<double> sv(0.6, 1.6), rad(0.05, 1.0);
    double worst = 0.0;
    int checked = 0, feasible = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = dim(gen);
        const auto n = static_cast<std::size_t>(pow(gen));
        // well-posed random operator: U diag(s) V
        CMatrix s = CMatrix::Zero(d, d);
        for (int i = 0; i < d; ++i) s(i, i) = sv(gen);
        const CMatrix base = oracle::random_unitary(gen, d) * s * oracle::random_unitary(gen, d);
        const auto t = TruncatedOperator::dense(base);
        const Ball u(oracle::random_vector(gen, d, 0.7), rad(gen));
        const Ball v(oracle::random_vector(gen, d, 0.7), rad(gen));

        const auto got = intersects(t, n, u, v, static_cast<std::size_t>(d));
        CMatrix p = CMatrix::Identity(d, d);
        for (std::size_t k = 0; k < n; ++k) p = base * p;
        const auto ref = oracle::grid_and_refine(p, u.center(), u.radius() * (1 - kBoundaryShrink), v.center());
        const bool ref_feasible = ref.dist < v.radius() && u.contains(ref.x);
        worst = std::max(worst, std::abs(got.dist - ref.dist));
        if (std::abs(got.dist - ref.dist) > kDistAgree) o.fail("distance mismatch at trial " + std::to_string(trial));
        if (got.feasible != ref_feasible) o.fail("decision mismatch at trial " + std::to_string(trial));
        if (got.feasible && !u.contains(got.x)) o.fail("witness outside U");
        ++checked;
        feasible += got.feasible;
    }
    std::printf("      %d instances, %d feasible, max |dist diff| = %s\n", checked, feasible, str(worst).c_str());
    return o;
}

Outcome ac3() {
    Outcome o;
    const auto r = first_hit(rolewicz(2.0), Ball(basis(1, 1), 0.1), Ball(basis(2, 2), 0.1), 16);
    if (!r.feasible || r.n != 4) o.fail("first feasible n = " + std::to_string(r.n));
    if (r.dist > 1e-12) o.fail("dist at n=4 is " + str(r.dist));
    CVector want = CVector::Zero(r.x_witness.size());
    want(0) = 1.0;
    want(5) = 1.0 / 16.0;
    if ((r.x_witness - want).norm() > 1e-9) o.fail("witness differs from e1 + e6/16");
    for (std::size_t k = 0; k < 3 && k < r.scanned.size(); ++k) {
        if (r.scanned[k].feasible || r.scanned[k].dist - 0.1 < 0.1)
            o.fail("n=" + std::to_string(k + 1) + " margin " + str(r.scanned[k].dist - 0.1));
    }
    return o;
}

Outcome ac4() {
    Outcome o;
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> mod(0.0, 1.0), arg(0.0, 6.283185307179586);
    const double eps = 0.5, bound = eps / (2 * std::sqrt(3.0));
    for (int trial = 0; trial < 20; ++trial) {
        auto draw = [&] {
            CMatrix m = CMatrix::Zero(64, 64);
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 4; ++i) m(i, j) = std::polar(mod(gen), arg(gen));
            return HSMatrix(m);
        };
        const HSMatrix a = draw(), b = draw();
        const auto r = construct_witness(rolewicz(2.0), a, b, eps, 64);
        const std::string at = " (trial " + std::to_string(trial) + ")";
        if (!r.success) {
            o.fail("construction failed: " + r.failure + at);
            continue;
        }
        if (!(r.residual_a < eps && r.residual_b < eps)) o.fail("residuals too large" + at);
        if (!r.chains_verified) o.fail("inequality chains not verified" + at);
        for (std::size_t i = 0; i < r.N; ++i) {
            if (!(r.y_bounds[i] < bound && r.x_bounds[i] < bound && r.s1_tail[i] < bound))
                o.fail("per-index bound violated at i=" + std::to_string(i + 1) + at);
            if (!(r.s2_columns[i] < bound)) o.fail("S2 column bound violated" + at);
        }
        // Chains re-derived here from the reported matrices.
        const double s1_a = hs_norm(r.s1.mat() - a.mat()), s2 = r.s2.hs_norm();
        if (!(r.residual_a <= s1_a + s2 + 1e-12 && s1_a + s2 < eps)) o.fail("first chain fails on recomputation" + at);
        const CMatrix tn = TruncatedOperator::power(rolewicz(2.0), r.n).materialize(64);
        const double rb = hs_norm(tn * r.s.mat() - b.mat());
        const double b2 = hs_norm(tn * r.s2.mat() - b.mat()), b1 = hs_norm(tn * r.s1.mat());
        if (std::abs(rb - r.residual_b) > 1e-12 || !(rb <= b2 + b1 + 1e-12 && b2 + b1 < eps))
            o.fail("second chain fails on recomputation" + at);
    }
    return o;
}

Outcome ac5() {
    Outcome o;
    std::mt19937_64 gen(55);
    std::uniform_int_distribution<int> dim(1, 16);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = static_cast<std::size_t>(dim(gen));
        const auto e = static_cast<Eigen::Index>(d);
        const auto t = TruncatedOperator::dense(oracle::random_matrix(gen, e, e));
        const double err = vectorize_equivalence(t, HSMatrix(oracle::random_matrix(gen, e, e)), d);
        worst = std::max(worst, err);
        if (err > kVecEq) o.fail("error " + str(err) + " at d=" + std::to_string(d));
    }
    std::printf("      max error %s\n", str(worst).c_str());
    return o;
}

Outcome ac6() {
    Outcome o;
    std::mt19937_64 gen(66);
    std::uniform_int_distribution<int> dim(1, 12);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = dim(gen);
        const HSMatrix a(oracle::random_matrix(gen, d, d));
        for (int n = 1; n <= d; ++n) {
            const double err = hs_norm(a.mat() - finite_rank_approx(a, static_cast<std::size_t>(n)).mat());
            const double dropped = dropped_column_sum(a, static_cast<std::size_t>(n));
            if (std::abs(err * err - dropped) > kMachine * a.hs_norm() * a.hs_norm())
                o.fail("identity off by " + str(err * err - dropped));
        }
    }
    return o;
}

Outcome ac7() {
    Outcome o;
    std::mt19937_64 gen(88);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix a = oracle::random_matrix(gen, 8, 8);
        const CMatrix u = oracle::random_unitary(gen, 8);
        const double diff = std::abs(hs_norm(u.adjoint() * a * u) - hs_norm(a));
        worst = std::max(worst, diff);
        if (diff > kUnitary) o.fail("difference " + str(diff));
    }
    std::printf("      max difference %s\n", str(worst).c_str());
    return o;
}

Outcome ac8() {
    Outcome o;
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> ent(0.3, 3.0), rad(0.05, 1.0);
    std::uniform_int_distribution<int> dim(2, 6);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = static_cast<std::size_t>(dim(gen));
        std::vector<double> e(d);
        for (auto& x : e) x = ent(gen);
        const auto t = TruncatedOperator::diagonal([e](std::size_t i) { return Complex(e[i - 1]); });
        const Ball u(oracle::random_vector(gen, static_cast<Eigen::Index>(d), 0.5), rad(gen));
        const Ball w(CVector::Zero(static_cast<Eigen::Index>(d)), rad(gen));
        const auto pre = prop27_condition(t, u, w, 8, d);
        const auto inv = prop27_inverse_form(t, u, w, 8, d);
        if (pre.feasible != inv.feasible || pre.n != inv.n) o.fail("verdicts differ at trial " + std::to_string(trial));
        for (std::size_t k = 0; k < std::min(pre.scanned.size(), inv.scanned.size()); ++k) {
            const double diff = std::max(std::abs(pre.scanned[k].dist - inv.scanned[k].dist),
                                         std::abs(pre.scanned[k].dist_second - inv.scanned[k].dist_second));
            worst = std::max(worst, diff);
            if (diff > kPreimage) o.fail("distance difference " + str(diff));
        }
    }
    std::printf("      max distance difference %s\n", str(worst).c_str());
    return o;
}

Outcome ac9() {
    Outcome o;
    BatteryConfig cfg;
    cfg.rng_seed = 2026;
    const auto pass = run_battery(rolewicz(2.0), cfg, "rolewicz:2.0");
    for (const auto& c : pass.conditions)
        if (c.verdict != Verdict::Pass) o.fail("2B: " + c.name + " is " + to_string(c.verdict));
    if (!pass.consistent) o.fail("2B inconsistent");
    for (const char* id : {"identity", "rolewicz:0.5", "diag:0.5"}) {
        const auto r = run_battery(make_operator(id), cfg, id);
        for (const auto& c : r.conditions)
            if (c.verdict == Verdict::Pass) o.fail(std::string(id) + ": " + c.name + " passed");
        if (!r.consistent) o.fail(std::string(id) + " inconsistent");
    }
    const auto again = run_battery(rolewicz(2.0), cfg, "rolewicz:2.0");
    if (to_json(pass).dump(2) != to_json(again).dump(2)) o.fail("reports differ for a fixed seed");
    return o;
}

Outcome ac10() {
    Outcome o;
    BatteryConfig cfg;
    const auto r = prop212_battery(rolewicz(2.0), SequenceRule::natural(), cfg);
    if (r.certificate.verdict != Verdict::Pass) o.fail("2B certificate not passing");
    if (r.cond_ii.verdict != r.certificate.verdict) o.fail("(ii) disagrees with the certificate");
    if (r.cond_iii.verdict != r.certificate.verdict) o.fail("(iii) disagrees with the certificate");
    if (!r.agree) o.fail("agreement flag false for 2B");
    const auto id = prop212_battery(TruncatedOperator::identity(), SequenceRule::natural(), cfg);
    for (const auto* c : {&id.certificate, &id.cond_ii, &id.cond_iii})
        if (c->verdict != Verdict::Fail) o.fail("identity: " + c->name + " is " + to_string(c->verdict));
    return o;
}

}

int main() {
    run("AC1", "criterion certificate for 2B, d=32, K=10", 1000, ac1);
    run("AC2", "ball oracle vs grid + projected gradient, 100 instances", 30000, ac2);
    run("AC3", "first hit for 2B from B(e1,0.1) to B(e2,0.1)", 0, ac3);
    run("AC4", "Hilbert-Schmidt witness, 20 pairs, N=3, eps=0.5, d=64", 5000, ac4);
    run("AC5", "vectorization identity, 50 pairs, d<=16", 0, ac5);
    run("AC6", "finite-rank approximation identity, 50 matrices, all N", 0, ac6);
    run("AC7", "HS norm under unitary change of basis, 20 unitaries, d=8", 0, ac7);
    run("AC8", "preimage form vs inverse form on diagonals, 50 instances", 0, ac8);
    run("AC9", "five-condition battery consistency and reproducibility", 0, ac9);
    run("AC10", "sequence conditions agree with the certificate", 0, ac10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}
