#include "hclab/hs_lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hclab/oracle.hpp"

namespace hclab {

double hs_norm(const CMatrix& a) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) sum += a.col(j).squaredNorm();
    return std::sqrt(sum);
}

std::size_t HSMatrix::column_support() const {
    for (Eigen::Index j = mat_.cols(); j > 0; --j) {
        if (!mat_.col(j - 1).isZero(0.0)) return static_cast<std::size_t>(j);
    }
    return 1;
}

std::size_t HSMatrix::row_support() const {
    std::size_t r = 0;
    for (Eigen::Index j = 0; j < mat_.cols(); ++j) r = std::max(r, support(mat_.col(j)));
    return r;
}

HSMatrix left_multiply(const TruncatedOperator& t, const HSMatrix& s, std::size_t d) {
    if (static_cast<std::size_t>(s.rows()) != t.dim(d)) {
        throw DimensionError("left_multiply: S has " + std::to_string(s.rows()) + " rows, T acts on " +
                             std::to_string(t.dim(d)));
    }
    return HSMatrix(t.materialize(d) * s.mat());
}

HSMatrix finite_rank_approx(const HSMatrix& a, std::size_t n) {
    if (n < 1 || n > static_cast<std::size_t>(a.cols())) {
        throw InvalidArgument("finite_rank_approx: N=" + std::to_string(n) + " outside 1.." +
                              std::to_string(a.cols()));
    }
    CMatrix f = a.mat();
    const auto keep = static_cast<Eigen::Index>(n);
    f.rightCols(f.cols() - keep).setZero();
    return HSMatrix(std::move(f));
}

double dropped_column_sum(const HSMatrix& a, std::size_t n) {
    double sum = 0.0;
    for (auto j = static_cast<Eigen::Index>(n); j < a.cols(); ++j) sum += a.mat().col(j).squaredNorm();
    return sum;
}

CVector vectorize(const CMatrix& s) {
    return Eigen::Map<const CVector>(s.data(), s.size());
}

CMatrix unvectorize(const CVector& v, std::size_t rows, std::size_t cols) {
    if (static_cast<std::size_t>(v.size()) != rows * cols) throw DimensionError("unvectorize: size mismatch");
    return Eigen::Map<const CMatrix>(v.data(), static_cast<Eigen::Index>(rows),
                                     static_cast<Eigen::Index>(cols));
}

TruncatedOperator left_multiplication_operator(const TruncatedOperator& t, std::size_t cols) {
    return TruncatedOperator::direct_sum(t, cols);
}

double vectorize_equivalence(const TruncatedOperator& t, const HSMatrix& s, std::size_t d) {
    const HSMatrix lts = left_multiply(t, s, d);
    const CMatrix block = left_multiplication_operator(t, static_cast<std::size_t>(s.cols())).materialize(d);
    return (vectorize(lts.mat()) - block * vectorize(s.mat())).norm();
}

namespace {

CMatrix embed(const CMatrix& m, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    if (m.rows() > n || m.cols() > n) {
        // Only trailing zero rows/columns may be dropped.
        if (!m.bottomRows(std::max<Eigen::Index>(0, m.rows() - n)).isZero(0.0) ||
            !m.rightCols(std::max<Eigen::Index>(0, m.cols() - n)).isZero(0.0)) {
            throw DimensionError("target matrix does not fit at truncation d=" + std::to_string(d));
        }
    }
    CMatrix out = CMatrix::Zero(n, n);
    const auto r = std::min(n, m.rows()), c = std::min(n, m.cols());
    out.topLeftCorner(r, c) = m.topLeftCorner(r, c);
    return out;
}

CVector apply_times(const CMatrix& m, CVector v, std::size_t times) {
    for (std::size_t j = 0; j < times; ++j) v = m * v;
    return v;
}

double column_chain(const std::vector<double>& terms) {
    double s = 0.0;
    for (double t : terms) s += t * t;
    return std::sqrt(s);
}

bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Fills every per-index quantity and both norm chains for given x, y, n and
// exponents, then decides success. Shared by both construction modes.
void assemble(WitnessReport& rep, const CMatrix& td, const CMatrix& a, const CMatrix& b,
              const WitnessOptions& opts) {
    const auto N = rep.N;
    const auto d = static_cast<Eigen::Index>(td.rows());
    const double r = rep.radius;
    const CVector tn_y = apply_times(td, rep.y, rep.n);
    rep.norm_x = rep.x.norm();
    rep.norm_tn_y = tn_y.norm();

    CMatrix s1 = CMatrix::Zero(d, d), s2 = CMatrix::Zero(d, d);
    rep.y_bounds.assign(N, 0.0);
    rep.x_bounds.assign(N, 0.0);
    rep.s2_columns.assign(N, 0.0);
    rep.s1_tail.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        s1.col(col) = apply_times(td, rep.y, rep.n_exponents[i]);
        s2.col(col) = apply_times(td, rep.x, rep.m_exponents[i]);
        rep.y_bounds[i] = (s1.col(col) - a.col(col)).norm();
        rep.x_bounds[i] = (apply_times(td, s2.col(col), rep.n) - b.col(col)).norm();
        rep.s2_columns[i] = s2.col(col).norm();
        rep.s1_tail[i] = apply_times(td, tn_y, rep.n_exponents[i]).norm();
    }
    rep.s1 = HSMatrix(s1);
    rep.s2 = HSMatrix(s2);
    rep.s = HSMatrix(s1 + s2);

    CMatrix tn = CMatrix::Identity(d, d);
    for (std::size_t k = 0; k < rep.n; ++k) tn = td * tn;
    rep.residual_a = hs_norm(rep.s.mat() - a);
    rep.chain_a_s1 = hs_norm(s1 - a);
    rep.chain_a_s2 = hs_norm(s2);
    rep.residual_b = hs_norm(tn * rep.s.mat() - b);
    rep.chain_b_s2 = hs_norm(tn * s2 - b);
    rep.chain_b_s1 = hs_norm(tn * s1);

    auto fail = [&](std::string why, long index) {
        rep.success = false;
        rep.failure = std::move(why);
        rep.violated_index = index;
    };
    for (std::size_t i = 0; i < N; ++i) {
        const long idx = static_cast<long>(i + 1);
        if (!(rep.y_bounds[i] < r)) return fail("||T^{n_{i-1}} y - A e_i|| >= eps/(2 sqrt N)", idx);
        if (!(rep.x_bounds[i] < r)) return fail("||T^n T^{m_{i-1}} x - B e_i|| >= eps/(2 sqrt N)", idx);
    }
    if (!(rep.norm_x < rep.delta)) return fail("x outside W: ||x|| >= delta", -1);
    if (!(rep.norm_tn_y < rep.delta)) return fail("T^n y outside W: ||T^n y|| >= delta", -1);
    for (std::size_t i = 0; i < N; ++i) {
        const long idx = static_cast<long>(i + 1);
        const double cap = rep.delta * std::pow(rep.op_norm_t, static_cast<double>(rep.m_exponents[i]));
        if (!(rep.s2_columns[i] < cap) || !(rep.s2_columns[i] < r)) {
            return fail("||T^{m_{i-1}} x|| not below delta ||T||^{m_{i-1}} <= eps/(2 sqrt N)", idx);
        }
        if (!(rep.s1_tail[i] < r)) return fail("||T^{n_{i-1}} T^n y|| >= eps/(2 sqrt N)", idx);
    }

    // Each bracketed sum of the two chains, recomputed from its columns.
    const double rel = 1e-10;
    const bool brackets = close(rep.chain_a_s1, column_chain(rep.y_bounds), rel) &&
                          close(rep.chain_a_s2, column_chain(rep.s2_columns), rel) &&
                          close(rep.chain_b_s2, column_chain(rep.x_bounds), rel) &&
                          close(rep.chain_b_s1, column_chain(rep.s1_tail), rel);
    const double slack = 1.0 + opts.chain_slack;
    const bool chain_a = rep.residual_a <= (rep.chain_a_s1 + rep.chain_a_s2) * slack &&
                         rep.chain_a_s1 + rep.chain_a_s2 < rep.epsilon;
    const bool chain_b = rep.residual_b <= (rep.chain_b_s2 + rep.chain_b_s1) * slack &&
                         rep.chain_b_s2 + rep.chain_b_s1 < rep.epsilon;
    rep.chains_verified = brackets && chain_a && chain_b;
    if (!brackets) return fail("bracketed column sums disagree with Hilbert-Schmidt norms", -1);
    if (!chain_a) return fail("first chain ||S - A|| < eps not established", -1);
    if (!chain_b) return fail("second chain ||L_T^n S - B|| < eps not established", -1);
    rep.success = true;
    rep.failure.clear();
    rep.violated_index = -1;
}

double power_of(double base, std::size_t e) { return std::pow(base, static_cast<double>(e)); }

double delta_for(const WitnessReport& rep) {
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.N; ++i) {
        delta = std::min(delta, rep.radius / power_of(rep.op_norm_t, rep.n_exponents[i]));
        delta = std::min(delta, rep.radius / power_of(rep.op_norm_t, rep.m_exponents[i]));
    }
    return delta;
}

WitnessReport constructive(const TruncatedOperator& t, const TruncatedOperator& ri, const CMatrix& a,
                           const CMatrix& b, WitnessReport rep, std::size_t d, const WitnessOptions& opts) {
    rep.mode = "constructive";
    rep.note = "x and y built from the exact right inverse; exponents spaced by a doubling gap";
    const CMatrix td = t.materialize(d);
    const CMatrix rd = ri.materialize(d);
    const auto formula = ri.norm_formula(d);
    const double norm_r = formula ? *formula : op_norm(rd);
    const std::size_t rows = std::max(HSMatrix(a).row_support(), HSMatrix(b).row_support());
    const std::size_t width = std::max<std::size_t>(1, t.shift_width() + ri.shift_width());
    const auto N = rep.N;
    rep.failure = "no gap up to n_max met the per-index bounds";

    for (std::size_t gap = 1; gap <= opts.n_max; gap *= 2) {
        rep.gap = gap;
        rep.n_exponents.resize(N);
        for (std::size_t i = 0; i < N; ++i) rep.n_exponents[i] = i * gap;
        rep.m_exponents = rep.n_exponents;
        const std::size_t top = (N - 1) * gap;
        if (rows + top * width > d) {
            rep.failure = "guard band: gap " + std::to_string(gap) + " needs d >= " +
                          std::to_string(rows + top * width);
            break;
        }

        CVector y = CVector::Zero(td.rows()), v = CVector::Zero(td.rows());
        for (std::size_t i = 0; i < N; ++i) {
            const auto col = static_cast<Eigen::Index>(i);
            y += apply_times(rd, a.col(col), rep.n_exponents[i]);
            v += apply_times(rd, b.col(col), rep.m_exponents[i]);
        }
        bool per_index = true;
        for (std::size_t i = 0; i < N && per_index; ++i) {
            const auto col = static_cast<Eigen::Index>(i);
            const double yb = (apply_times(td, y, rep.n_exponents[i]) - a.col(col)).norm();
            const double vb = (apply_times(td, v, rep.m_exponents[i]) - b.col(col)).norm();
            if (!(yb < rep.radius) || !(vb < rep.radius)) {
                per_index = false;
                rep.violated_index = static_cast<long>(i + 1);
                rep.failure = "per-index bound violated at i=" + std::to_string(i + 1) +
                              " for gap " + std::to_string(gap);
            }
        }
        if (!per_index) continue;

        rep.delta = delta_for(rep);
        std::size_t chosen = 0;
        CVector tn_y = y;
        for (std::size_t n = 1; n <= opts.n_max; ++n) {
            if (rows + (top + n) * width > d) {
                rep.failure = "guard band: final exponent " + std::to_string(n) + " needs d >= " +
                              std::to_string(rows + (top + n) * width);
                break;
            }
            tn_y = td * tn_y;
            if (power_of(norm_r, n) * v.norm() < rep.delta && tn_y.norm() < rep.delta) {
                chosen = n;
                break;
            }
            rep.failure = "no n <= n_max with ||R||^n ||v|| < delta and ||T^n y|| < delta";
        }
        if (chosen == 0) continue;

        rep.n = chosen;
        rep.y = y;
        rep.x = apply_times(rd, v, chosen);
        assemble(rep, td, a, b, opts);
        if (rep.success) return rep;
    }
    rep.success = false;
    return rep;
}

WitnessReport oracle_mode(const TruncatedOperator& t, const CMatrix& a, const CMatrix& b, WitnessReport rep,
                          std::size_t d, const WitnessOptions& opts) {
    rep.mode = "oracle";
    rep.note = "x and y found by the ball oracle on stacked nested conditions (sufficient test)";
    const auto N = rep.N;
    if (N > 2 || d > 6) {
        throw InvalidArgument("oracle-mode witness search is limited to N <= 2 and d <= 6");
    }
    const CMatrix td = t.materialize(d);
    const auto dim = static_cast<Eigen::Index>(d);
    const double r = rep.radius;
    const std::size_t rows = std::max<std::size_t>(
        1, std::max(HSMatrix(a).row_support(), HSMatrix(b).row_support()));
    const std::size_t width = t.shift_width();
    const std::size_t n_lim = width == 0 ? opts.n_max
                                         : std::min(opts.n_max, rows > d ? 0 : (d - rows) / width);

    std::vector<CMatrix> pw{CMatrix::Identity(dim, dim)};
    for (std::size_t k = 1; k <= n_lim; ++k) pw.push_back(td * pw.back());

    auto nested_exponent = [&](const CMatrix& m) -> std::optional<std::size_t> {
        if (N == 1) return 0;
        const Ball first(m.col(0), r), second(m.col(1), r);
        for (std::size_t k = 1; k <= n_lim; ++k) {
            if (intersects_matrix(pw[k], first, second).feasible) return k;
        }
        return std::nullopt;
    };
    const auto n1 = nested_exponent(a);
    const auto m1 = nested_exponent(b);
    if (!n1 || !m1) {
        rep.failure = "nested preimage set empty within the guard band";
        return rep;
    }
    rep.n_exponents = {0};
    rep.m_exponents = {0};
    if (N == 2) {
        rep.n_exponents.push_back(*n1);
        rep.m_exponents.push_back(*m1);
    }
    rep.delta = delta_for(rep);
    rep.failure = "no final exponent n found by the oracle";

    for (std::size_t n = 1; n + std::max(*n1, *m1) <= n_lim; ++n) {
        // y in U_1 with T^{n_1} y in U_2 and T^n y in W, rows scaled to radius 1.
        CMatrix my(dim * static_cast<Eigen::Index>(N), dim);
        CVector ty = CVector::Zero(my.rows());
        my.topRows(dim) = pw[n] / rep.delta;
        if (N == 2) {
            my.bottomRows(dim) = pw[*n1] / r;
            ty.tail(dim) = a.col(1) / r;
        }
        const auto ysol = constrained_lsq(my, a.col(0), r * (1.0 - kBoundaryShrink), ty);
        // x in W with T^n x in V_1 and T^{n+m_1} x in V_2.
        CMatrix mx(dim * static_cast<Eigen::Index>(N), dim);
        CVector tx(mx.rows());
        mx.topRows(dim) = pw[n] / r;
        tx.head(dim) = b.col(0) / r;
        if (N == 2) {
            mx.bottomRows(dim) = pw[n + *m1] / r;
            tx.tail(dim) = b.col(1) / r;
        }
        const auto xsol = constrained_lsq(mx, CVector::Zero(dim), rep.delta * (1.0 - kBoundaryShrink), tx);
        if (!(ysol.dist < 1.0) || !(xsol.dist < 1.0)) continue;
        rep.n = n;
        rep.y = ysol.x;
        rep.x = xsol.x;
        assemble(rep, td, a, b, opts);
        if (rep.success) return rep;
    }
    rep.success = false;
    return rep;
}

} // namespace

WitnessReport construct_witness(const TruncatedOperator& t, const HSMatrix& a, const HSMatrix& b,
                                double eps, std::size_t d, const WitnessOptions& opts) {
    if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (t.blocks() != 1) throw InvalidArgument("witness construction needs an operator on H");
    if (d == 0) throw InvalidArgument("truncation d must be >= 1");
    const CMatrix ad = embed(a.mat(), d), bd = embed(b.mat(), d);

    WitnessReport rep;
    rep.N = std::max(HSMatrix(ad).column_support(), HSMatrix(bd).column_support());
    rep.epsilon = eps;
    rep.radius = eps / (2.0 * std::sqrt(static_cast<double>(rep.N)));
    rep.d_used = d;
    const auto formula = t.norm_formula(d);
    rep.op_norm_t = formula ? *formula : op_norm(t.materialize(d));
    rep.norm_source = formula ? "formula" : "svd";

    const auto ri = t.right_inverse();
    using Mode = WitnessOptions::Mode;
    if (opts.mode == Mode::Constructive && !ri) {
        throw InvalidArgument(t.describe() + " has no exact right inverse; use oracle mode");
    }
    if (ri && opts.mode != Mode::Oracle) return constructive(t, *ri, ad, bd, rep, d, opts);
    return oracle_mode(t, ad, bd, rep, d, opts);
}

} // namespace hclab
