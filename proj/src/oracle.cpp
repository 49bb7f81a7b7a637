#include "hclab/oracle.hpp"

#include <algorithm>

namespace hclab {

namespace {

// Yields compressions of T^n for increasing n. Operators that keep
// span{e_1..e_d} invariant are advanced by repeated multiplication; others
// are rematerialized through the power node so the compression stays exact.
class PowerStepper {
public:
    PowerStepper(const TruncatedOperator& t, std::size_t d)
        : t_(t.summand()), d_(d), invariant_(t_.reach(d) == d), base_(t_.materialize(d)) {
        acc_.block = CMatrix::Identity(base_.rows(), base_.cols());
        acc_.copies = t.blocks();
    }

    const BlockDiagonal& advance_to(std::size_t n) {
        if (n < at_) throw InvalidArgument("exponents must be increasing");
        if (n == at_) return acc_;
        if (invariant_) {
            for (; at_ < n; ++at_) acc_.block = base_ * acc_.block;
        } else {
            acc_.block = TruncatedOperator::power(t_, n).materialize(d_);
            at_ = n;
        }
        return acc_;
    }

private:
    TruncatedOperator t_;
    std::size_t d_;
    bool invariant_;
    CMatrix base_;
    BlockDiagonal acc_;
    std::size_t at_ = 0;
};

Ball padded(const Ball& b, std::size_t n) { return Ball(fit(b.center(), n), b.radius()); }

void require_zero_center(const Ball& w) {
    if (!w.centered_at_zero()) {
        throw InvalidArgument("W must be a neighborhood of zero (ball centered at 0)");
    }
}

// Checks that S is a two-sided inverse of T on the truncation.
CMatrix exact_inverse(const TruncatedOperator& t, std::size_t d) {
    const auto ri = t.right_inverse();
    if (!ri) throw InvalidArgument(t.describe() + " has no exact inverse");
    const CMatrix m = t.materialize(d);
    const CMatrix s = ri->materialize(d);
    const CMatrix id = CMatrix::Identity(m.rows(), m.cols());
    if (!(m * s - id).isZero(1e-12) || !(s * m - id).isZero(1e-12)) {
        throw InvalidArgument(t.describe() + " is not invertible at truncation d=" + std::to_string(d));
    }
    return s;
}

} // namespace

std::size_t resolve_dim(const TruncatedOperator& t, std::size_t d,
                        const std::vector<const CVector*>& centers, std::size_t n) {
    const auto blocks = t.blocks();
    if (blocks > 1) {
        if (d == 0) {
            const auto len = static_cast<std::size_t>(centers.front()->size());
            if (len % blocks != 0) {
                throw DimensionError("center length " + std::to_string(len) + " is not a multiple of " +
                                     std::to_string(blocks) + " blocks");
            }
            d = len / blocks;
        }
        check_guard(t, d, centers, n);
        return d;
    }
    const auto req = required_dim(t, d, centers, n);
    if (d == 0) return req;
    if (req > d) throw GuardBandError(req, d);
    return d;
}

IntersectResult intersects_matrix(const CMatrix& m, const Ball& src, const Ball& dst) {
    return intersects_matrix(BlockDiagonal{m, 1}, src, dst);
}

IntersectResult intersects_matrix(const BlockDiagonal& m, const Ball& src, const Ball& dst) {
    const auto sol = constrained_lsq(m, fit(src.center(), static_cast<std::size_t>(m.cols())),
                                     src.radius() * (1.0 - kBoundaryShrink),
                                     fit(dst.center(), static_cast<std::size_t>(m.rows())));
    IntersectResult r;
    r.x = sol.x;
    r.dist = sol.dist;
    r.margin = sol.dist - dst.radius();
    r.feasible = sol.dist < dst.radius() && src.contains(sol.x);
    return r;
}

IntersectResult intersects(const TruncatedOperator& t, std::size_t n, const Ball& u, const Ball& v,
                           std::size_t d) {
    d = resolve_dim(t, d, {&u.center(), &v.center()}, n);
    const BlockDiagonal m{TruncatedOperator::power(t.summand(), n).materialize(d), t.blocks()};
    const auto dim = static_cast<std::size_t>(m.rows());
    return intersects_matrix(m, padded(u, dim), padded(v, dim));
}

OracleResult first_hit_along(const TruncatedOperator& t, const Ball& u, const Ball& v,
                             const std::vector<std::size_t>& exponents, std::size_t d) {
    OracleResult out;
    out.condition = "T^n U & V";
    if (exponents.empty()) return out;
    d = resolve_dim(t, d, {&u.center(), &v.center()}, exponents.back());
    out.d_used = d;
    const auto dim = t.dim(d);
    const Ball up = padded(u, dim), vp = padded(v, dim);
    PowerStepper powers(t, d);
    for (auto n : exponents) {
        const auto r = intersects_matrix(powers.advance_to(n), up, vp);
        out.scanned.push_back({n, r.dist, -1.0, r.feasible});
        if (r.feasible) {
            out.feasible = true;
            out.n = n;
            out.x_witness = r.x;
            out.dist = r.dist;
            return out;
        }
    }
    return out;
}

OracleResult first_hit(const TruncatedOperator& t, const Ball& u, const Ball& v, std::size_t n_max,
                       std::size_t d) {
    if (n_max == 0) throw InvalidArgument("n_max must be >= 1");
    std::vector<std::size_t> exps(n_max);
    for (std::size_t i = 0; i < n_max; ++i) exps[i] = i + 1;
    return first_hit_along(t, u, v, exps, d);
}

OracleResult criterion_condition(const TruncatedOperator& t, const Ball& u, const Ball& v,
                                 const Ball& w, std::size_t n_max, std::size_t d) {
    require_zero_center(w);
    if (n_max == 0) throw InvalidArgument("n_max must be >= 1");
    OracleResult out;
    out.condition = "T^n U & W and T^n W & V";
    d = resolve_dim(t, d, {&u.center(), &v.center(), &w.center()}, n_max);
    out.d_used = d;
    const auto dim = t.dim(d);
    const Ball up = padded(u, dim), vp = padded(v, dim), wp = padded(w, dim);
    PowerStepper powers(t, d);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const BlockDiagonal& m = powers.advance_to(n);
        const auto ry = intersects_matrix(m, up, wp);
        const auto rx = intersects_matrix(m, wp, vp);
        const bool ok = ry.feasible && rx.feasible;
        out.scanned.push_back({n, ry.dist, rx.dist, ok});
        if (ok) {
            out.feasible = true;
            out.n = n;
            out.y_witness = ry.x;
            out.x_witness = rx.x;
            out.dist = ry.dist;
            out.dist_second = rx.dist;
            return out;
        }
    }
    return out;
}

OracleResult prop27_condition(const TruncatedOperator& t, const Ball& u, const Ball& w,
                              std::size_t n_max, std::size_t d) {
    require_zero_center(w);
    if (n_max == 0) throw InvalidArgument("n_max must be >= 1");
    OracleResult out;
    out.condition = "T^n U & W and T^-n U & W";
    d = resolve_dim(t, d, {&u.center(), &w.center()}, n_max);
    out.d_used = d;
    const auto dim = t.dim(d);
    const Ball up = padded(u, dim), wp = padded(w, dim);
    PowerStepper powers(t, d);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const BlockDiagonal& m = powers.advance_to(n);
        const auto forward = intersects_matrix(m, up, wp);
        // T^{-n}U & W nonempty  <=>  some w in W has T^n w in U.
        const auto preimage = intersects_matrix(m, wp, up);
        const bool ok = forward.feasible && preimage.feasible;
        out.scanned.push_back({n, forward.dist, preimage.dist, ok});
        if (ok) {
            out.feasible = true;
            out.n = n;
            out.y_witness = forward.x;
            out.x_witness = preimage.x;
            out.dist = forward.dist;
            out.dist_second = preimage.dist;
            return out;
        }
    }
    return out;
}

OracleResult prop27_inverse_form(const TruncatedOperator& t, const Ball& u, const Ball& w,
                                 std::size_t n_max, std::size_t d) {
    require_zero_center(w);
    if (n_max == 0) throw InvalidArgument("n_max must be >= 1");
    OracleResult out;
    out.condition = "T^n U & W and T^-n U & W (inverse form)";
    d = resolve_dim(t, d, {&u.center(), &w.center()}, n_max);
    out.d_used = d;
    const CMatrix inv = exact_inverse(t, d);
    const auto dim = t.dim(d);
    const Ball up = padded(u, dim), wp = padded(w, dim);
    PowerStepper powers(t, d);
    CMatrix inv_pow = CMatrix::Identity(inv.rows(), inv.cols());
    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto forward = intersects_matrix(powers.advance_to(n), up, wp);
        inv_pow = inv * inv_pow;
        const auto sol = nearest_in_ellipsoid(inv_pow, up.center(), wp.radius() * (1.0 - kBoundaryShrink));
        const CVector w_point = inv_pow * sol.x;
        const bool back = sol.dist < up.radius() && wp.contains(w_point);
        const bool ok = forward.feasible && back;
        out.scanned.push_back({n, forward.dist, sol.dist, ok});
        if (ok) {
            out.feasible = true;
            out.n = n;
            out.y_witness = forward.x;
            out.x_witness = w_point;
            out.dist = forward.dist;
            out.dist_second = sol.dist;
            return out;
        }
    }
    return out;
}

IntersectResult intersects_preimage_form(const TruncatedOperator& t, std::size_t n, const Ball& u,
                                         const Ball& v, std::size_t d) {
    d = resolve_dim(t, d, {&u.center(), &v.center()}, n);
    const CMatrix inv = exact_inverse(t, d);
    CMatrix inv_pow = CMatrix::Identity(inv.rows(), inv.cols());
    for (std::size_t k = 0; k < n; ++k) inv_pow = inv * inv_pow;
    const auto dim = t.dim(d);
    // U & T^{-n}V nonempty  <=>  some v in V has T^{-n} v in U.
    auto r = intersects_matrix(inv_pow, padded(v, dim), padded(u, dim));
    if (r.feasible) r.x = inv_pow * r.x;
    return r;
}

Prop212Result prop212_condition(const TruncatedOperator& t, const SequenceRule& seq, const Ball& u,
                                const Ball& v, std::size_t k_window, std::size_t d) {
    if (k_window == 0) throw InvalidArgument("K_window must be >= 1");
    Prop212Result out;
    out.exponents = seq.first(k_window);
    d = resolve_dim(t, d, {&u.center(), &v.center()}, out.exponents.back());
    out.d_used = d;
    const auto dim = t.dim(d);
    const Ball up = padded(u, dim), vp = padded(v, dim);
    PowerStepper powers(t, d);
    for (auto n : out.exponents) {
        const auto r = intersects_matrix(powers.advance_to(n), up, vp);
        out.feasible.push_back(r.feasible);
        out.dists.push_back(r.dist);
    }
    std::size_t run = 0;
    for (auto it = out.feasible.rbegin(); it != out.feasible.rend() && *it; ++it) ++run;
    if (run > 0) out.n_found = k_window - run + 1;
    return out;
}

} // namespace hclab
