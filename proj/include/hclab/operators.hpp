#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hclab/linalg.hpp"

namespace hclab {

/// Index function i -> value with 1-based i, used for shift weights and
/// diagonal entries. One definition serves every truncation.
using IndexFn = std::function<Complex(std::size_t)>;

namespace detail {
struct OperatorNode;
}

/// Bounded operator on l^2 given structurally and realized lazily at any
/// truncation d by compression P_d T P_d onto span{e_1, ..., e_d}.
///
/// Direct sums of m copies are realized block-contiguously: at truncation d
/// block j occupies coordinates (j-1)d+1 .. jd, so dim(d) = m*d.
///
/// Values are immutable and cheap to copy; all methods are safe to call
/// concurrently.
class TruncatedOperator {
public:
    static TruncatedOperator identity();
    static TruncatedOperator zero();
    /// (Tx)_i = w_i x_{i+1}. When `with_right_inverse` is set the right
    /// inverse is the forward shift (Sx)_{i+1} = x_i / w_i; realizing it
    /// throws if a zero weight is met.
    static TruncatedOperator weighted_backward_shift(IndexFn w, bool with_right_inverse = true,
                                                     std::string label = {});
    /// (Sx)_{i+1} = w_i x_i, (Sx)_1 = 0.
    static TruncatedOperator weighted_forward_shift(IndexFn w, std::string label = {});
    static TruncatedOperator diagonal(IndexFn entries, std::string label = {});
    /// (g (x) h)(f) = <f, h> g.
    static TruncatedOperator rank_one(CVector g, CVector h);
    static TruncatedOperator dense(CMatrix m);
    static TruncatedOperator scalar_multiple(Complex lambda, const TruncatedOperator& inner);
    static TruncatedOperator identity_plus(const TruncatedOperator& inner);
    static TruncatedOperator direct_sum(const TruncatedOperator& inner, std::size_t copies);
    static TruncatedOperator sum(const TruncatedOperator& a, const TruncatedOperator& b);
    /// a o b, i.e. x -> a(b(x)).
    static TruncatedOperator compose(const TruncatedOperator& a, const TruncatedOperator& b);
    static TruncatedOperator power(const TruncatedOperator& a, std::size_t n);

    /// Exact compression at truncation d; a dim(d) x dim(d) matrix.
    CMatrix materialize(std::size_t d) const;

    /// Ambient dimension at truncation d (m*d for an m-fold direct sum).
    std::size_t dim(std::size_t d) const;
    /// Number of direct-sum blocks (1 for non-sums).
    std::size_t blocks() const;
    /// The repeated summand of a direct sum, so that T = summand()^{blocks()};
    /// *this for non-sums.
    TruncatedOperator summand() const;
    /// Smallest D >= d with T(span{e_1..e_d}) inside span{e_1..e_D}.
    std::size_t reach(std::size_t d) const;
    /// Largest index displacement of a single application.
    std::size_t shift_width() const;
    /// Smallest truncation holding every explicitly stored coordinate.
    std::size_t native_dim() const;
    /// Truncation needed to apply T^n to vectors of (per-block) support `supp`
    /// without boundary loss: max(native_dim, supp + shift_width * n).
    std::size_t required_dim(std::size_t supp, std::size_t n) const;

    /// Closed-form ||P_d T P_d|| when the structure provides one.
    std::optional<double> norm_formula(std::size_t d) const;
    /// Exact right inverse S with T S = I, when the structure provides one.
    std::optional<TruncatedOperator> right_inverse() const;

    std::string describe() const;

private:
    explicit TruncatedOperator(std::shared_ptr<const detail::OperatorNode> node);
    std::shared_ptr<const detail::OperatorNode> node_;
};

/// Per-block support of v, which must have length blocks*d.
std::size_t block_support(const CVector& v, std::size_t blocks);

/// Largest d-dependent truncation needed to hold all of `vs` and apply T^n.
std::size_t required_dim(const TruncatedOperator& t, std::size_t d_hint,
                         const std::vector<const CVector*>& vs, std::size_t n);

/// Throws GuardBandError unless d is large enough for T^n on vectors `vs`.
void check_guard(const TruncatedOperator& t, std::size_t d,
                 const std::vector<const CVector*>& vs, std::size_t n);

// Free-function spellings used throughout the library.
inline TruncatedOperator weighted_backward_shift(IndexFn w, bool with_right_inverse = true) {
    return TruncatedOperator::weighted_backward_shift(std::move(w), with_right_inverse);
}
inline TruncatedOperator rank_one(CVector g, CVector h) {
    return TruncatedOperator::rank_one(std::move(g), std::move(h));
}
inline TruncatedOperator direct_sum(const TruncatedOperator& t, std::size_t m) {
    return TruncatedOperator::direct_sum(t, m);
}
inline CMatrix materialize(const TruncatedOperator& t, std::size_t d) { return t.materialize(d); }

/// lambda * B where B is the unweighted backward shift.
TruncatedOperator rolewicz(Complex lambda);
/// I + c B.
TruncatedOperator salas(Complex c);
/// Differentiation in Taylor coordinates: weights w_i = i. Unbounded; the
/// shift refuses truncations with d * max|w| above 1e12.
TruncatedOperator maclane();

struct ZooEntry {
    std::string id;          ///< id or id pattern, e.g. "rolewicz:<lambda>"
    std::string description;
};

/// Registered operator families, addressable by string id.
const std::vector<ZooEntry>& zoo_entries();

/// Builds an operator from its registry id. Throws InvalidArgument listing
/// the known ids when the id is unknown or malformed.
TruncatedOperator make_operator(std::string_view id);

} // namespace hclab
