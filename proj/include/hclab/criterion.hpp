#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hclab/operators.hpp"

namespace hclab {

/// Strictly increasing exponent sequence {n_k}, k = 1, 2, ...
class SequenceRule {
public:
    enum class Kind { Explicit, Linear, Geometric };

    /// n_k = k
    static SequenceRule natural() { return linear(1, 1); }
    /// n_k = start + step * (k - 1)
    static SequenceRule linear(std::size_t start, std::size_t step);
    /// n_k = base^k
    static SequenceRule geometric(std::size_t base);
    static SequenceRule explicit_list(std::vector<std::size_t> values);

    /// 1-based access. Throws InvalidArgument past the end of an explicit list.
    std::size_t at(std::size_t k) const;
    /// Leading terms n_1..n_m with n_m <= n_max.
    std::vector<std::size_t> terms_upto(std::size_t n_max) const;
    std::vector<std::size_t> first(std::size_t count) const;

    Kind kind() const noexcept { return kind_; }
    std::size_t start() const noexcept { return start_; }
    std::size_t step() const noexcept { return step_; }
    std::size_t base() const noexcept { return base_; }
    const std::vector<std::size_t>& values() const noexcept { return values_; }

    /// "k", "linear:a,b", "pow:b" or "list:n1,n2,...".
    static SequenceRule parse(const std::string& text);
    std::string to_string() const;

private:
    Kind kind_ = Kind::Linear;
    std::size_t start_ = 1, step_ = 1, base_ = 2;
    std::vector<std::size_t> values_;
};

/// Maps an exponent n_k to the operator S_{n_k}.
using RightInverseFamily = std::function<TruncatedOperator(std::size_t n)>;

/// Data of the Hypercyclicity Criterion at desk scale: generator lists stand
/// in for the dense sets Y and Z (their spans are the finitely supported
/// vectors used in the shift examples).
struct Certificate {
    SequenceRule seq = SequenceRule::natural();
    std::vector<CVector> y_gens;
    std::vector<CVector> z_gens;
    /// Rule id; "right_inverse_power" means S_{n_k} = S^{n_k} for the exact
    /// right inverse S of T. Any other id requires `custom_family`.
    std::string s_rule = "right_inverse_power";
    RightInverseFamily custom_family;
    std::size_t support_bound = 64;

    /// Throws InvalidArgument on empty generator lists or oversize support.
    void validate() const;
};

/// Y = Z = {e_1, ..., e_count}, n_k = k, S_{n_k} = S^{n_k}.
Certificate default_certificate(std::size_t count = 3);

/// How residual sequences are judged. A sequence passes when its last
/// `window` values are all below `tol`, or
/// when it decays geometrically over that window with every ratio at most
/// `decay_ratio`. The second route accepts sequences like 2^{-k}||z|| that
/// converge to 0 but are still above tol at the last sampled k.
struct ConvergenceRule {
    double tol = 1e-8;
    double decay_ratio = 0.9;
    std::size_t window = 3;
};

struct ResidualSeries {
    std::string label;
    std::vector<double> values;  ///< indexed by k - 1
    bool pass = false;
    std::string mode;            ///< "below_tol", "geometric_decay" or "fail"
};

/// Applies `rule` to one residual sequence and fills pass/mode.
void judge(ResidualSeries& s, const ConvergenceRule& rule);

struct CriterionReport {
    std::vector<std::size_t> exponents;
    std::vector<ResidualSeries> y_residuals;        ///< ||T^{n_k} y||
    std::vector<ResidualSeries> s_residuals;        ///< ||S_{n_k} z||
    std::vector<ResidualSeries> inverse_residuals;  ///< ||T^{n_k} S_{n_k} z - z||
    bool pass = false;
    std::size_t d_used = 0;
    double tol = 0.0;
    std::string scope = "verified on generators of Y and Z only";
};

/// Orbit [x, Tx, ..., T^{n_max} x] at truncation d. Throws GuardBandError
/// naming the required d when d is too small for exact application.
std::vector<CVector> orbit(const TruncatedOperator& t, const CVector& x, std::size_t n_max,
                           std::size_t d);

/// Evaluates the three residual families for k = 1..K. With d == 0 the
/// smallest guard-band-respecting truncation is used.
CriterionReport check_certificate(const TruncatedOperator& t, const Certificate& cert, std::size_t K,
                                  const ConvergenceRule& rule = {}, std::size_t d = 0);

/// Only the condition-1 family ||T^{n_k} y|| for the given generators.
std::vector<ResidualSeries> condition_one_residuals(const TruncatedOperator& t,
                                                    const SequenceRule& seq,
                                                    const std::vector<CVector>& y_gens,
                                                    std::size_t K, const ConvergenceRule& rule,
                                                    std::size_t d = 0);

/// {T_n}, n = 1, 2, ...
struct OperatorSequence {
    std::function<TruncatedOperator(std::size_t n)> term;
    std::string label;

    /// T_k = T^{n_k}.
    static OperatorSequence powers_of(const TruncatedOperator& t,
                                      SequenceRule seq = SequenceRule::natural());
};

struct CommuteReport {
    bool commute = false;
    double max_defect = 0.0;  ///< max ||T_n T_m - T_m T_n||_op over checked pairs
    std::size_t pairs = 0;
};

/// Checks every pair among the first `n_terms` terms at truncation d.
CommuteReport check_commuting(const OperatorSequence& seq, std::size_t n_terms, std::size_t d,
                              double tol);

/// Surjectivity of T at truncation d, measured on the rows that are free of
/// truncation loss: the first d - shift_width rows of the compression must
/// have full row rank with sigma_min > rank_tol * sigma_max.
bool has_dense_range(const TruncatedOperator& t, std::size_t d, double rank_tol = 1e-10);

} // namespace hclab
