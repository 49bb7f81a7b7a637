#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hclab/linalg.hpp"
#include "hclab/operators.hpp"

namespace hclab {

/// ||A||_2 = (sum_i ||A e_i||^2)^{1/2}, accumulated column by column.
double hs_norm(const CMatrix& a);

/// Element of the Hilbert-Schmidt class at truncation: a matrix whose
/// columns are the images A e_1, A e_2, ... together with its HS norm.
class HSMatrix {
public:
    HSMatrix() = default;
    explicit HSMatrix(CMatrix m) : mat_(std::move(m)), norm_(hclab::hs_norm(mat_)) {}

    const CMatrix& mat() const noexcept { return mat_; }
    double hs_norm() const noexcept { return norm_; }
    Eigen::Index rows() const { return mat_.rows(); }
    Eigen::Index cols() const { return mat_.cols(); }
    /// Number of leading columns outside of which A e_i = 0 (at least 1).
    std::size_t column_support() const;
    /// Largest support over the columns.
    std::size_t row_support() const;

private:
    CMatrix mat_;
    double norm_ = 0.0;
};

/// L_T(S) = T S with T compressed to truncation d = S.rows().
HSMatrix left_multiply(const TruncatedOperator& t, const HSMatrix& s, std::size_t d);

/// F = A on the first N columns, 0 after. Throws unless 1 <= N <= cols.
HSMatrix finite_rank_approx(const HSMatrix& a, std::size_t n);

/// sum_{i > N} ||A e_i||^2.
double dropped_column_sum(const HSMatrix& a, std::size_t n);

/// Column stacking vec(S), the unitary B_2 -> H^cols.
CVector vectorize(const CMatrix& s);
CMatrix unvectorize(const CVector& v, std::size_t rows, std::size_t cols);

/// ||vec(L_T S) - (sum^cols T) vec(S)||; zero up to rounding.
double vectorize_equivalence(const TruncatedOperator& t, const HSMatrix& s, std::size_t d);

/// L_T realized on vec(B_2) as the direct sum of `cols` copies of T.
TruncatedOperator left_multiplication_operator(const TruncatedOperator& t, std::size_t cols);

struct WitnessOptions {
    enum class Mode { Auto, Constructive, Oracle };
    Mode mode = Mode::Auto;
    std::size_t n_max = 64;
    /// Relative slack for the triangle inequalities of the two norm chains.
    double chain_slack = 1e-12;
};

/// Result of building S = S_1 + S_2 with S close to A and T^n S close to B.
struct WitnessReport {
    bool success = false;
    std::string mode;         ///< "constructive" or "oracle"
    std::string norm_source;  ///< "formula" or "svd"
    std::string failure;      ///< empty on success
    long violated_index = -1; ///< 1-based i of the first failed per-index bound

    std::size_t N = 0;
    double epsilon = 0.0;
    double radius = 0.0;      ///< eps / (2 sqrt N)
    double op_norm_t = 0.0;
    double delta = 0.0;
    std::size_t gap = 0;
    std::vector<std::size_t> n_exponents;  ///< n_0 .. n_{N-1}
    std::vector<std::size_t> m_exponents;  ///< m_0 .. m_{N-1}
    std::size_t n = 0;
    std::size_t d_used = 0;

    CVector x, y;
    HSMatrix s1, s2, s;

    /// ||T^{n_{i-1}} y - A e_i||
    std::vector<double> y_bounds;
    /// ||T^n (T^{m_{i-1}} x) - B e_i||
    std::vector<double> x_bounds;
    /// ||S_2 e_i|| = ||T^{m_{i-1}} x||, each < delta ||T||^{m_{i-1}}
    std::vector<double> s2_columns;
    /// ||T^{n_{i-1}} (T^n y)||
    std::vector<double> s1_tail;

    double norm_x = 0.0;       ///< ||x||, < delta
    double norm_tn_y = 0.0;    ///< ||T^n y||, < delta

    // First chain: ||S - A|| <= ||S_1 - A|| + ||S_2||.
    double residual_a = 0.0;
    double chain_a_s1 = 0.0;
    double chain_a_s2 = 0.0;
    // Second chain: ||L^n S - B|| <= ||L^n S_2 - B|| + ||L^n S_1||.
    double residual_b = 0.0;
    double chain_b_s2 = 0.0;
    double chain_b_s1 = 0.0;
    bool chains_verified = false;

    std::string note;
};

/// Builds the Hilbert-Schmidt witness for a pair of finite-rank targets A, B
/// (A e_i = B e_i = 0 for i > N) at truncation d.
///
/// Constructive mode needs an exact right inverse R of T. Exponents are
/// spaced n_i = m_i = i * gap with gap doubling from 1; y = sum R^{n_{i-1}} A e_i,
/// v = sum R^{m_{i-1}} B e_i and x = R^n v for the first n where both
/// ||R||^n ||v|| and ||T^n y|| drop below delta. Oracle mode searches x and y
/// with the ball oracle and is limited to N <= 2, d <= 6.
///
/// Throws InvalidArgument if constructive mode is requested without a right
/// inverse or oracle limits are exceeded; unmet bounds yield success = false.
WitnessReport construct_witness(const TruncatedOperator& t, const HSMatrix& a, const HSMatrix& b,
                                double eps, std::size_t d, const WitnessOptions& opts = {});

} // namespace hclab
