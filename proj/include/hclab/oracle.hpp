#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hclab/criterion.hpp"
#include "hclab/linalg.hpp"
#include "hclab/operators.hpp"

namespace hclab {

/// Radius shrink applied to the source ball so that a feasible answer is a
/// witness in the open ball, not merely in its closure.
inline constexpr double kBoundaryShrink = 1e-9;
inline constexpr std::size_t kDefaultNMax = 64;

struct IntersectResult {
    bool feasible = false;
    CVector x;          ///< minimizer, strictly inside the source ball
    double dist = 0.0;  ///< min ||M x - target center|| over the shrunk ball
    /// dist - target radius. Negative when feasible; when positive it is the
    /// distance by which the decision is conclusive.
    double margin = 0.0;
};

/// Decides M(src) intersect dst != empty for a precomputed matrix M.
IntersectResult intersects_matrix(const CMatrix& m, const Ball& src, const Ball& dst);
IntersectResult intersects_matrix(const BlockDiagonal& m, const Ball& src, const Ball& dst);

/// Decides T^n U intersect V != empty at truncation d (d == 0 picks the
/// guard-band minimum). Ball centers are zero padded to T.dim(d).
IntersectResult intersects(const TruncatedOperator& t, std::size_t n, const Ball& u, const Ball& v,
                           std::size_t d = 0);

struct ScanRow {
    std::size_t n = 0;
    double dist = 0.0;
    double dist_second = -1.0;  ///< second leg of compound conditions, -1 when unused
    bool feasible = false;
};

struct OracleResult {
    std::string condition;
    bool feasible = false;
    std::size_t n = 0;     ///< witness exponent, 0 when infeasible
    CVector x_witness;     ///< for compound conditions: the point of W
    CVector y_witness;     ///< for compound conditions: the point of U
    double dist = 0.0;
    double dist_second = -1.0;
    std::vector<ScanRow> scanned;
    std::size_t d_used = 0;
};

/// Smallest n in 1..n_max with T^n U intersect V nonempty.
OracleResult first_hit(const TruncatedOperator& t, const Ball& u, const Ball& v, std::size_t n_max,
                       std::size_t d = 0);

/// Same scan restricted to the given increasing exponents.
OracleResult first_hit_along(const TruncatedOperator& t, const Ball& u, const Ball& v,
                             const std::vector<std::size_t>& exponents, std::size_t d = 0);

/// Smallest n with both T^n U intersect W and T^n W intersect V nonempty.
/// y_witness lies in U with T^n y in W; x_witness lies in W with T^n x in V.
/// Throws InvalidArgument unless W is centered at zero.
OracleResult criterion_condition(const TruncatedOperator& t, const Ball& u, const Ball& v,
                                 const Ball& w, std::size_t n_max, std::size_t d = 0);

/// Smallest n with both T^n U intersect W and T^{-n} U intersect W nonempty.
/// The preimage condition is decided as T^n W intersect U; no inverse is formed.
OracleResult prop27_condition(const TruncatedOperator& t, const Ball& u, const Ball& w,
                              std::size_t n_max, std::size_t d = 0);

/// The same condition for an operator with an exact two-sided inverse, with
/// the second leg computed directly from T^{-n}: min ||u - c_U|| subject to
/// ||T^{-n} u|| <= r_W, solved through an eigendecomposition. Its distances
/// coincide with prop27_condition's. Throws if T is not invertible at d.
OracleResult prop27_inverse_form(const TruncatedOperator& t, const Ball& u, const Ball& w,
                                 std::size_t n_max, std::size_t d = 0);

/// U intersect T^{-n} V nonempty, decided by mapping V through T^{-n}.
/// Requires an exact two-sided inverse at truncation d.
IntersectResult intersects_preimage_form(const TruncatedOperator& t, std::size_t n, const Ball& u,
                                         const Ball& v, std::size_t d = 0);

struct Prop212Result {
    std::optional<std::size_t> n_found;  ///< smallest k-index N (1-based)
    std::vector<std::size_t> exponents;
    std::vector<bool> feasible;
    std::vector<double> dists;
    std::size_t d_used = 0;
};

/// Smallest N such that T^{n_k} U intersect V is nonempty for every k in
/// N..K_window.
Prop212Result prop212_condition(const TruncatedOperator& t, const SequenceRule& seq, const Ball& u,
                                const Ball& v, std::size_t k_window, std::size_t d = 0);

/// Throws GuardBandError/InvalidArgument when d is nonzero and too small,
/// returns the truncation to use otherwise.
std::size_t resolve_dim(const TruncatedOperator& t, std::size_t d,
                        const std::vector<const CVector*>& centers, std::size_t n);

} // namespace hclab
