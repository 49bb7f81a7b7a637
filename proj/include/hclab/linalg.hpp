#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "hclab/errors.hpp"

namespace hclab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Standard basis vector e_j (1-based, as in the literature) of dimension d.
CVector basis(std::size_t j, std::size_t d);

/// Index one past the last nonzero coordinate; 0 for the zero vector.
std::size_t support(const CVector& v);

/// Zero-pads (or trims trailing zeros of) v to dimension d.
/// Throws DimensionError if a nonzero coordinate would be dropped.
CVector fit(const CVector& v, std::size_t d);

/// <u, v>, linear in u and conjugate-linear in v.
Complex inner(const CVector& u, const CVector& v);

/// Largest singular value.
double op_norm(const CMatrix& m);

/// Open ball {h : ||h - center|| < radius}. The same type models balls in
/// H, in H^m and (after column stacking) in the Hilbert-Schmidt class.
class Ball {
public:
    Ball(CVector center, double radius);

    const CVector& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }

    /// Strict membership; no tolerance. Dimensions are reconciled by padding.
    bool contains(const CVector& h) const;

    bool centered_at_zero() const { return support(center_) == 0; }

private:
    CVector center_;
    double radius_;
};

/// diag(B, ..., B) with `copies` equal blocks, kept unexpanded.
struct BlockDiagonal {
    CMatrix block;
    std::size_t copies = 1;

    Eigen::Index rows() const { return block.rows() * static_cast<Eigen::Index>(copies); }
    Eigen::Index cols() const { return block.cols() * static_cast<Eigen::Index>(copies); }
    CVector apply(const CVector& x) const;
    CMatrix dense() const;
};

struct LsqOptions {
    int max_iterations = 100;
    double constraint_tol = 1e-12;
};

struct LsqResult {
    CVector x;          ///< minimizer
    double dist = 0.0;  ///< ||M x - b|| at the minimizer
    bool on_boundary = false;
    int iterations = 0;
};

/// Minimizes ||M x - b|| subject to ||x - a|| <= r.
///
/// After shifting x = a + p the problem is a least-squares trust-region
/// subproblem in p. It is solved from the SVD of M: when the minimum-norm
/// unconstrained solution lies inside the ball it is returned; otherwise the
/// Lagrange multiplier solves the secular equation 1/||p(lambda)|| = 1/r by
/// bracketed Newton with bisection fallback. Since M^H M is positive
/// semidefinite the multiplier is unique and nonnegative.
///
/// r == 0 returns x = a. The returned x always satisfies ||x - a|| <= r.
LsqResult constrained_lsq(const CMatrix& m, const CVector& a, double r,
                          const CVector& b, const LsqOptions& opts = {});
/// Same problem for a block-diagonal M. One SVD of the block serves every
/// copy, since the SVD of diag(B, ..., B) is the SVD of B repeated.
LsqResult constrained_lsq(const BlockDiagonal& m, const CVector& a, double r,
                          const CVector& b, const LsqOptions& opts = {});

/// Minimizes ||u - c|| subject to ||D u|| <= r using the eigendecomposition
/// of D^H D. Returns the minimizer and the minimum distance. This route never
/// forms an SVD and is used to cross-check constrained_lsq on invertible maps.
LsqResult nearest_in_ellipsoid(const CMatrix& d, const CVector& c, double r);

} // namespace hclab
