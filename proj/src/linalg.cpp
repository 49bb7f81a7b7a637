#include "hclab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hclab {

CVector basis(std::size_t j, std::size_t d) {
    if (j == 0 || j > d) {
        throw DimensionError("basis index e_" + std::to_string(j) +
                             " outside dimension " + std::to_string(d));
    }
    CVector e = CVector::Zero(static_cast<Eigen::Index>(d));
    e(static_cast<Eigen::Index>(j - 1)) = 1.0;
    return e;
}

std::size_t support(const CVector& v) {
    for (Eigen::Index i = v.size(); i > 0; --i) {
        if (v(i - 1) != Complex(0.0, 0.0)) return static_cast<std::size_t>(i);
    }
    return 0;
}

CVector fit(const CVector& v, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    if (v.size() == n) return v;
    if (support(v) > d) {
        throw DimensionError("vector with support " + std::to_string(support(v)) +
                             " does not fit in dimension " + std::to_string(d));
    }
    CVector out = CVector::Zero(n);
    const auto keep = std::min(n, v.size());
    out.head(keep) = v.head(keep);
    return out;
}

Complex inner(const CVector& u, const CVector& v) {
    if (u.size() != v.size()) {
        throw DimensionError("inner: dimension mismatch " + std::to_string(u.size()) +
                             " vs " + std::to_string(v.size()));
    }
    // Eigen's dot conjugates its first argument.
    return v.dot(u);
}

double op_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

Ball::Ball(CVector center, double radius) : center_(std::move(center)), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("ball radius must be positive and finite, got " +
                              std::to_string(radius));
    }
    if (center_.size() == 0) throw InvalidArgument("ball center must have dimension >= 1");
}

bool Ball::contains(const CVector& h) const {
    const auto d = static_cast<std::size_t>(std::max(h.size(), center_.size()));
    return (fit(h, d) - fit(center_, d)).norm() < radius_;
}

namespace {

// Coefficients of p(lambda) in the right singular basis, restricted to the
// numerically nonzero singular values.
struct Secular {
    Eigen::ArrayXd sigma;
    Eigen::ArrayXd beta_abs2;

    double norm2(double lambda) const {
        const Eigen::ArrayXd den = sigma.square() + lambda;
        return (sigma.square() * beta_abs2 / den.square()).sum();
    }
    double dnorm2(double lambda) const {
        const Eigen::ArrayXd den = sigma.square() + lambda;
        return -2.0 * (sigma.square() * beta_abs2 / den.cube()).sum();
    }
};

} // namespace

CVector BlockDiagonal::apply(const CVector& x) const {
    if (x.size() != cols()) throw DimensionError("BlockDiagonal::apply: size mismatch");
    CVector y(rows());
    const auto br = block.rows(), bc = block.cols();
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(copies); ++j) {
        y.segment(j * br, br).noalias() = block * x.segment(j * bc, bc);
    }
    return y;
}

CMatrix BlockDiagonal::dense() const {
    CMatrix out = CMatrix::Zero(rows(), cols());
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(copies); ++j) {
        out.block(j * block.rows(), j * block.cols(), block.rows(), block.cols()) = block;
    }
    return out;
}

LsqResult constrained_lsq(const CMatrix& m, const CVector& a, double r,
                          const CVector& b, const LsqOptions& opts) {
    return constrained_lsq(BlockDiagonal{m, 1}, a, r, b, opts);
}

LsqResult constrained_lsq(const BlockDiagonal& m, const CVector& a, double r,
                          const CVector& b, const LsqOptions& opts) {
    if (m.cols() != a.size() || m.rows() != b.size()) {
        throw DimensionError("constrained_lsq: M is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", a has " + std::to_string(a.size()) +
                             ", b has " + std::to_string(b.size()));
    }
    if (r < 0.0 || !std::isfinite(r)) throw InvalidArgument("constrained_lsq: r must be >= 0");

    LsqResult out;
    const CVector c = b - m.apply(a);
    if (r == 0.0 || m.block.size() == 0) {
        out.x = a;
        out.dist = c.norm();
        return out;
    }

    Eigen::BDCSVD<CMatrix> svd(m.block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? s(0) * std::numeric_limits<double>::epsilon() *
                                             static_cast<double>(std::max(m.rows(), m.cols()))
                                       : 0.0;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;
    if (rank == 0) {
        out.x = a;
        out.dist = c.norm();
        return out;
    }

    // Singular coordinates of every copy, stacked block by block.
    const auto copies = static_cast<Eigen::Index>(m.copies);
    const auto br = m.block.rows(), bc = m.block.cols();
    const auto Ur = svd.matrixU().leftCols(rank);
    const auto Vr = svd.matrixV().leftCols(rank);
    CVector beta(rank * copies);
    Eigen::ArrayXd sigma(rank * copies);
    for (Eigen::Index j = 0; j < copies; ++j) {
        beta.segment(j * rank, rank).noalias() = Ur.adjoint() * c.segment(j * br, br);
        sigma.segment(j * rank, rank) = s.head(rank).array();
    }
    Secular sec{sigma, beta.array().abs2()};

    CVector q = (beta.array() / sigma.cast<Complex>()).matrix();
    if (q.norm() > r) {
        out.on_boundary = true;
        const double beta_norm = std::sqrt(sec.beta_abs2.sum());
        double lo = 0.0;
        double hi = s(0) * beta_norm / r;
        // psi(lambda) = 1/||p|| - 1/r is increasing and close to linear.
        auto psi = [&](double lam) { return 1.0 / std::sqrt(sec.norm2(lam)) - 1.0 / r; };
        double lam = 0.5 * (lo + hi);
        for (int it = 0; it < opts.max_iterations; ++it) {
            out.iterations = it + 1;
            const double n2 = sec.norm2(lam);
            const double pn = std::sqrt(n2);
            if (std::abs(pn - r) <= opts.constraint_tol * std::max(1.0, r)) break;
            if (psi(lam) < 0.0) lo = lam; else hi = lam;
            // d psi / d lambda = -(1/2) n2^{-3/2} d(n2)/d lambda
            const double dpsi = -0.5 * sec.dnorm2(lam) / (n2 * pn);
            double next = lam - psi(lam) / dpsi;
            if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
            if (next == lam) break;
            lam = next;
        }
        const Eigen::ArrayXd den = sigma.square() + lam;
        q = (beta.array() * sigma.cast<Complex>() / den.cast<Complex>()).matrix();
        const double qn = q.norm();
        if (qn > r) q *= r / qn;
    }

    out.x = a;
    for (Eigen::Index j = 0; j < copies; ++j) out.x.segment(j * bc, bc) += Vr * q.segment(j * rank, rank);
    out.dist = (m.apply(out.x) - b).norm();
    return out;
}

LsqResult nearest_in_ellipsoid(const CMatrix& d, const CVector& c, double r) {
    if (d.cols() != c.size()) throw DimensionError("nearest_in_ellipsoid: dimension mismatch");
    if (r < 0.0) throw InvalidArgument("nearest_in_ellipsoid: r must be >= 0");
    LsqResult out;
    if ((d * c).norm() <= r) {
        out.x = c;
        out.dist = 0.0;
        return out;
    }
    out.on_boundary = true;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(d.adjoint() * d);
    const Eigen::ArrayXd lam = eig.eigenvalues().array().max(0.0);
    const CVector gamma = eig.eigenvectors().adjoint() * c;
    const Eigen::ArrayXd g2 = gamma.array().abs2();
    auto constraint2 = [&](double mu) {
        return (lam * g2 / (1.0 + mu * lam).square()).sum();
    };
    // lam/(1+mu lam)^2 <= 1/(4 mu), so this upper end satisfies the constraint.
    double lo = 0.0;
    double hi = std::max(g2.sum() / (4.0 * r * r), 1e-300);
    while (constraint2(hi) > r * r) hi *= 2.0;
    for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
        out.iterations = it + 1;
        const double mid = 0.5 * (lo + hi);
        if (constraint2(mid) > r * r) lo = mid; else hi = mid;
    }
    const double mu = hi;
    const Eigen::ArrayXd shrink = 1.0 / (1.0 + mu * lam);
    out.x = eig.eigenvectors() * (gamma.array() * shrink.cast<Complex>()).matrix();
    out.dist = std::sqrt((g2 * (mu * lam * shrink).square()).sum());
    return out;
}

} // namespace hclab
