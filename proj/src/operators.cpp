#include "hclab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace hclab {

namespace detail {

// Caches the prefix of an index function that has been evaluated so far.
class IndexCache {
public:
    explicit IndexCache(IndexFn fn) : fn_(std::move(fn)) {}

    std::vector<Complex> upto(std::size_t n) const {
        std::lock_guard<std::mutex> lock(mu_);
        while (cache_.size() < n) cache_.push_back(fn_(cache_.size() + 1));
        return {cache_.begin(), cache_.begin() + static_cast<std::ptrdiff_t>(n)};
    }
    Complex at(std::size_t i) const { return upto(i).back(); }

private:
    IndexFn fn_;
    mutable std::mutex mu_;
    mutable std::vector<Complex> cache_;
};

enum class Kind {
    BackwardShift,
    ForwardShift,
    Diagonal,
    RankOne,
    Dense,
    Scalar,
    IdentityPlus,
    DirectSum,
    Sum,
    Compose,
    Power,
};

struct OperatorNode {
    explicit OperatorNode(Kind k) : kind(k) {}

    Kind kind;
    std::string label;
    std::shared_ptr<const IndexCache> values;
    bool with_right_inverse = false;
    CVector g, h;
    CMatrix mat;
    Complex lambda{0.0, 0.0};
    std::size_t count = 0;
    std::shared_ptr<const OperatorNode> a, b;
};

} // namespace detail

using detail::Kind;
using detail::OperatorNode;
using NodePtr = std::shared_ptr<const OperatorNode>;

namespace {

constexpr double kOverflowGuard = 1e12;

NodePtr make_node(OperatorNode n) { return std::make_shared<const OperatorNode>(std::move(n)); }

CVector project(const CVector& v, std::size_t d) {
    CVector out = CVector::Zero(static_cast<Eigen::Index>(d));
    const auto keep = std::min<Eigen::Index>(static_cast<Eigen::Index>(d), v.size());
    out.head(keep) = v.head(keep);
    return out;
}

std::size_t dim_of(const OperatorNode& n, std::size_t d);
std::size_t reach_of(const OperatorNode& n, std::size_t d);
CMatrix materialize_node(const OperatorNode& n, std::size_t d);

std::size_t dim_of(const OperatorNode& n, std::size_t d) {
    switch (n.kind) {
    case Kind::DirectSum: return n.count * dim_of(*n.a, d);
    case Kind::Scalar:
    case Kind::IdentityPlus:
    case Kind::Power: return dim_of(*n.a, d);
    case Kind::Sum:
    case Kind::Compose: return dim_of(*n.a, d);
    default: return d;
    }
}

std::size_t reach_of(const OperatorNode& n, std::size_t d) {
    switch (n.kind) {
    case Kind::BackwardShift:
    case Kind::Diagonal: return d;
    case Kind::ForwardShift: return d + 1;
    case Kind::RankOne: return std::max(d, support(n.g));
    case Kind::Dense: return std::max(d, static_cast<std::size_t>(n.mat.rows()));
    case Kind::Scalar:
    case Kind::IdentityPlus: return reach_of(*n.a, d);
    case Kind::DirectSum: {
        const auto r = reach_of(*n.a, d);
        if (r != d) {
            throw InvalidArgument("direct sum of an operator that leaves span{e_1..e_d} "
                                  "cannot be composed at truncation");
        }
        return d;
    }
    case Kind::Sum: return std::max(reach_of(*n.a, d), reach_of(*n.b, d));
    case Kind::Compose: return reach_of(*n.a, reach_of(*n.b, d));
    case Kind::Power: {
        std::size_t r = d;
        for (std::size_t k = 0; k < n.count; ++k) r = reach_of(*n.a, r);
        return r;
    }
    }
    return d;
}

CMatrix top_left(const CMatrix& m, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return m.topLeftCorner(n, n);
}

CMatrix materialize_node(const OperatorNode& n, std::size_t d) {
    const auto dd = static_cast<Eigen::Index>(d);
    switch (n.kind) {
    case Kind::BackwardShift:
    case Kind::ForwardShift: {
        CMatrix m = CMatrix::Zero(dd, dd);
        if (d < 2) return m;
        const auto w = n.values->upto(d - 1);
        double wmax = 0.0;
        for (const auto& wi : w) wmax = std::max(wmax, std::abs(wi));
        if (static_cast<double>(d) * wmax > kOverflowGuard) {
            throw InvalidArgument("weighted shift refuses truncation d=" + std::to_string(d) +
                                  ": d * max|w| exceeds 1e12");
        }
        for (Eigen::Index i = 0; i + 1 < dd; ++i) {
            if (n.kind == Kind::BackwardShift) m(i, i + 1) = w[static_cast<std::size_t>(i)];
            else m(i + 1, i) = w[static_cast<std::size_t>(i)];
        }
        return m;
    }
    case Kind::Diagonal: {
        const auto e = n.values->upto(d);
        CMatrix m = CMatrix::Zero(dd, dd);
        for (Eigen::Index i = 0; i < dd; ++i) m(i, i) = e[static_cast<std::size_t>(i)];
        return m;
    }
    case Kind::RankOne: return project(n.g, d) * project(n.h, d).adjoint();
    case Kind::Dense: {
        CMatrix m = CMatrix::Zero(dd, dd);
        const auto r = std::min(dd, n.mat.rows());
        const auto c = std::min(dd, n.mat.cols());
        m.topLeftCorner(r, c) = n.mat.topLeftCorner(r, c);
        return m;
    }
    case Kind::Scalar: return n.lambda * materialize_node(*n.a, d);
    case Kind::IdentityPlus: {
        CMatrix m = materialize_node(*n.a, d);
        m.diagonal().array() += Complex(1.0, 0.0);
        return m;
    }
    case Kind::DirectSum: {
        const CMatrix block = materialize_node(*n.a, d);
        const auto bs = block.rows();
        CMatrix m = CMatrix::Zero(bs * static_cast<Eigen::Index>(n.count),
                                  bs * static_cast<Eigen::Index>(n.count));
        for (std::size_t j = 0; j < n.count; ++j) {
            const auto off = static_cast<Eigen::Index>(j) * bs;
            m.block(off, off, bs, bs) = block;
        }
        return m;
    }
    case Kind::Sum: {
        const CMatrix ma = materialize_node(*n.a, d);
        const CMatrix mb = materialize_node(*n.b, d);
        if (ma.rows() != mb.rows()) throw DimensionError("sum of operators with different shapes");
        return ma + mb;
    }
    case Kind::Compose: {
        const auto big = reach_of(*n.b, d);
        if (big == d) {
            const CMatrix ma = materialize_node(*n.a, d);
            const CMatrix mb = materialize_node(*n.b, d);
            if (ma.cols() != mb.rows()) throw DimensionError("composition of incompatible shapes");
            return ma * mb;
        }
        return top_left(materialize_node(*n.a, big) * materialize_node(*n.b, big), d);
    }
    case Kind::Power: {
        const auto big = reach_of(n, d);
        const CMatrix base = materialize_node(*n.a, big);
        CMatrix acc = CMatrix::Identity(base.rows(), base.cols());
        for (std::size_t k = 0; k < n.count; ++k) acc = base * acc;
        return big == d ? acc : top_left(acc, d);
    }
    }
    throw Error("unreachable operator kind");
}

std::size_t width_of(const OperatorNode& n) {
    switch (n.kind) {
    case Kind::BackwardShift:
    case Kind::ForwardShift: return 1;
    case Kind::Diagonal:
    case Kind::RankOne:
    case Kind::Dense: return 0;
    case Kind::Scalar:
    case Kind::IdentityPlus:
    case Kind::DirectSum: return width_of(*n.a);
    case Kind::Sum: return std::max(width_of(*n.a), width_of(*n.b));
    case Kind::Compose: return width_of(*n.a) + width_of(*n.b);
    case Kind::Power: return n.count * width_of(*n.a);
    }
    return 0;
}

std::size_t native_of(const OperatorNode& n) {
    switch (n.kind) {
    case Kind::RankOne: return std::max<std::size_t>({1, support(n.g), support(n.h)});
    case Kind::Dense: return static_cast<std::size_t>(std::max<Eigen::Index>({1, n.mat.rows(), n.mat.cols()}));
    case Kind::Scalar:
    case Kind::IdentityPlus:
    case Kind::DirectSum:
    case Kind::Power: return native_of(*n.a);
    case Kind::Sum:
    case Kind::Compose: return std::max(native_of(*n.a), native_of(*n.b));
    default: return 1;
    }
}

std::optional<double> norm_of(const OperatorNode& n, std::size_t d) {
    switch (n.kind) {
    case Kind::BackwardShift:
    case Kind::ForwardShift: {
        if (d < 2) return 0.0;
        double m = 0.0;
        for (const auto& w : n.values->upto(d - 1)) m = std::max(m, std::abs(w));
        return m;
    }
    case Kind::Diagonal: {
        double m = 0.0;
        for (const auto& e : n.values->upto(d)) m = std::max(m, std::abs(e));
        return m;
    }
    case Kind::RankOne: return project(n.g, d).norm() * project(n.h, d).norm();
    case Kind::Scalar: {
        auto inner = norm_of(*n.a, d);
        if (!inner) return std::nullopt;
        return std::abs(n.lambda) * *inner;
    }
    case Kind::DirectSum: return norm_of(*n.a, d);
    default: return std::nullopt;
    }
}

std::string describe_node(const OperatorNode& n) {
    if (!n.label.empty()) return n.label;
    switch (n.kind) {
    case Kind::BackwardShift: return "B_w";
    case Kind::ForwardShift: return "F_w";
    case Kind::Diagonal: return "diag";
    case Kind::RankOne: return "g(x)h";
    case Kind::Dense: return "dense" + std::to_string(n.mat.rows()) + "x" + std::to_string(n.mat.cols());
    case Kind::Scalar: {
        std::string s = "(" + std::to_string(n.lambda.real());
        if (n.lambda.imag() != 0.0) s += (n.lambda.imag() > 0 ? "+" : "") + std::to_string(n.lambda.imag()) + "i";
        return s + ")*" + describe_node(*n.a);
    }
    case Kind::IdentityPlus: return "I+" + describe_node(*n.a);
    case Kind::DirectSum: return "sum^" + std::to_string(n.count) + "(" + describe_node(*n.a) + ")";
    case Kind::Sum: return "(" + describe_node(*n.a) + "+" + describe_node(*n.b) + ")";
    case Kind::Compose: return describe_node(*n.a) + "*" + describe_node(*n.b);
    case Kind::Power: return "(" + describe_node(*n.a) + ")^" + std::to_string(n.count);
    }
    return "?";
}

} // namespace

TruncatedOperator::TruncatedOperator(std::shared_ptr<const detail::OperatorNode> node)
    : node_(std::move(node)) {}

TruncatedOperator TruncatedOperator::identity() {
    return diagonal([](std::size_t) { return Complex(1.0, 0.0); }, "I");
}

TruncatedOperator TruncatedOperator::zero() { return scalar_multiple(0.0, identity()); }

TruncatedOperator TruncatedOperator::weighted_backward_shift(IndexFn w, bool with_right_inverse,
                                                             std::string label) {
    OperatorNode n{Kind::BackwardShift};
    n.values = std::make_shared<const detail::IndexCache>(std::move(w));
    n.with_right_inverse = with_right_inverse;
    n.label = std::move(label);
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::weighted_forward_shift(IndexFn w, std::string label) {
    OperatorNode n{Kind::ForwardShift};
    n.values = std::make_shared<const detail::IndexCache>(std::move(w));
    n.label = std::move(label);
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::diagonal(IndexFn entries, std::string label) {
    OperatorNode n{Kind::Diagonal};
    n.values = std::make_shared<const detail::IndexCache>(std::move(entries));
    n.label = std::move(label);
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::rank_one(CVector g, CVector h) {
    OperatorNode n{Kind::RankOne};
    n.g = std::move(g);
    n.h = std::move(h);
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::dense(CMatrix m) {
    OperatorNode n{Kind::Dense};
    n.mat = std::move(m);
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::scalar_multiple(Complex lambda, const TruncatedOperator& inner) {
    OperatorNode n{Kind::Scalar};
    n.lambda = lambda;
    n.a = inner.node_;
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::identity_plus(const TruncatedOperator& inner) {
    OperatorNode n{Kind::IdentityPlus};
    n.a = inner.node_;
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::direct_sum(const TruncatedOperator& inner, std::size_t copies) {
    if (copies == 0) throw InvalidArgument("direct_sum: copies must be >= 1");
    OperatorNode n{Kind::DirectSum};
    n.count = copies;
    n.a = inner.node_;
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::summand() const {
    if (node_->kind != Kind::DirectSum) return *this;
    return TruncatedOperator(node_->a).summand();
}

TruncatedOperator TruncatedOperator::sum(const TruncatedOperator& a, const TruncatedOperator& b) {
    OperatorNode n{Kind::Sum};
    n.a = a.node_;
    n.b = b.node_;
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::compose(const TruncatedOperator& a, const TruncatedOperator& b) {
    OperatorNode n{Kind::Compose};
    n.a = a.node_;
    n.b = b.node_;
    return TruncatedOperator(make_node(std::move(n)));
}

TruncatedOperator TruncatedOperator::power(const TruncatedOperator& a, std::size_t k) {
    OperatorNode n{Kind::Power};
    n.count = k;
    n.a = a.node_;
    return TruncatedOperator(make_node(std::move(n)));
}

CMatrix TruncatedOperator::materialize(std::size_t d) const {
    if (d == 0) throw InvalidArgument("materialize: truncation d must be >= 1");
    return materialize_node(*node_, d);
}

std::size_t TruncatedOperator::dim(std::size_t d) const { return dim_of(*node_, d); }

std::size_t TruncatedOperator::blocks() const { return dim_of(*node_, 1); }

std::size_t TruncatedOperator::reach(std::size_t d) const { return reach_of(*node_, d); }

std::size_t TruncatedOperator::shift_width() const { return width_of(*node_); }

std::size_t TruncatedOperator::native_dim() const { return native_of(*node_); }

std::size_t TruncatedOperator::required_dim(std::size_t supp, std::size_t n) const {
    return std::max(native_dim(), supp + shift_width() * n);
}

std::optional<double> TruncatedOperator::norm_formula(std::size_t d) const {
    return norm_of(*node_, d);
}

std::optional<TruncatedOperator> TruncatedOperator::right_inverse() const {
    const auto& n = *node_;
    switch (n.kind) {
    case Kind::BackwardShift: {
        if (!n.with_right_inverse) return std::nullopt;
        auto w = n.values;
        return weighted_forward_shift([w](std::size_t i) {
            const Complex wi = w->at(i);
            if (wi == Complex(0.0, 0.0)) {
                throw InvalidArgument("right inverse requested but shift weight w_" +
                                      std::to_string(i) + " is zero");
            }
            return Complex(1.0, 0.0) / wi;
        });
    }
    case Kind::Diagonal: {
        auto e = n.values;
        return diagonal([e](std::size_t i) {
            const Complex ei = e->at(i);
            if (ei == Complex(0.0, 0.0)) {
                throw InvalidArgument("diagonal entry " + std::to_string(i) + " is zero; no inverse");
            }
            return Complex(1.0, 0.0) / ei;
        });
    }
    case Kind::Scalar: {
        if (n.lambda == Complex(0.0, 0.0)) return std::nullopt;
        auto inner = TruncatedOperator(n.a).right_inverse();
        if (!inner) return std::nullopt;
        return scalar_multiple(Complex(1.0, 0.0) / n.lambda, *inner);
    }
    case Kind::DirectSum: {
        auto inner = TruncatedOperator(n.a).right_inverse();
        if (!inner) return std::nullopt;
        return direct_sum(*inner, n.count);
    }
    case Kind::Compose: {
        auto ra = TruncatedOperator(n.a).right_inverse();
        auto rb = TruncatedOperator(n.b).right_inverse();
        if (!ra || !rb) return std::nullopt;
        return compose(*rb, *ra);
    }
    case Kind::Power: {
        auto inner = TruncatedOperator(n.a).right_inverse();
        if (!inner) return std::nullopt;
        return power(*inner, n.count);
    }
    default: return std::nullopt;
    }
}

std::string TruncatedOperator::describe() const { return describe_node(*node_); }

std::size_t block_support(const CVector& v, std::size_t blocks) {
    if (blocks <= 1) return support(v);
    const auto len = static_cast<std::size_t>(v.size());
    if (len % blocks != 0) {
        throw DimensionError("vector of length " + std::to_string(len) + " is not split into " +
                             std::to_string(blocks) + " equal blocks");
    }
    const auto bs = static_cast<Eigen::Index>(len / blocks);
    std::size_t s = 0;
    for (std::size_t j = 0; j < blocks; ++j) {
        s = std::max(s, support(CVector(v.segment(static_cast<Eigen::Index>(j) * bs, bs))));
    }
    return s;
}

std::size_t required_dim(const TruncatedOperator& t, std::size_t d_hint,
                         const std::vector<const CVector*>& vs, std::size_t n) {
    std::size_t supp = 0;
    const auto blocks = t.blocks();
    for (const auto* v : vs) {
        if (blocks > 1 && static_cast<std::size_t>(v->size()) != blocks * d_hint) {
            throw DimensionError("direct-sum vector must have length " +
                                 std::to_string(blocks * d_hint));
        }
        supp = std::max(supp, block_support(*v, blocks));
    }
    return t.required_dim(supp, n);
}

void check_guard(const TruncatedOperator& t, std::size_t d, const std::vector<const CVector*>& vs,
                 std::size_t n) {
    const auto req = required_dim(t, d, vs, n);
    if (req > d) throw GuardBandError(req, d);
}

} // namespace hclab
