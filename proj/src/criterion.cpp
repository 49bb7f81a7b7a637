#include "hclab/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hclab {

SequenceRule SequenceRule::linear(std::size_t start, std::size_t step) {
    if (start == 0 || step == 0) throw InvalidArgument("linear sequence needs start >= 1, step >= 1");
    SequenceRule r;
    r.kind_ = Kind::Linear;
    r.start_ = start;
    r.step_ = step;
    return r;
}

SequenceRule SequenceRule::geometric(std::size_t base) {
    if (base < 2) throw InvalidArgument("geometric sequence needs base >= 2");
    SequenceRule r;
    r.kind_ = Kind::Geometric;
    r.base_ = base;
    return r;
}

SequenceRule SequenceRule::explicit_list(std::vector<std::size_t> values) {
    if (values.empty()) throw InvalidArgument("explicit sequence must be nonempty");
    if (values.front() == 0) throw InvalidArgument("sequence terms must be positive");
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] <= values[i - 1]) throw InvalidArgument("sequence must be strictly increasing");
    }
    SequenceRule r;
    r.kind_ = Kind::Explicit;
    r.values_ = std::move(values);
    return r;
}

std::size_t SequenceRule::at(std::size_t k) const {
    if (k == 0) throw InvalidArgument("sequence index is 1-based");
    switch (kind_) {
    case Kind::Explicit:
        if (k > values_.size()) {
            throw InvalidArgument("explicit sequence has only " + std::to_string(values_.size()) +
                                  " terms, n_" + std::to_string(k) + " requested");
        }
        return values_[k - 1];
    case Kind::Linear: return start_ + step_ * (k - 1);
    case Kind::Geometric: {
        std::size_t v = 1;
        for (std::size_t i = 0; i < k; ++i) {
            if (v > (std::size_t(1) << 40)) throw InvalidArgument("geometric sequence overflow");
            v *= base_;
        }
        return v;
    }
    }
    return 0;
}

std::vector<std::size_t> SequenceRule::terms_upto(std::size_t n_max) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 1;; ++k) {
        if (kind_ == Kind::Explicit && k > values_.size()) break;
        const auto v = at(k);
        if (v > n_max) break;
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> SequenceRule::first(std::size_t count) const {
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t k = 1; k <= count; ++k) out.push_back(at(k));
    return out;
}

namespace {

std::vector<std::size_t> parse_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(item, &pos);
            if (pos != item.size()) throw InvalidArgument("");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw InvalidArgument("bad integer '" + item + "' in sequence");
        }
    }
    return out;
}

} // namespace

SequenceRule SequenceRule::parse(const std::string& text) {
    if (text == "k") return natural();
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const auto tail = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
    if (head == "linear") {
        const auto v = parse_list(tail);
        if (v.size() != 2) throw InvalidArgument("linear sequence expects linear:start,step");
        return linear(v[0], v[1]);
    }
    if (head == "pow") {
        const auto v = parse_list(tail);
        if (v.size() != 1) throw InvalidArgument("geometric sequence expects pow:base");
        return geometric(v[0]);
    }
    if (head == "list") return explicit_list(parse_list(tail));
    throw InvalidArgument("unknown sequence '" + text + "' (expected k, linear:a,b, pow:b, list:...)");
}

std::string SequenceRule::to_string() const {
    switch (kind_) {
    case Kind::Linear:
        if (start_ == 1 && step_ == 1) return "k";
        return "linear:" + std::to_string(start_) + "," + std::to_string(step_);
    case Kind::Geometric: return "pow:" + std::to_string(base_);
    case Kind::Explicit: {
        std::string s = "list:";
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(values_[i]);
        }
        return s;
    }
    }
    return {};
}

void Certificate::validate() const {
    if (y_gens.empty() || z_gens.empty()) throw InvalidArgument("certificate needs nonempty Y and Z generators");
    for (const auto* list : {&y_gens, &z_gens}) {
        for (const auto& v : *list) {
            if (support(v) > support_bound) {
                throw InvalidArgument("generator support " + std::to_string(support(v)) +
                                      " exceeds bound " + std::to_string(support_bound));
            }
        }
    }
    if (s_rule != "right_inverse_power" && !custom_family) {
        throw InvalidArgument("S rule '" + s_rule + "' has no family attached");
    }
}

Certificate default_certificate(std::size_t count) {
    Certificate c;
    for (std::size_t j = 1; j <= count; ++j) {
        c.y_gens.push_back(basis(j, count));
        c.z_gens.push_back(basis(j, count));
    }
    return c;
}

void judge(ResidualSeries& s, const ConvergenceRule& rule) {
    s.pass = false;
    s.mode = "fail";
    if (s.values.empty()) return;
    for (double v : s.values) {
        if (!std::isfinite(v)) return;
    }
    const auto w = std::min(std::max<std::size_t>(rule.window, 1), s.values.size());
    const auto first = s.values.end() - static_cast<std::ptrdiff_t>(w);
    // Below tol, rounding noise may wiggle either way; only the level counts.
    bool settled = true;
    for (auto it = first; it != s.values.end(); ++it) settled = settled && *it < rule.tol;
    bool geometric = w >= 2;
    for (auto it = first + 1; it != s.values.end(); ++it) {
        if (!(*(it - 1) > 0.0) || *it / *(it - 1) > rule.decay_ratio) geometric = false;
    }
    if (settled) {
        s.pass = true;
        s.mode = "below_tol";
    } else if (geometric) {
        s.pass = true;
        s.mode = "geometric_decay";
    }
}

std::vector<CVector> orbit(const TruncatedOperator& t, const CVector& x, std::size_t n_max,
                           std::size_t d) {
    const auto n = t.dim(d);
    const CVector x0 = fit(x, n);
    check_guard(t, d, {&x0}, n_max);
    const CMatrix m = t.materialize(d);
    std::vector<CVector> out;
    out.reserve(n_max + 1);
    out.push_back(x0);
    for (std::size_t j = 0; j < n_max; ++j) out.push_back(m * out.back());
    return out;
}

namespace {

std::size_t max_support(const std::vector<CVector>& vs) {
    std::size_t s = 0;
    for (const auto& v : vs) s = std::max(s, support(v));
    return s;
}

std::string vec_label(const std::string& prefix, std::size_t i) {
    return prefix + "[" + std::to_string(i) + "]";
}

CVector apply_times(const CMatrix& m, CVector v, std::size_t times) {
    for (std::size_t j = 0; j < times; ++j) v = m * v;
    return v;
}

} // namespace

std::vector<ResidualSeries> condition_one_residuals(const TruncatedOperator& t,
                                                    const SequenceRule& seq,
                                                    const std::vector<CVector>& y_gens,
                                                    std::size_t K, const ConvergenceRule& rule,
                                                    std::size_t d) {
    if (K == 0) throw InvalidArgument("K must be >= 1");
    if (t.blocks() != 1) throw InvalidArgument("certificates are checked on operators on H");
    const auto exps = seq.first(K);
    const auto req = t.required_dim(max_support(y_gens), exps.back());
    if (d == 0) d = req;
    if (req > d) throw GuardBandError(req, d);
    const CMatrix td = t.materialize(d);
    std::vector<ResidualSeries> out;
    for (std::size_t i = 0; i < y_gens.size(); ++i) {
        ResidualSeries s{vec_label("T^n y", i)};
        CVector v = fit(y_gens[i], d);
        std::size_t at = 0;
        for (auto n : exps) {
            v = apply_times(td, v, n - at);
            at = n;
            s.values.push_back(v.norm());
        }
        judge(s, rule);
        out.push_back(std::move(s));
    }
    return out;
}

CriterionReport check_certificate(const TruncatedOperator& t, const Certificate& cert, std::size_t K,
                                  const ConvergenceRule& rule, std::size_t d) {
    cert.validate();
    if (K == 0) throw InvalidArgument("K must be >= 1");
    if (t.blocks() != 1) throw InvalidArgument("certificates are checked on operators on H");

    CriterionReport rep;
    rep.exponents = cert.seq.first(K);
    rep.tol = rule.tol;
    const auto n_last = rep.exponents.back();

    const bool power_family = cert.s_rule == "right_inverse_power";
    std::optional<TruncatedOperator> ri;
    if (power_family) {
        ri = t.right_inverse();
        if (!ri) {
            throw InvalidArgument("S family undefined: " + t.describe() +
                                  " has no exact right inverse; supply a custom family");
        }
    }
    auto family = [&](std::size_t n) {
        return power_family ? TruncatedOperator::power(*ri, n) : cert.custom_family(n);
    };

    const auto supp = std::max(max_support(cert.y_gens), max_support(cert.z_gens));
    std::size_t req = t.required_dim(supp, n_last);
    for (auto n : rep.exponents) {
        const auto s_n = family(n);
        req = std::max(req, s_n.required_dim(supp, 1) + t.shift_width() * n);
    }
    if (d == 0) d = req;
    if (req > d) throw GuardBandError(req, d);
    rep.d_used = d;

    rep.y_residuals = condition_one_residuals(t, cert.seq, cert.y_gens, K, rule, d);

    const CMatrix td = t.materialize(d);
    const CMatrix sd = power_family ? ri->materialize(d) : CMatrix();
    for (std::size_t i = 0; i < cert.z_gens.size(); ++i) {
        const CVector z = fit(cert.z_gens[i], d);
        ResidualSeries s_series{vec_label("S_n z", i)};
        ResidualSeries inv_series{vec_label("T^n S_n z - z", i)};
        CVector sz = z;
        std::size_t at = 0;
        for (auto n : rep.exponents) {
            if (power_family) {
                sz = apply_times(sd, sz, n - at);
                at = n;
            } else {
                sz = family(n).materialize(d) * z;
            }
            s_series.values.push_back(sz.norm());
            inv_series.values.push_back((apply_times(td, sz, n) - z).norm());
        }
        judge(s_series, rule);
        judge(inv_series, rule);
        rep.s_residuals.push_back(std::move(s_series));
        rep.inverse_residuals.push_back(std::move(inv_series));
    }

    rep.pass = true;
    for (const auto* fam : {&rep.y_residuals, &rep.s_residuals, &rep.inverse_residuals}) {
        for (const auto& s : *fam) rep.pass = rep.pass && s.pass;
    }
    return rep;
}

OperatorSequence OperatorSequence::powers_of(const TruncatedOperator& t, SequenceRule seq) {
    OperatorSequence out;
    out.label = "powers of " + t.describe() + " along " + seq.to_string();
    out.term = [t, seq](std::size_t k) { return TruncatedOperator::power(t, seq.at(k)); };
    return out;
}

CommuteReport check_commuting(const OperatorSequence& seq, std::size_t n_terms, std::size_t d,
                              double tol) {
    if (d == 0) throw InvalidArgument("d must be >= 1");
    std::vector<CMatrix> mats;
    mats.reserve(n_terms);
    for (std::size_t k = 1; k <= n_terms; ++k) mats.push_back(seq.term(k).materialize(d));
    CommuteReport rep;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            const CMatrix c = mats[i] * mats[j] - mats[j] * mats[i];
            const double defect = c.isZero(0.0) ? 0.0 : op_norm(c);
            rep.max_defect = std::max(rep.max_defect, defect);
            ++rep.pairs;
        }
    }
    rep.commute = rep.max_defect <= tol;
    return rep;
}

bool has_dense_range(const TruncatedOperator& t, std::size_t d, double rank_tol) {
    const CMatrix m = t.materialize(d);
    const auto w = t.shift_width();
    if (w >= d) return false;
    const auto blocks = t.blocks();
    const auto keep = static_cast<Eigen::Index>(d - w);
    CMatrix rows(keep * static_cast<Eigen::Index>(blocks), m.cols());
    for (std::size_t j = 0; j < blocks; ++j) {
        rows.middleRows(static_cast<Eigen::Index>(j) * keep, keep) =
            m.middleRows(static_cast<Eigen::Index>(j * d), keep);
    }
    Eigen::BDCSVD<CMatrix> svd(rows);
    const auto& s = svd.singularValues();
    if (s.size() < rows.rows() || s(0) == 0.0) return false;
    return s(s.size() - 1) > rank_tol * s(0);
}

} // namespace hclab
