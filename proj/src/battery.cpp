#include "hclab/battery.hpp"

#include <algorithm>
#include <functional>
#include <utility>

#include "hclab/hs_lift.hpp"

namespace hclab {

void BatteryConfig::validate() const {
    if (d == 0 || n_max == 0 || m_copies == 0 || hs_dim == 0 || ball_samples == 0 ||
        patch_span == 0 || patch_dim == 0 || certificate_k == 0 || subsequences == 0) {
        throw InvalidArgument("battery config: all counts must be positive");
    }
    if (!(radius_min > 0.0) || !(radius_max >= radius_min)) {
        throw InvalidArgument("battery config: need 0 < radius_min <= radius_max");
    }
    if (!(keep_probability > 0.0 && keep_probability <= 1.0)) {
        throw InvalidArgument("battery config: keep_probability must lie in (0, 1]");
    }
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotEvaluated: return "not_evaluated";
    }
    return "?";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    if (s == "not_evaluated") return Verdict::NotEvaluated;
    throw InvalidArgument("unknown verdict '" + s + "'");
}

double orbit_coverage(const TruncatedOperator& t, const CVector& x, const std::vector<Ball>& targets,
                      std::size_t n_max, std::size_t d) {
    if (targets.empty()) return 0.0;
    if (d == 0) d = t.required_dim(support(x), n_max);
    const auto orb = orbit(t, x, n_max, d);
    std::size_t hit = 0;
    for (const auto& target : targets) {
        for (const auto& p : orb) {
            if (target.contains(p)) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(targets.size());
}

namespace {

// Unit vector on a few random coordinates among the first `span` of each of
// the first `active_blocks` blocks; the layout is block-contiguous.
CVector patch_vector(Rng& rng, const BatteryConfig& cfg, std::size_t d, std::size_t blocks,
                     std::size_t active_blocks) {
    const std::size_t span = std::min(cfg.patch_span, d);
    const std::size_t slots = span * active_blocks;
    const std::size_t k = std::min(slots, 1 + rng.index(cfg.patch_dim));
    std::vector<std::size_t> chosen;
    while (chosen.size() < k) {
        const auto s = rng.index(slots);
        if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) chosen.push_back(s);
    }
    CVector c = CVector::Zero(static_cast<Eigen::Index>(d * blocks));
    for (auto s : chosen) {
        const auto block = s / span, coord = s % span;
        const double re = rng.normal(), im = rng.normal();
        c(static_cast<Eigen::Index>(block * d + coord)) = Complex(re, im);
    }
    const double n = c.norm();
    if (n > 0.0) c /= n;
    return c;
}

std::size_t condition_dim(const TruncatedOperator& t, const BatteryConfig& cfg) {
    return std::max(cfg.d, t.required_dim(std::min(cfg.patch_span, cfg.d), cfg.n_max));
}

using PairScan = std::function<OracleResult(const Ball&, const Ball&)>;

// Evaluates a ball-pair condition over sampled pairs; stops at the first miss.
void scan_pairs(ConditionOutcome& out, const std::vector<std::pair<Ball, Ball>>& pairs, const PairScan& scan) {
    out.verdict = Verdict::Pass;
    for (const auto& [u, v] : pairs) {
        const auto r = scan(u, v);
        ++out.samples;
        out.hit_exponents.push_back(r.feasible ? static_cast<long>(r.n) : -1L);
        if (!r.feasible) {
            out.verdict = Verdict::Fail;
            return;
        }
        ++out.hits;
    }
}

std::vector<std::pair<Ball, Ball>> sample_pairs(Rng& rng, const BatteryConfig& cfg, std::size_t d,
                                                std::size_t blocks = 1) {
    std::vector<std::pair<Ball, Ball>> pairs;
    for (std::size_t i = 0; i < cfg.ball_samples; ++i) {
        Ball u = sample_ball(rng, cfg, d, blocks);
        Ball v = sample_ball(rng, cfg, d, blocks);
        pairs.emplace_back(std::move(u), std::move(v));
    }
    return pairs;
}

std::vector<std::size_t> random_subsequence(Rng& rng, const std::vector<std::size_t>& terms, double keep) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
        if (rng.uniform() < keep) out.push_back(terms[i]);
    }
    // A subsequence of an infinite sequence has arbitrarily large terms; the
    // window keeps its largest admissible one.
    out.push_back(terms.back());
    return out;
}

ConditionOutcome certificate_condition(const TruncatedOperator& t, const SequenceRule& seq, std::size_t k,
                                       const ConvergenceRule& rule) {
    ConditionOutcome out;
    out.name = "(i) criterion certificate";
    if (!t.right_inverse()) {
        out.verdict = Verdict::NotEvaluated;
        out.note = "no exact right inverse; certificate not constructible";
        return out;
    }
    Certificate cert = default_certificate(3);
    cert.seq = seq;
    try {
        auto rep = check_certificate(t, cert, k, rule);
        out.verdict = rep.pass ? Verdict::Pass : Verdict::Fail;
        out.samples = 1;
        out.hits = rep.pass ? 1 : 0;
        out.d_used = rep.d_used;
        out.certificate = std::move(rep);
    } catch (const Error& e) {
        out.verdict = Verdict::NotEvaluated;
        out.note = e.what();
    }
    return out;
}

} // namespace

Ball sample_ball(Rng& rng, const BatteryConfig& cfg, std::size_t d, std::size_t blocks) {
    CVector c = patch_vector(rng, cfg, d, blocks, blocks);
    return Ball(std::move(c), rng.log_uniform(cfg.radius_min, cfg.radius_max));
}

Ball sample_hs_ball(Rng& rng, const BatteryConfig& cfg, std::size_t d, std::size_t cols) {
    CVector c = patch_vector(rng, cfg, d, cols, std::min(cols, cfg.patch_span));
    return Ball(std::move(c), rng.log_uniform(cfg.radius_min, cfg.radius_max));
}

ConditionOutcome hereditary_sample(const TruncatedOperator& t, const BatteryConfig& cfg, Rng rng) {
    cfg.validate();
    ConditionOutcome out;
    out.name = "(ii) hereditary along sampled subsequences";
    const auto terms = cfg.seq.terms_upto(cfg.n_max);
    if (terms.empty()) {
        out.note = "no sequence terms within n_max";
        return out;
    }
    const auto d = condition_dim(t, cfg);
    out.d_used = d;
    Rng pair_rng = rng.fork("pairs");
    const auto pairs = sample_pairs(pair_rng, cfg, d);
    Rng sub_rng = rng.fork("subsequences");
    out.verdict = Verdict::Pass;
    for (std::size_t s = 0; s < cfg.subsequences && out.verdict == Verdict::Pass; ++s) {
        const auto sub = random_subsequence(sub_rng, terms, cfg.keep_probability);
        ConditionOutcome part;
        scan_pairs(part, pairs, [&](const Ball& u, const Ball& v) { return first_hit_along(t, u, v, sub, d); });
        out.samples += part.samples;
        out.hits += part.hits;
        out.hit_exponents.insert(out.hit_exponents.end(), part.hit_exponents.begin(), part.hit_exponents.end());
        out.verdict = part.verdict;
    }
    return out;
}

BatteryReport run_battery(const TruncatedOperator& t, const BatteryConfig& cfg, const std::string& operator_id) {
    cfg.validate();
    BatteryReport rep;
    rep.operator_id = operator_id.empty() ? t.describe() : operator_id;
    const auto d = condition_dim(t, cfg);

    rep.conditions.push_back(certificate_condition(t, cfg.seq, cfg.certificate_k, cfg.rule));

    rep.conditions.push_back(hereditary_sample(t, cfg, Rng(cfg.rng_seed, "hereditary")));

    {
        ConditionOutcome out;
        out.name = "(iii) finite direct sum of " + std::to_string(cfg.m_copies) + " copies";
        out.d_used = d;
        const auto sum = TruncatedOperator::direct_sum(t, cfg.m_copies);
        Rng rng(cfg.rng_seed, "direct-sum");
        const auto pairs = sample_pairs(rng, cfg, d, cfg.m_copies);
        scan_pairs(out, pairs, [&](const Ball& u, const Ball& v) { return first_hit(sum, u, v, cfg.n_max, d); });
        rep.conditions.push_back(std::move(out));
    }
    {
        ConditionOutcome out;
        out.name = "(iv) left multiplication on Hilbert-Schmidt matrices with " +
                   std::to_string(cfg.hs_dim) + " columns";
        out.d_used = d;
        const auto lt = left_multiplication_operator(t, cfg.hs_dim);
        Rng rng(cfg.rng_seed, "hilbert-schmidt");
        std::vector<std::pair<Ball, Ball>> pairs;
        for (std::size_t i = 0; i < cfg.ball_samples; ++i) {
            Ball u = sample_hs_ball(rng, cfg, d, cfg.hs_dim);
            Ball v = sample_hs_ball(rng, cfg, d, cfg.hs_dim);
            pairs.emplace_back(std::move(u), std::move(v));
        }
        scan_pairs(out, pairs, [&](const Ball& u, const Ball& v) { return first_hit(lt, u, v, cfg.n_max, d); });
        rep.conditions.push_back(std::move(out));
    }
    {
        ConditionOutcome out;
        out.name = "(v) U, V, W ball condition";
        out.d_used = d;
        Rng rng(cfg.rng_seed, "uvw");
        std::vector<std::pair<Ball, Ball>> pairs;
        std::vector<Ball> ws;
        for (std::size_t i = 0; i < cfg.ball_samples; ++i) {
            Ball u = sample_ball(rng, cfg, d);
            Ball v = sample_ball(rng, cfg, d);
            pairs.emplace_back(std::move(u), std::move(v));
            ws.emplace_back(CVector::Zero(static_cast<Eigen::Index>(d)),
                            rng.log_uniform(cfg.radius_min, cfg.radius_max));
        }
        std::size_t i = 0;
        scan_pairs(out, pairs, [&](const Ball& u, const Ball& v) {
            return criterion_condition(t, u, v, ws[i++], cfg.n_max, d);
        });
        rep.conditions.push_back(std::move(out));
    }

    std::optional<Verdict> seen;
    rep.consistent = true;
    for (const auto& c : rep.conditions) {
        if (c.verdict == Verdict::NotEvaluated) continue;
        if (seen && *seen != c.verdict) rep.consistent = false;
        seen = c.verdict;
    }
    return rep;
}

Prop212Report prop212_battery(const TruncatedOperator& t, const SequenceRule& seq, const BatteryConfig& cfg) {
    cfg.validate();
    Prop212Report rep;
    rep.sequence = seq.to_string();
    const auto terms = seq.terms_upto(cfg.n_max);
    if (terms.empty()) throw InvalidArgument("no sequence terms within n_max");
    const auto k_window = terms.size();
    const auto d = condition_dim(t, cfg);

    rep.certificate = certificate_condition(t, seq, k_window, cfg.rule);

    Rng rng(cfg.rng_seed, "prop212");
    const auto pairs = sample_pairs(rng, cfg, d);

    rep.cond_ii.name = "(ii) {T^n_k} hypercyclic and T^n_k y -> 0";
    rep.cond_ii.d_used = d;
    scan_pairs(rep.cond_ii, pairs, [&](const Ball& u, const Ball& v) { return first_hit_along(t, u, v, terms, d); });
    if (rep.cond_ii.verdict == Verdict::Pass) {
        const auto ys = default_certificate(3).y_gens;
        const auto residuals = condition_one_residuals(t, seq, ys, k_window, cfg.rule);
        for (const auto& s : residuals) {
            if (!s.pass) {
                rep.cond_ii.verdict = Verdict::Fail;
                rep.cond_ii.note = "residual " + s.label + " does not tend to 0";
            }
        }
    }

    rep.cond_iii.name = "(iii) eventually T^n_k U meets V";
    rep.cond_iii.d_used = d;
    scan_pairs(rep.cond_iii, pairs, [&](const Ball& u, const Ball& v) {
        const auto r = prop212_condition(t, seq, u, v, k_window, d);
        OracleResult o;
        o.feasible = r.n_found.has_value();
        o.n = r.n_found.value_or(0);
        return o;
    });

    std::optional<Verdict> seen;
    rep.agree = true;
    for (const auto* c : {&rep.certificate, &rep.cond_ii, &rep.cond_iii}) {
        if (c->verdict == Verdict::NotEvaluated) continue;
        if (seen && *seen != c->verdict) rep.agree = false;
        seen = c->verdict;
    }
    return rep;
}

} // namespace hclab
