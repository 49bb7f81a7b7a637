#include "hclab/serialize.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hclab {

namespace {

// JSON has no infinity; +inf is written as null and read back as +inf.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

template <class T, class F>
json list(const std::vector<T>& xs, F f) {
    json out = json::array();
    for (const auto& x : xs) out.push_back(f(x));
    return out;
}

std::vector<double> doubles(const json& j) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(num_from(v));
    return out;
}

json hs_to_json(const HSMatrix& m, std::size_t cols) {
    const auto c = std::min<Eigen::Index>(m.cols(), static_cast<Eigen::Index>(cols));
    return matrix_to_json(m.mat().leftCols(c));
}

} // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw InvalidArgument("complex number must be a number or [re, im], got " + j.dump());
}

json vector_to_json(const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

CVector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidArgument("vector must be a nonempty array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw InvalidArgument("matrix must be a list of rows");
    const auto cols = j[0].size();
    CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != cols) throw InvalidArgument("matrix rows have different lengths");
        for (std::size_t k = 0; k < cols; ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from_json(j[i][k]);
        }
    }
    return m;
}

json to_json(const Ball& b) { return {{"center", vector_to_json(b.center())}, {"radius", b.radius()}}; }

Ball ball_from_json(const json& j) {
    return Ball(vector_from_json(j.at("center")), j.at("radius").get<double>());
}

json to_json(const SequenceRule& s) {
    switch (s.kind()) {
    case SequenceRule::Kind::Linear: return {{"rule", "linear"}, {"start", s.start()}, {"step", s.step()}};
    case SequenceRule::Kind::Geometric: return {{"rule", "geometric"}, {"base", s.base()}};
    case SequenceRule::Kind::Explicit: return {{"rule", "explicit"}, {"values", s.values()}};
    }
    return {};
}

SequenceRule sequence_from_json(const json& j) {
    if (j.is_string()) return SequenceRule::parse(j.get<std::string>());
    const auto rule = j.at("rule").get<std::string>();
    if (rule == "linear") return SequenceRule::linear(j.value("start", std::size_t{1}), j.value("step", std::size_t{1}));
    if (rule == "geometric") return SequenceRule::geometric(j.at("base").get<std::size_t>());
    if (rule == "explicit") return SequenceRule::explicit_list(j.at("values").get<std::vector<std::size_t>>());
    throw InvalidArgument("unknown sequence rule '" + rule + "'");
}

json to_json(const Certificate& c) {
    return {{"schema", kSchemaVersion},
            {"seq", to_json(c.seq)},
            {"Y", list(c.y_gens, vector_to_json)},
            {"Z", list(c.z_gens, vector_to_json)},
            {"S", c.s_rule},
            {"support_bound", c.support_bound}};
}

Certificate certificate_from_json(const json& j) {
    if (j.value("schema", kSchemaVersion) != kSchemaVersion) throw InvalidArgument("unsupported certificate schema");
    Certificate c;
    if (j.contains("seq")) c.seq = sequence_from_json(j.at("seq"));
    for (const auto& v : j.at("Y")) c.y_gens.push_back(vector_from_json(v));
    for (const auto& v : j.at("Z")) c.z_gens.push_back(vector_from_json(v));
    c.s_rule = j.value("S", std::string("right_inverse_power"));
    c.support_bound = j.value("support_bound", c.support_bound);
    if (c.s_rule != "right_inverse_power") {
        throw InvalidArgument("S rule '" + c.s_rule + "' cannot be loaded from a file");
    }
    c.validate();
    return c;
}

json to_json(const ResidualSeries& s) {
    return {{"label", s.label}, {"values", list(s.values, num)}, {"pass", s.pass}, {"mode", s.mode}};
}

ResidualSeries residual_series_from_json(const json& j) {
    ResidualSeries s;
    s.label = j.at("label").get<std::string>();
    s.values = doubles(j.at("values"));
    s.pass = j.at("pass").get<bool>();
    s.mode = j.at("mode").get<std::string>();
    return s;
}

json to_json(const CriterionReport& r) {
    auto series = [](const std::vector<ResidualSeries>& ss) {
        return list(ss, [](const ResidualSeries& s) { return to_json(s); });
    };
    return {{"schema", kSchemaVersion},
            {"kind", "criterion_report"},
            {"exponents", r.exponents},
            {"y_residuals", series(r.y_residuals)},
            {"s_residuals", series(r.s_residuals)},
            {"inverse_residuals", series(r.inverse_residuals)},
            {"pass", r.pass},
            {"d_used", r.d_used},
            {"tol", r.tol},
            {"scope", r.scope}};
}

CriterionReport criterion_report_from_json(const json& j) {
    CriterionReport r;
    r.exponents = j.at("exponents").get<std::vector<std::size_t>>();
    for (const auto& s : j.at("y_residuals")) r.y_residuals.push_back(residual_series_from_json(s));
    for (const auto& s : j.at("s_residuals")) r.s_residuals.push_back(residual_series_from_json(s));
    for (const auto& s : j.at("inverse_residuals")) r.inverse_residuals.push_back(residual_series_from_json(s));
    r.pass = j.at("pass").get<bool>();
    r.d_used = j.at("d_used").get<std::size_t>();
    r.tol = j.at("tol").get<double>();
    r.scope = j.value("scope", r.scope);
    return r;
}

json to_json(const IntersectResult& r) {
    return {{"feasible", r.feasible}, {"x", vector_to_json(r.x)}, {"dist", r.dist}, {"margin", r.margin}};
}

json to_json(const OracleResult& r) {
    json scanned = json::array();
    for (const auto& row : r.scanned) {
        scanned.push_back({{"n", row.n}, {"dist", row.dist}, {"dist_second", row.dist_second},
                           {"feasible", row.feasible}});
    }
    json out = {{"schema", kSchemaVersion},
                {"kind", "oracle_result"},
                {"condition", r.condition},
                {"feasible", r.feasible},
                {"n", r.n},
                {"dist", r.dist},
                {"dist_second", r.dist_second},
                {"d_used", r.d_used},
                {"scanned", std::move(scanned)}};
    if (r.x_witness.size() > 0) out["x_witness"] = vector_to_json(r.x_witness);
    if (r.y_witness.size() > 0) out["y_witness"] = vector_to_json(r.y_witness);
    return out;
}

OracleResult oracle_result_from_json(const json& j) {
    OracleResult r;
    r.condition = j.at("condition").get<std::string>();
    r.feasible = j.at("feasible").get<bool>();
    r.n = j.at("n").get<std::size_t>();
    r.dist = j.at("dist").get<double>();
    r.dist_second = j.at("dist_second").get<double>();
    r.d_used = j.at("d_used").get<std::size_t>();
    for (const auto& row : j.at("scanned")) {
        r.scanned.push_back({row.at("n").get<std::size_t>(), row.at("dist").get<double>(),
                             row.at("dist_second").get<double>(), row.at("feasible").get<bool>()});
    }
    if (j.contains("x_witness")) r.x_witness = vector_from_json(j.at("x_witness"));
    if (j.contains("y_witness")) r.y_witness = vector_from_json(j.at("y_witness"));
    return r;
}

json to_json(const Prop212Result& r) {
    return {{"schema", kSchemaVersion},
            {"kind", "prop212_result"},
            {"N", r.n_found ? json(*r.n_found) : json(nullptr)},
            {"exponents", r.exponents},
            {"feasible", r.feasible},
            {"dists", r.dists},
            {"d_used", r.d_used}};
}

json to_json(const WitnessReport& r) {
    json out = {{"schema", kSchemaVersion},
                {"kind", "witness_report"},
                {"success", r.success},
                {"mode", r.mode},
                {"norm_source", r.norm_source},
                {"failure", r.failure},
                {"violated_index", r.violated_index},
                {"N", r.N},
                {"epsilon", r.epsilon},
                {"radius", r.radius},
                {"op_norm_t", r.op_norm_t},
                {"delta", num(r.delta)},
                {"gap", r.gap},
                {"n_exponents", r.n_exponents},
                {"m_exponents", r.m_exponents},
                {"n", r.n},
                {"d_used", r.d_used},
                {"y_bounds", r.y_bounds},
                {"x_bounds", r.x_bounds},
                {"s2_columns", r.s2_columns},
                {"s1_tail", r.s1_tail},
                {"norm_x", r.norm_x},
                {"norm_tn_y", r.norm_tn_y},
                {"residual_a", r.residual_a},
                {"chain_a", {r.chain_a_s1, r.chain_a_s2}},
                {"residual_b", r.residual_b},
                {"chain_b", {r.chain_b_s2, r.chain_b_s1}},
                {"chains_verified", r.chains_verified},
                {"note", r.note}};
    if (r.success && r.N * r.d_used <= 64) {
        out["x"] = vector_to_json(r.x);
        out["y"] = vector_to_json(r.y);
        out["S1"] = hs_to_json(r.s1, r.N);
        out["S2"] = hs_to_json(r.s2, r.N);
        out["S"] = hs_to_json(r.s, r.N);
    }
    return out;
}

WitnessReport witness_report_from_json(const json& j) {
    WitnessReport r;
    r.success = j.at("success").get<bool>();
    r.mode = j.at("mode").get<std::string>();
    r.norm_source = j.at("norm_source").get<std::string>();
    r.failure = j.at("failure").get<std::string>();
    r.violated_index = j.at("violated_index").get<long>();
    r.N = j.at("N").get<std::size_t>();
    r.epsilon = j.at("epsilon").get<double>();
    r.radius = j.at("radius").get<double>();
    r.op_norm_t = j.at("op_norm_t").get<double>();
    r.delta = num_from(j.at("delta"));
    r.gap = j.at("gap").get<std::size_t>();
    r.n_exponents = j.at("n_exponents").get<std::vector<std::size_t>>();
    r.m_exponents = j.at("m_exponents").get<std::vector<std::size_t>>();
    r.n = j.at("n").get<std::size_t>();
    r.d_used = j.at("d_used").get<std::size_t>();
    r.y_bounds = doubles(j.at("y_bounds"));
    r.x_bounds = doubles(j.at("x_bounds"));
    r.s2_columns = doubles(j.at("s2_columns"));
    r.s1_tail = doubles(j.at("s1_tail"));
    r.norm_x = j.at("norm_x").get<double>();
    r.norm_tn_y = j.at("norm_tn_y").get<double>();
    r.residual_a = j.at("residual_a").get<double>();
    r.chain_a_s1 = j.at("chain_a")[0].get<double>();
    r.chain_a_s2 = j.at("chain_a")[1].get<double>();
    r.residual_b = j.at("residual_b").get<double>();
    r.chain_b_s2 = j.at("chain_b")[0].get<double>();
    r.chain_b_s1 = j.at("chain_b")[1].get<double>();
    r.chains_verified = j.at("chains_verified").get<bool>();
    r.note = j.value("note", std::string{});
    if (j.contains("x")) r.x = vector_from_json(j.at("x"));
    if (j.contains("y")) r.y = vector_from_json(j.at("y"));
    if (j.contains("S")) {
        auto widen = [&](const json& m) {
            CMatrix full = CMatrix::Zero(static_cast<Eigen::Index>(r.d_used), static_cast<Eigen::Index>(r.d_used));
            const CMatrix part = matrix_from_json(m);
            full.leftCols(part.cols()) = part;
            return HSMatrix(full);
        };
        r.s1 = widen(j.at("S1"));
        r.s2 = widen(j.at("S2"));
        r.s = widen(j.at("S"));
    }
    return r;
}

json to_json(const ConditionOutcome& c) {
    json out = {{"name", c.name},
                {"verdict", to_string(c.verdict)},
                {"samples", c.samples},
                {"hits", c.hits},
                {"hit_exponents", c.hit_exponents},
                {"d_used", c.d_used},
                {"note", c.note}};
    if (c.certificate) out["certificate"] = to_json(*c.certificate);
    return out;
}

ConditionOutcome condition_from_json(const json& j) {
    ConditionOutcome c;
    c.name = j.at("name").get<std::string>();
    c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    c.samples = j.at("samples").get<std::size_t>();
    c.hits = j.at("hits").get<std::size_t>();
    c.hit_exponents = j.at("hit_exponents").get<std::vector<long>>();
    c.d_used = j.at("d_used").get<std::size_t>();
    c.note = j.at("note").get<std::string>();
    if (j.contains("certificate")) c.certificate = criterion_report_from_json(j.at("certificate"));
    return c;
}

json to_json(const BatteryReport& r) {
    return {{"schema", kSchemaVersion},
            {"kind", "battery_report"},
            {"operator", r.operator_id},
            {"conditions", list(r.conditions, [](const ConditionOutcome& c) { return to_json(c); })},
            {"consistent", r.consistent}};
}

BatteryReport battery_report_from_json(const json& j) {
    BatteryReport r;
    r.operator_id = j.at("operator").get<std::string>();
    for (const auto& c : j.at("conditions")) r.conditions.push_back(condition_from_json(c));
    r.consistent = j.at("consistent").get<bool>();
    return r;
}

json to_json(const Prop212Report& r) {
    return {{"schema", kSchemaVersion},
            {"kind", "prop212_report"},
            {"sequence", r.sequence},
            {"certificate", to_json(r.certificate)},
            {"cond_ii", to_json(r.cond_ii)},
            {"cond_iii", to_json(r.cond_iii)},
            {"agree", r.agree}};
}

Prop212Report prop212_report_from_json(const json& j) {
    Prop212Report r;
    r.sequence = j.at("sequence").get<std::string>();
    r.certificate = condition_from_json(j.at("certificate"));
    r.cond_ii = condition_from_json(j.at("cond_ii"));
    r.cond_iii = condition_from_json(j.at("cond_iii"));
    r.agree = j.at("agree").get<bool>();
    return r;
}

json to_json(const BatteryConfig& c) {
    return {{"d", c.d},
            {"n_max", c.n_max},
            {"m_copies", c.m_copies},
            {"hs_dim", c.hs_dim},
            {"ball_samples", c.ball_samples},
            {"radius_min", c.radius_min},
            {"radius_max", c.radius_max},
            {"patch_span", c.patch_span},
            {"patch_dim", c.patch_dim},
            {"seed", c.rng_seed},
            {"certificate_k", c.certificate_k},
            {"subsequences", c.subsequences},
            {"keep_probability", c.keep_probability},
            {"seq", c.seq.to_string()},
            {"tol", c.rule.tol}};
}

BatteryConfig battery_config_from_json(const json& j, BatteryConfig c) {
    c.d = j.value("d", c.d);
    c.n_max = j.value("n_max", c.n_max);
    c.m_copies = j.value("m_copies", c.m_copies);
    c.hs_dim = j.value("hs_dim", c.hs_dim);
    c.ball_samples = j.value("ball_samples", c.ball_samples);
    c.radius_min = j.value("radius_min", c.radius_min);
    c.radius_max = j.value("radius_max", c.radius_max);
    c.patch_span = j.value("patch_span", c.patch_span);
    c.patch_dim = j.value("patch_dim", c.patch_dim);
    c.rng_seed = j.value("seed", c.rng_seed);
    c.certificate_k = j.value("certificate_k", c.certificate_k);
    c.subsequences = j.value("subsequences", c.subsequences);
    c.keep_probability = j.value("keep_probability", c.keep_probability);
    if (j.contains("seq")) c.seq = sequence_from_json(j.at("seq"));
    c.rule.tol = j.value("tol", c.rule.tol);
    c.validate();
    return c;
}

std::string scan_to_csv(const OracleResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "n,dist,dist_second,feasible\n";
    for (const auto& row : r.scanned) {
        os << row.n << ',' << row.dist << ',' << row.dist_second << ',' << (row.feasible ? 1 : 0) << '\n';
    }
    return os.str();
}

} // namespace hclab
