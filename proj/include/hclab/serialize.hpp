#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hclab/battery.hpp"
#include "hclab/criterion.hpp"
#include "hclab/hs_lift.hpp"
#include "hclab/oracle.hpp"

// JSON forms of the library's inputs and reports. Complex numbers are
// [re, im] pairs; plain numbers are accepted on input as real values.
// Every top-level document carries "schema": 1.

namespace hclab {

inline constexpr int kSchemaVersion = 1;

using nlohmann::json;

json complex_to_json(Complex z);
Complex complex_from_json(const json& j);
json vector_to_json(const CVector& v);
CVector vector_from_json(const json& j);
/// Row-major list of rows.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json to_json(const Ball& b);
Ball ball_from_json(const json& j);

json to_json(const SequenceRule& s);
SequenceRule sequence_from_json(const json& j);

json to_json(const Certificate& c);
/// Only the "right_inverse_power" S rule can be read back; other rule ids
/// need a family attached in code.
Certificate certificate_from_json(const json& j);

json to_json(const ResidualSeries& s);
ResidualSeries residual_series_from_json(const json& j);
json to_json(const CriterionReport& r);
CriterionReport criterion_report_from_json(const json& j);

json to_json(const IntersectResult& r);
json to_json(const OracleResult& r);
OracleResult oracle_result_from_json(const json& j);
json to_json(const Prop212Result& r);

/// Matrices are included when N * d <= 64.
json to_json(const WitnessReport& r);
WitnessReport witness_report_from_json(const json& j);

json to_json(const ConditionOutcome& c);
ConditionOutcome condition_from_json(const json& j);
json to_json(const BatteryReport& r);
BatteryReport battery_report_from_json(const json& j);
json to_json(const Prop212Report& r);
Prop212Report prop212_report_from_json(const json& j);

json to_json(const BatteryConfig& c);
/// Missing keys keep the defaults of `base`.
BatteryConfig battery_config_from_json(const json& j, BatteryConfig base = {});

/// Scanned-distance table as CSV: n,dist,dist_second,feasible.
std::string scan_to_csv(const OracleResult& r);

} // namespace hclab
