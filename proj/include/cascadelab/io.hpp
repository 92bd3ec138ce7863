#pragma once

#include <string>

#include <json.hpp>

#include "cascadelab/analysis.hpp"
#include "cascadelab/cascade.hpp"
#include "cascadelab/clt.hpp"
#include "cascadelab/moments.hpp"
#include "cascadelab/regime.hpp"
#include "cascadelab/weights.hpp"

namespace cascadelab {

// Spec file format:
//   {"b": int, "weights": {"kind": "deterministic", "values": [[re,im], ...]}}
//   {"b": int, "weights": {"kind": "iid", "atoms": [{"p": float, "value": [re,im]}, ...]}}
//   {"b": int, "weights": {"kind": "mixture", "atoms": [{"p": float, "vector": [[re,im], ...]}, ...]}}
// Complex numbers are [re, im] arrays; reals may omit the imaginary part
// ([re] or a bare number).

WeightSpec spec_from_json(const nlohmann::json& j);
WeightSpec load_spec(const std::string& path);
nlohmann::json spec_to_json(const WeightSpec& spec);

/// RegimeReport with the exact field names of the type plus a phi_table of
/// (p, phi(p)) pairs on the grid p = k/4, k = 1..32. Infinite p0 is the
/// string "inf".
nlohmann::json regime_report_json(const RegimeReport& report, const WeightSpec& spec);

nlohmann::json tau_estimate_json(const TauEstimate& est);
nlohmann::json moment_table_json(const MomentTable& table);
nlohmann::json moment_lines_json(const std::vector<MomentLine>& lines);
nlohmann::json comparison_report_json(const ComparisonReport& rep);

/// CSV `t,re,im`, one row per grid point, t as the decimal value of k b^{-n}
/// with 17 significant digits.
std::string sample_path_csv(const SamplePath& path);

/// CSV `g,re,im`: knot time, then the complex path value.
std::string parametric_curve_csv(const ParametricCurve& curve);

/// One-column CSV of ensemble values, header `value`.
std::string ensemble_csv(const EnsembleSample& sample);

void write_file(const std::string& path, const std::string& content);

}  // namespace cascadelab
