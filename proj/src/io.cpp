#include "cascadelab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cascadelab {

namespace {

using nlohmann::json;

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && (j.size() == 1 || j.size() == 2)) {
    const double re = j[0].get<double>();
    const double im = j.size() == 2 ? j[1].get<double>() : 0.0;
    return Complex(re, im);
  }
  throw ValidationError("BadProbabilities", "complex values must be numbers or [re, im]");
}

json complex_to_json(Complex v) { return json::array({v.real(), v.imag()}); }

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

WeightSpec spec_from_json(const json& j) {
  if (!j.contains("b") || !j.contains("weights"))
    throw ValidationError("BadProbabilities", "spec needs fields 'b' and 'weights'");
  const int b = j.at("b").get<int>();
  const json& w = j.at("weights");
  const std::string kind = w.at("kind").get<std::string>();
  if (kind == "deterministic") {
    const json& vals = w.at("values");
    Eigen::VectorXcd v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = complex_from_json(vals[i]);
    if (v.size() != b)
      throw ValidationError("BadProbabilities", "deterministic values length differs from b");
    return WeightSpec::deterministic(v);
  }
  if (kind == "iid") {
    std::vector<IidAtom> atoms;
    for (const json& a : w.at("atoms"))
      atoms.push_back({a.at("p").get<double>(), complex_from_json(a.at("value"))});
    return WeightSpec::iid(b, std::move(atoms));
  }
  if (kind == "mixture") {
    std::vector<VectorAtom> atoms;
    for (const json& a : w.at("atoms")) {
      const json& vec = a.at("vector");
      Eigen::VectorXcd v(vec.size());
      for (std::size_t i = 0; i < vec.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = complex_from_json(vec[i]);
      atoms.push_back({a.at("p").get<double>(), std::move(v)});
    }
    return WeightSpec::mixture(b, std::move(atoms));
  }
  throw ValidationError("BadProbabilities", "weights.kind must be deterministic|iid|mixture");
}

WeightSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("BadProbabilities", "cannot open spec file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("BadProbabilities", std::string("spec file is not JSON: ") + e.what());
  }
  return spec_from_json(j);
}

json spec_to_json(const WeightSpec& spec) {
  json w;
  switch (spec.kind()) {
    case WeightKind::Deterministic: {
      w["kind"] = "deterministic";
      json vals = json::array();
      const auto& v = spec.vector_atoms()[0].values;
      for (Eigen::Index i = 0; i < v.size(); ++i) vals.push_back(complex_to_json(v[i]));
      w["values"] = vals;
      break;
    }
    case WeightKind::IidComponents: {
      w["kind"] = "iid";
      json atoms = json::array();
      for (const auto& a : spec.iid_atoms())
        atoms.push_back({{"p", a.prob}, {"value", complex_to_json(a.value)}});
      w["atoms"] = atoms;
      break;
    }
    case WeightKind::MixtureOfVectors: {
      w["kind"] = "mixture";
      json atoms = json::array();
      for (const auto& a : spec.vector_atoms()) {
        json vec = json::array();
        for (Eigen::Index i = 0; i < a.values.size(); ++i)
          vec.push_back(complex_to_json(a.values[i]));
        atoms.push_back({{"p", a.prob}, {"vector", vec}});
      }
      w["atoms"] = atoms;
      break;
    }
  }
  return json{{"b", spec.branching()}, {"weights", w}};
}

json regime_report_json(const RegimeReport& report, const WeightSpec& spec) {
  json j;
  j["condition_c"] = to_string(report.condition_c);
  j["regime"] = to_string(report.regime);
  j["beta"] = report.beta ? json(*report.beta) : json(nullptr);
  j["p0"] = std::isfinite(report.p0) ? json(report.p0) : json("inf");
  j["phi_at_2"] = report.phi_at_2;
  j["sigma"] = report.sigma ? json(*report.sigma) : json(nullptr);
  j["critical_gamma"] =
      report.critical_gamma ? json(*report.critical_gamma) : json(nullptr);
  j["extinction_prob"] = report.extinction_prob;
  j["notes"] = report.notes;
  json table = json::array();
  for (int k = 1; k <= 32; ++k) {
    const double p = 0.25 * k;
    table.push_back(json::array({p, phi(spec, p)}));
  }
  j["phi_table"] = table;
  return j;
}

json tau_estimate_json(const TauEstimate& est) {
  json j;
  j["q"] = est.q_values;
  j["tau_hat"] = est.tau_hat;
  j["level_lo"] = est.level_lo;
  j["level_hi"] = est.level_hi;
  json sums = json::array();
  for (Eigen::Index i = 0; i < est.partition_sums.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < est.partition_sums.cols(); ++k)
      row.push_back(est.partition_sums(i, k));
    sums.push_back(row);
  }
  j["partition_sums"] = sums;
  return j;
}

json moment_table_json(const MomentTable& table) {
  json entries = json::array();
  for (const auto& e : table.entries) {
    json row;
    row["q"] = e.q;
    row["n"] = e.depth ? json(*e.depth) : json("limit");
    row["value"] = e.value;
    row["method"] = e.method;
    entries.push_back(row);
  }
  return json{{"entries", entries}};
}

json moment_lines_json(const std::vector<MomentLine>& lines) {
  json out = json::array();
  for (const auto& l : lines) {
    json row;
    row["order"] = l.order;
    row["empirical"] = l.empirical;
    row["std_error"] = l.std_error;
    row["target"] = l.target ? json(*l.target) : json(nullptr);
    out.push_back(row);
  }
  return out;
}

json comparison_report_json(const ComparisonReport& rep) {
  json j;
  j["ks_statistic"] = rep.ks_statistic;
  j["moments_a"] = moment_lines_json(rep.moments_a);
  j["moments_b"] = moment_lines_json(rep.moments_b);
  j["reference_bias"] = rep.reference_bias ? json(*rep.reference_bias) : json(nullptr);
  j["notes"] = rep.notes;
  return j;
}

std::string sample_path_csv(const SamplePath& path) {
  std::string out = "t,re,im\n";
  const double grid = std::pow(static_cast<double>(path.base), -path.level);
  for (Eigen::Index k = 0; k < path.values.size(); ++k) {
    out += fmt17(static_cast<double>(k) * grid);
    out += ',';
    out += fmt17(path.values[k].real());
    out += ',';
    out += fmt17(path.values[k].imag());
    out += '\n';
  }
  return out;
}

std::string parametric_curve_csv(const ParametricCurve& curve) {
  std::string out = "g,re,im\n";
  for (Eigen::Index k = 0; k < curve.times.size(); ++k) {
    out += fmt17(curve.times[k]);
    out += ',';
    out += fmt17(curve.values[k].real());
    out += ',';
    out += fmt17(curve.values[k].imag());
    out += '\n';
  }
  return out;
}

std::string ensemble_csv(const EnsembleSample& sample) {
  std::string out = "value\n";
  for (Eigen::Index i = 0; i < sample.values.size(); ++i) {
    out += fmt17(sample.values[i]);
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("BadProbabilities", "cannot write file: " + path);
  out << content;
}

}  // namespace cascadelab
