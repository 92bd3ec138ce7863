#include "cascadelab/clt.hpp"

#include <algorithm>
#include <cmath>

#include "cascadelab/cascade.hpp"
#include "cascadelab/moments.hpp"
#include "cascadelab/parallel.hpp"
#include "cascadelab/regime.hpp"
#include "cascadelab/rng.hpp"

namespace cascadelab {

namespace {

constexpr int kSnapshotLevel = 8;

// Weight law flattened for the per-node sampling loop.
struct CompiledLaw {
  int b = 2;
  WeightKind kind = WeightKind::Deterministic;
  std::vector<double> cum;            // cumulative atom probabilities
  std::vector<double> vals_re;        // iid: k entries; det/mixture: k*b entries
  bool real = true;
  std::vector<Complex> vals_cx;
};

CompiledLaw compile_law(const WeightSpec& spec) {
  CompiledLaw law;
  law.b = spec.branching();
  law.kind = spec.kind();
  law.real = spec.real_valued();
  double cum = 0.0;
  if (spec.kind() == WeightKind::IidComponents) {
    for (const auto& a : spec.iid_atoms()) {
      cum += a.prob;
      law.cum.push_back(cum);
      law.vals_re.push_back(a.value.real());
      law.vals_cx.push_back(a.value);
    }
  } else {
    for (const auto& a : spec.vector_atoms()) {
      cum += a.prob;
      law.cum.push_back(cum);
      for (Eigen::Index i = 0; i < a.values.size(); ++i) {
        law.vals_re.push_back(a.values[i].real());
        law.vals_cx.push_back(a.values[i]);
      }
    }
  }
  law.cum.back() = 1.0 + 1e-9;  // guard the final bucket against roundoff
  return law;
}

struct Workspace {
  std::vector<double> cur, nxt;
};

// One cascade tree: returns the level sums F_m(1) for every m in
// `record_levels` (ascending), and optionally the level-8 partial sums of the
// deepest requested level. Real-valued laws only (the ensembles are real).
void run_tree_real(const CompiledLaw& law, std::uint64_t seed,
                   const std::vector<int>& record_levels, double* out_sums,
                   double* out_cells, Workspace& ws) {
  const int b = law.b;
  const int depth = record_levels.back();
  const std::uint64_t run = rng::run_state(seed);

  ws.cur.assign(1, 1.0);
  std::size_t rec = 0;
  for (int m = 0; m <= depth; ++m) {
    if (rec < record_levels.size() && record_levels[rec] == m) {
      double s = 0.0;
      for (double v : ws.cur) s += v;
      out_sums[rec++] = s;
    }
    if (m == depth) break;
    const std::int64_t width = static_cast<std::int64_t>(ws.cur.size());
    ws.nxt.resize(width * b);
    const std::uint64_t lvl_state = rng::level_state(run, static_cast<std::uint64_t>(m));
    switch (law.kind) {
      case WeightKind::Deterministic: {
        for (std::int64_t j = 0; j < width; ++j) {
          const double q = ws.cur[j];
          for (int i = 0; i < b; ++i) ws.nxt[j * b + i] = q * law.vals_re[i];
        }
        break;
      }
      case WeightKind::IidComponents: {
        const std::size_t k = law.cum.size();
        for (std::int64_t j = 0; j < width; ++j) {
          const std::uint64_t node =
              rng::node_state_from_level(lvl_state, static_cast<std::uint64_t>(j));
          const double q = ws.cur[j];
          for (int i = 0; i < b; ++i) {
            const double u = rng::channel_uniform(node, static_cast<std::uint64_t>(i));
            std::size_t a = 0;
            while (a + 1 < k && u >= law.cum[a]) ++a;
            ws.nxt[j * b + i] = q * law.vals_re[a];
          }
        }
        break;
      }
      case WeightKind::MixtureOfVectors: {
        const std::size_t k = law.cum.size();
        for (std::int64_t j = 0; j < width; ++j) {
          const std::uint64_t node =
              rng::node_state_from_level(lvl_state, static_cast<std::uint64_t>(j));
          const double u = rng::channel_uniform(node, 0);
          std::size_t a = 0;
          while (a + 1 < k && u >= law.cum[a]) ++a;
          const double q = ws.cur[j];
          const double* vec = law.vals_re.data() + a * b;
          for (int i = 0; i < b; ++i) ws.nxt[j * b + i] = q * vec[i];
        }
        break;
      }
    }
    ws.cur.swap(ws.nxt);
  }

  if (out_cells != nullptr) {
    const std::int64_t cells = ipow(b, kSnapshotLevel);
    const std::int64_t span = static_cast<std::int64_t>(ws.cur.size()) / cells;
    double acc = 0.0;
    for (std::int64_t c = 0; c < cells; ++c) {
      for (std::int64_t k = 0; k < span; ++k) acc += ws.cur[c * span + k];
      out_cells[c] = acc;
    }
  }
}

void require_real_law(const WeightSpec& spec) {
  if (!spec.real_valued())
    throw ValidationError("ComplexSpec", "ensemble statistics need a real-valued law");
}

}  // namespace

const char* to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::Zn: return "Zn";
    case EnsembleKind::Rn: return "Rn";
    case EnsembleKind::Reference: return "Reference";
  }
  return "?";
}

EnsembleSample normalized_ensemble(std::shared_ptr<const WeightSpec> spec, int n,
                                   int count, std::uint64_t seed, bool keep_paths,
                                   bool force) {
  require_real_law(*spec);
  if (count < 2) throw ValidationError("BadProbabilities", "ensemble count must be >= 2");
  if (!force && classify(*spec).regime != Regime::TightCLT)
    throw RegimeError("WrongRegime", "normalized_ensemble needs the TightCLT regime");

  const double sigma_n = clt_sigma_n(*spec, n);
  const CompiledLaw law = compile_law(*spec);
  const bool snap = keep_paths && n >= kSnapshotLevel;
  const std::int64_t cells = snap ? ipow(spec->branching(), kSnapshotLevel) : 0;

  EnsembleSample out;
  out.spec = spec;
  out.kind = EnsembleKind::Zn;
  out.depth = n;
  out.seed = seed;
  out.values.resize(count);
  if (snap) out.paths.resize(count, cells);

  std::vector<int> record{n};
  par::for_index(count, [&](std::int64_t r) {
    thread_local Workspace ws;
    thread_local std::vector<double> cellbuf;
    if (snap) cellbuf.resize(cells);
    double sum = 0.0;
    run_tree_real(law, rng::replica_seed(seed, rng::kTagNormalized, r), record, &sum,
                  snap ? cellbuf.data() : nullptr, ws);
    out.values[r] = sum / sigma_n;
    if (snap)
      out.paths.row(r) =
          Eigen::Map<const Eigen::RowVectorXd>(cellbuf.data(), cells) / sigma_n;
  });
  return out;
}

EnsembleSample reference_sample(std::shared_ptr<const WeightSpec> spec, int n, int count,
                                std::uint64_t seed, bool keep_paths, bool force) {
  require_real_law(*spec);
  if (count < 2) throw ValidationError("BadProbabilities", "ensemble count must be >= 2");
  const auto companion =
      std::make_shared<const WeightSpec>(power_transform(*spec, 2.0));
  if (!force && classify(*companion).regime != Regime::ConvergentLp)
    throw RegimeError("WrongRegime",
                      "reference_sample needs a convergent companion cascade W^(2)");

  const CompiledLaw law = compile_law(*companion);
  const bool snap = keep_paths && n >= kSnapshotLevel;
  const std::int64_t cells = snap ? ipow(spec->branching(), kSnapshotLevel) : 0;

  EnsembleSample out;
  out.spec = spec;
  out.kind = EnsembleKind::Reference;
  out.depth = n;
  out.seed = seed;
  out.values.resize(count);
  if (snap) out.paths.resize(count, cells);

  std::vector<int> record{n};
  par::for_index(count, [&](std::int64_t r) {
    thread_local Workspace ws;
    thread_local std::vector<double> cellbuf;
    double mass = 0.0;
    if (snap) cellbuf.resize(cells);
    run_tree_real(law, rng::replica_seed(seed, rng::kTagReference, r), record, &mass,
                  snap ? cellbuf.data() : nullptr, ws);
    const std::uint64_t gseed = rng::replica_seed(seed, rng::kTagGaussian, r);
    const std::uint64_t gnode = rng::node_state(gseed, 0, 0);
    out.values[r] = std::sqrt(std::max(0.0, mass)) * rng::gaussian(gnode, 0);
    if (snap) {
      // Brownian increments with variances given by the companion cells
      double prev = 0.0, acc = 0.0;
      for (std::int64_t c = 0; c < cells; ++c) {
        const double dv = std::max(0.0, cellbuf[c] - prev);
        prev = cellbuf[c];
        acc += std::sqrt(dv) * rng::gaussian(gnode, 2 * static_cast<std::uint64_t>(c + 1));
        out.paths(r, c) = acc;
      }
    }
  });
  return out;
}

EnsembleSample residual_ensemble(std::shared_ptr<const WeightSpec> spec, int n, int tail,
                                 int count, std::uint64_t seed, bool force) {
  require_real_law(*spec);
  if (count < 2) throw ValidationError("BadProbabilities", "ensemble count must be >= 2");
  if (tail < 1) throw ValidationError("DegenerateTail", "residual tail must be >= 1");
  const double phi2 = phi(*spec, 2.0);
  if (!force) {
    const RegimeReport rep = classify(*spec);
    if (rep.regime != Regime::ConvergentLp || spec->conservative() || !(phi2 > 0.0))
      throw RegimeError("WrongRegime",
                        "residual_ensemble needs a nonconservative convergent law with "
                        "phi(2) > 0");
  }
  const double m2 = limit_moment_convergent(*spec, 2);
  const double sigma = std::sqrt(m2 - 1.0);
  const double scale =
      sigma * std::pow(static_cast<double>(spec->branching()), -0.5 * n * phi2);

  const CompiledLaw law = compile_law(*spec);
  EnsembleSample out;
  out.spec = spec;
  out.kind = EnsembleKind::Rn;
  out.depth = n;
  out.tail = tail;
  out.seed = seed;
  out.values.resize(count);

  std::vector<int> record{n, n + tail};
  par::for_index(count, [&](std::int64_t r) {
    thread_local Workspace ws;
    double sums[2] = {0.0, 0.0};
    run_tree_real(law, rng::replica_seed(seed, rng::kTagResidual, r), record, sums,
                  nullptr, ws);
    out.values[r] = (sums[0] - sums[1]) / scale;
  });
  return out;
}

double ks_distance(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  if (a.size() == 0 || b.size() == 0)
    throw ValidationError("BadProbabilities", "KS needs nonempty samples");
  std::vector<double> sa(a.data(), a.data() + a.size());
  std::vector<double> sb(b.data(), b.data() + b.size());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_distance(const EnsembleSample& a, const EnsembleSample& b) {
  return ks_distance(a.values, b.values);
}

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double ks_distance_to_normal(const Eigen::ArrayXd& sample) {
  if (sample.size() == 0)
    throw ValidationError("BadProbabilities", "KS needs a nonempty sample");
  std::vector<double> s(sample.data(), sample.data() + sample.size());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double c = standard_normal_cdf(s[i]);
    d = std::max(d, std::abs(c - i / n));
    d = std::max(d, std::abs((i + 1) / n - c));
  }
  return d;
}

std::vector<MomentLine> moment_report(const EnsembleSample& sample,
                                      const std::vector<int>& orders) {
  std::vector<MomentLine> lines;
  const Eigen::ArrayXd& v = sample.values;
  const double n = static_cast<double>(v.size());
  for (int k : orders) {
    if (k < 1 || k > 4)
      throw ValidationError("BadProbabilities", "moment_report orders lie in {1..4}");
    MomentLine line;
    line.order = k;
    const Eigen::ArrayXd powers = v.pow(k);
    line.empirical = powers.mean();
    // jackknife over leave-one-out means
    const double var = (powers - line.empirical).square().sum() / (n * (n - 1.0));
    line.std_error = std::sqrt(var);

    switch (sample.kind) {
      case EnsembleKind::Zn:
        try {
          line.target = finite_n_moment(*sample.spec, k, sample.depth);
        } catch (const Error&) {
        }
        break;
      case EnsembleKind::Rn:
        if (k % 2 == 1)
          line.target = 0.0;
        else if (k == 2)
          line.target = 1.0;
        else {
          try {
            line.target = limit_moment_even(*sample.spec, k);
          } catch (const Error&) {
          }
        }
        break;
      case EnsembleKind::Reference:
        if (k % 2 == 1)
          line.target = 0.0;
        else if (k == 2)
          line.target = 1.0;
        else {
          try {
            line.target = limit_moment_even(*sample.spec, k);
          } catch (const Error&) {
          }
        }
        break;
    }
    lines.push_back(line);
  }
  return lines;
}

ComparisonReport compare_ensembles(const EnsembleSample& a, const EnsembleSample& b,
                                   const std::vector<int>& orders) {
  ComparisonReport rep;
  rep.ks_statistic = ks_distance(a, b);
  rep.moments_a = moment_report(a, orders);
  rep.moments_b = moment_report(b, orders);
  if (b.kind == EnsembleKind::Reference) {
    try {
      const WeightSpec companion = power_transform(*b.spec, 2.0);
      const double vn = second_moment_exact(companion, b.depth);
      const double m2 = limit_moment_convergent(companion, 2);
      rep.reference_bias = 3.0 * (vn - m2);
    } catch (const Error&) {
    }
  }
  return rep;
}

}  // namespace cascadelab
