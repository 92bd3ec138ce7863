#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cascadelab/weights.hpp"

namespace cascadelab {

enum class EnsembleKind { Zn, Rn, Reference };

const char* to_string(EnsembleKind k);

/// Independent replicas of a terminal statistic, one value per replica.
/// Replica r draws its tree from the derived stream
/// replica_seed(seed, tag(kind), r), so identical (spec, n, count, seed)
/// reproduce bit-identical ensembles at any worker count.
struct EnsembleSample {
  std::shared_ptr<const WeightSpec> spec;
  EnsembleKind kind = EnsembleKind::Zn;
  int depth = 0;
  int tail = 0;  // Rn only
  std::uint64_t seed = 0;
  Eigen::ArrayXd values;
  /// Optional normalized path snapshots on the level-8 grid (row per replica).
  Eigen::MatrixXd paths;
};

struct MomentLine {
  int order = 0;
  double empirical = 0.0;
  double std_error = 0.0;                // jackknife
  std::optional<double> target;          // exact value where the regime defines one
};

struct ComparisonReport {
  double ks_statistic = 0.0;
  std::vector<MomentLine> moments_a;
  std::vector<MomentLine> moments_b;
  std::optional<double> reference_bias;  // 3 (v_n - m_2) of the companion, see reference_sample
  std::vector<std::string> notes;
};

/// Z_n(1) = F_n(1)/sigma_n replicas. Requires the tight/CLT regime of a
/// real-valued nonconservative law; `force` overrides the regime guard.
EnsembleSample normalized_ensemble(std::shared_ptr<const WeightSpec> spec, int n,
                                   int count, std::uint64_t seed,
                                   bool keep_paths = false, bool force = false);

/// Conditionally Gaussian reference for the weak limit:
/// sqrt(F_{W^(2)},n(1)) * g with g standard normal, per replica.
EnsembleSample reference_sample(std::shared_ptr<const WeightSpec> spec, int n, int count,
                                std::uint64_t seed, bool keep_paths = false,
                                bool force = false);

/// Normalized residuals (F_n(1) - F_{n+tail}(1)) / (sigma b^{-n phi(2)/2}) in
/// the convergent regime, F approximated at depth n + tail on the same
/// coupled realization; sigma = sqrt(m_2 - 1).
EnsembleSample residual_ensemble(std::shared_ptr<const WeightSpec> spec, int n, int tail,
                                 int count, std::uint64_t seed, bool force = false);

/// Two-sample Kolmogorov-Smirnov statistic on terminal values.
double ks_distance(const EnsembleSample& a, const EnsembleSample& b);
double ks_distance(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);

/// One-sample Kolmogorov-Smirnov distance to the standard normal law.
double ks_distance_to_normal(const Eigen::ArrayXd& sample);

double standard_normal_cdf(double x);

/// Empirical moments with jackknife standard errors; target values attached
/// from the exact recursions where the sample's regime defines them.
std::vector<MomentLine> moment_report(const EnsembleSample& sample,
                                      const std::vector<int>& orders);

/// KS statistic plus moment reports of both samples; when `b` is a Reference
/// ensemble the report carries the depth-n companion bias 3 (v_n - m_2).
ComparisonReport compare_ensembles(const EnsembleSample& a, const EnsembleSample& b,
                                   const std::vector<int>& orders);

}  // namespace cascadelab
