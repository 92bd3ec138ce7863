#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "cascadelab/weights.hpp"

namespace cascadelab {

/// Values of F_n on the level-n b-adic grid: values[k] = F_n(k b^{-n}),
/// so values has b^n + 1 entries, values[0] = 0 and consecutive differences
/// are the level-n products Q(w).
struct SamplePath {
  int base = 2;
  int level = 0;
  Eigen::ArrayXcd values;

  bool real_valued() const { return (values.imag() == 0.0).all(); }
};

/// A seeded depth-n tree of sampled weight vectors stored as per-level
/// product arrays: q_levels[l][j] = Q(w) for the level-l word of index j.
/// Fully determined by (spec, seed); levels are recomputable and extending
/// the depth never changes existing levels.
class CascadeRealization {
public:
  CascadeRealization(std::shared_ptr<const WeightSpec> spec, int depth,
                     std::uint64_t seed, bool allow_large = false);

  const WeightSpec& spec() const { return *spec_; }
  std::shared_ptr<const WeightSpec> spec_ptr() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  int depth() const { return depth_; }
  const Eigen::ArrayXcd& level(int l) const { return q_levels_[l]; }

  /// Deepen in place; existing levels are untouched (refinement stability).
  void extend(int new_depth, bool allow_large = false);

private:
  void build_levels(int upto, bool allow_large);

  std::shared_ptr<const WeightSpec> spec_;
  std::uint64_t seed_ = 0;
  int depth_ = 0;
  std::vector<Eigen::ArrayXcd> q_levels_;
};

/// Node-count guard: b^depth must stay within 2^26 unless overridden.
inline constexpr std::int64_t kMaxLeaves = std::int64_t(1) << 26;

CascadeRealization realize(std::shared_ptr<const WeightSpec> spec, int depth,
                           std::uint64_t seed, bool allow_large = false);
CascadeRealization realize(const WeightSpec& spec, int depth, std::uint64_t seed,
                           bool allow_large = false);

/// realize at new_depth, reusing an existing realization; bit-identical to
/// a fresh realize(spec, new_depth, seed).
CascadeRealization extend(const CascadeRealization& real, int new_depth,
                          bool allow_large = false);

/// Prefix sums of the level-m products: the sample path of F_m.
SamplePath path(const CascadeRealization& real, int m);

/// Increment of F_n over the b-adic cell of `word` (digits in [0,b)), n >= |word|.
Complex increment(const CascadeRealization& real, const std::vector<int>& word, int n);

/// Sample path of the coupled companion F_{W^(beta)} at the realization's
/// depth: level-n increments b^{n phi(beta)} |Q(w)|^beta from the same
/// sampled tree. Real and nondecreasing.
SamplePath coupled_companion(const CascadeRealization& real, double beta);

/// max_{|w|=m} |Q(w)|.
double max_level_product(const CascadeRealization& real, int m);

std::int64_t ipow(std::int64_t base, int exp);

}  // namespace cascadelab
