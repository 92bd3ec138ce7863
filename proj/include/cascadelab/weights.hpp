#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cascadelab/errors.hpp"

namespace cascadelab {

using Complex = std::complex<double>;

enum class WeightKind { Deterministic, IidComponents, MixtureOfVectors };

/// One atom of the component law of an i.i.d.-components weight vector.
struct IidAtom {
  double prob;
  Complex value;
};

/// One atom of a mixture-of-vectors law (also the single atom of a
/// deterministic law, with prob == 1).
struct VectorAtom {
  double prob;
  Eigen::VectorXcd values;
};

struct NodeKey {
  int level;
  std::int64_t index;
};

/// Finite-support law of the weight vector W = (W_0, ..., W_{b-1}).
///
/// Validated at construction: atom probabilities in (0,1] summing to 1 within
/// 1e-12, branching b >= 2, and the martingale normalization
/// E(sum_i W_i) = 1 within 1e-9. All expectations over the support are exact
/// (finite sums), which is what makes the moment recursions and their
/// brute-force oracle comparable at 1e-9.
class WeightSpec {
public:
  static constexpr double kProbTol = 1e-12;
  static constexpr double kMeanTol = 1e-9;
  static constexpr double kConservativeTol = 1e-12;

  static WeightSpec deterministic(const Eigen::VectorXcd& values);
  static WeightSpec iid(int b, std::vector<IidAtom> atoms);
  static WeightSpec mixture(int b, std::vector<VectorAtom> atoms);

  int branching() const { return b_; }
  WeightKind kind() const { return kind_; }

  /// True iff every support vector sums to 1 within 1e-12 (for i.i.d.
  /// components only when the single support value forces it).
  bool conservative() const { return conservative_; }
  bool has_zero_weight() const { return has_zero_; }
  /// True iff every support value has zero imaginary part.
  bool real_valued() const { return real_; }
  /// True iff every support value is a nonnegative real.
  bool nonnegative() const { return nonnegative_; }

  const std::vector<IidAtom>& iid_atoms() const { return iid_atoms_; }
  const std::vector<VectorAtom>& vector_atoms() const { return vector_atoms_; }

  /// E(sum_i W_i), exact over the support.
  Complex mean_sum() const;
  /// E(sum_i |W_i|^p) for p > 0 (zero weights contribute 0).
  double abs_moment_sum(double p) const;
  /// E(sum_i |W_i|^p ln|W_i|) for p > 0 (zero weights contribute 0).
  double abs_moment_log_sum(double p) const;
  /// E(sum_i W_i^q) for integer q >= 0, exact (signed / complex).
  Complex signed_power_sum(int q) const;
  /// E(sum_{i != j} W_i conj(W_j)), exact; real by symmetry.
  double cross_second_moment() const;
  /// Largest |W_i| over the support.
  double max_modulus() const;
  /// sum_i P(|W_i| = 1) and P(#{i : |W_i| = 1} = 1), for the critical case.
  double expected_unit_count() const;
  double prob_single_unit() const;
  /// Distribution of N = #{i : |W_i| > 0} as probabilities of N = 0..b.
  Eigen::VectorXd nonzero_count_distribution() const;

  /// Joint support of W as (prob, vector) pairs; for i.i.d. components this
  /// expands the k^b combinations, guarded by max_size.
  std::vector<VectorAtom> support_vectors(std::size_t max_size = 1u << 22) const;

private:
  WeightSpec() = default;
  void finalize();

  int b_ = 0;
  WeightKind kind_ = WeightKind::Deterministic;
  std::vector<IidAtom> iid_atoms_;
  std::vector<VectorAtom> vector_atoms_;
  bool conservative_ = false;
  bool has_zero_ = false;
  bool real_ = false;
  bool nonnegative_ = false;
};

/// phi_W(p) = -log_b E(sum_i |W_i|^p) as an extended real.
/// Conventions: phi(0) = -1 exactly (0^0 = 1); for p < 0 with a zero weight
/// of positive probability the value is -infinity.
double phi(const WeightSpec& spec, double p);

/// d phi_W/dp = -E(sum |W_i|^p ln|W_i|) / (ln b * E(sum |W_i|^p)), p > 0.
double phi_derivative(const WeightSpec& spec, double p);

/// Exact E(prod_k W_k^{e_k}) over the support (with |W_k| if use_modulus);
/// factorizes across components for i.i.d. laws. Exponents nonnegative.
Complex mixed_moment(const WeightSpec& spec, const Eigen::VectorXi& exponents,
                     bool use_modulus = false);

/// The normalized modulus-power law W^(beta) = b^{phi(beta)} (|W_i|^beta)_i.
/// Nonnegative by construction with phi_{W^(beta)}(1) = 0.
WeightSpec power_transform(const WeightSpec& spec, double beta);

/// Sample the weight vector of one tree node. Pure function of
/// (spec, seed, key); see rng.hpp for the key schedule.
Eigen::VectorXcd sample_weights(const WeightSpec& spec, NodeKey key, std::uint64_t seed);

/// z^q by squaring; avoids the pow branch cut for negative reals so real
/// inputs keep exactly zero imaginary part.
Complex powi(Complex z, unsigned q);

}  // namespace cascadelab
