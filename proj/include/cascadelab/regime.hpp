#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascadelab/weights.hpp"

namespace cascadelab {

enum class ConditionC { C1, C2, C3Critical, Fails };

enum class Regime {
  ConvergentLp,
  ConservativeCritical,
  Degenerate,
  DivergentUnbounded,
  TightCLT,
  Undetermined,
};

const char* to_string(ConditionC c);
const char* to_string(Regime r);

struct RegimeReport {
  ConditionC condition_c = ConditionC::Fails;
  Regime regime = Regime::Undetermined;
  std::optional<double> beta;       // smallest root of phi = 0 on [1, P_MAX]
  double p0 = 0.0;                  // +inf when the defining inequality never fails
  double phi_at_2 = 0.0;
  std::optional<double> sigma;      // only in the tight/CLT normalization regime
  std::optional<double> critical_gamma;
  double extinction_prob = 0.0;
  std::vector<std::string> notes;
};

/// Upper bound of all p-searches; phi over a finite support is uninformative
/// beyond it.
inline constexpr double kPMax = 256.0;
inline constexpr double kRootTol = 1e-9;

/// Smallest root of phi_W(p) = 0 on [1, kPMax] by bracketed bisection;
/// exactly 1 for nonnegative specs, absent when phi < 0 on the whole range.
std::optional<double> solve_beta(const WeightSpec& spec);

/// Unique zero of g(p) = phi'(p) p - phi(p) on (0, kPMax] (g is nonincreasing
/// by concavity of phi), +inf if g > 0 up to the cap, 0 if g <= 0 from the
/// start.
double compute_p0(const WeightSpec& spec);

/// The three-case sufficient condition for nontrivial uniform convergence.
ConditionC check_condition_c(const WeightSpec& spec);

/// For critical conservative specs: verifies that every support vector splits
/// into unit-modulus entries sitting on partial sums (0,1) or (1,0) and
/// entries of modulus <= gamma < 1; returns the smallest admissible gamma.
std::optional<double> check_critical_structure(const WeightSpec& spec);

/// Full decision table; see RegimeReport.
RegimeReport classify(const WeightSpec& spec);

/// Asymptotic standard-deviation constant of F_n(1) in the unbounded
/// nonconservative regime. WrongRegime when conservative or condition (C)
/// holds.
double clt_sigma(const WeightSpec& spec);

/// Depth-n normalization: sigma * b^{-n phi(2)/2} when phi(2) < 0,
/// sigma * sqrt(n) when phi(2) = 0. Requires n >= 1.
double clt_sigma_n(const WeightSpec& spec, int n);

/// Smallest fixed point on [0,1] of P(x) = E(x^N), N = #{i : |W_i| > 0}:
/// the probability that the cascade eventually dies.
double extinction_probability(const WeightSpec& spec);

}  // namespace cascadelab
