#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascadelab/weights.hpp"

namespace cascadelab {

/// Supported moment orders; multinomial coefficients overflow past this.
inline constexpr int kMaxMomentOrder = 20;

struct MomentEntry {
  int q = 0;
  std::optional<int> depth;  // nullopt = limit
  double value = 0.0;
  std::string method;        // v_recursion | eq44 | eq45 | sesi | brute_force
};

struct MomentTable {
  std::vector<MomentEntry> entries;
};

/// Exact v_n = E(|F_n(1)|^2): closed form of the one-step second-moment
/// recursion. Works for complex specs.
double second_moment_exact(const WeightSpec& spec, int n);

/// Exact E(F_n(1)^q) for real specs by the self-similar one-step recursion
/// seeded at E(F_0(1)^q) = 1 (tag "sesi").
double finite_moment_sesi(const WeightSpec& spec, int q, int n);

/// Exact normalized moments E((F_n(1)/sigma_n)^q) in the unbounded
/// nonconservative regime, seeded at n = 1 by exact enumeration of
/// F_1(1) = sum_i W_i (tag "eq44").
double finite_n_moment(const WeightSpec& spec, int q, int n);

/// Limit moments of the normalized sequence: E(Z^{2p}) by the triangular
/// even-moment fixed point; odd limit moments vanish (tag "eq45").
double limit_moment_even(const WeightSpec& spec, int order);

/// Limit moments m_q = E(F_W(1)^q) in the convergent regime via the
/// smoothing-transform fixed point (tag "sesi", depth = limit).
double limit_moment_convergent(const WeightSpec& spec, int q);

enum class BruteKind { Plain, Absolute, Normalized };

/// Terminal distribution of F_n(1) by exhaustive enumeration of all weight
/// assignments on the depth-n tree (joint probabilities over the product
/// support). Guarded at ~1e7 assignments.
struct TerminalDistribution {
  std::vector<double> probs;
  std::vector<Complex> values;
};
TerminalDistribution brute_force_terminal(const WeightSpec& spec, int n,
                                          double max_assignments = 1e7);

/// Independent oracle: exact E(F_n(1)^q) (Plain), E(|F_n(1)|^q) (Absolute) or
/// E((F_n(1)/sigma_n)^q) (Normalized) by exhaustive enumeration.
double brute_force_moment(const WeightSpec& spec, int q, int n,
                          BruteKind kind = BruteKind::Plain);

/// Multi-indices beta in N^b with sum q; `interior` drops the b concentrated
/// ones (all components < q), `even_only` keeps beta with every component even.
std::vector<std::vector<int>> moment_multi_indices(int q, int b, bool interior,
                                                   bool even_only = false);

/// q! / prod(beta_k!) in exact integer arithmetic (q <= 20).
double multinomial_coefficient(int q, const std::vector<int>& beta);

}  // namespace cascadelab
