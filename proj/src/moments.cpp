#include "cascadelab/moments.hpp"

#include <cmath>
#include <cstdint>

#include "cascadelab/cascade.hpp"
#include "cascadelab/parallel.hpp"
#include "cascadelab/regime.hpp"

namespace cascadelab {

namespace {

constexpr double kPhiZeroTol = 1e-12;

void check_order(int q) {
  if (q < 0 || q > kMaxMomentOrder)
    throw ValidationError("OrderTooLarge", "moment order must lie in [0, 20]");
}

void require_real(const WeightSpec& spec) {
  if (!spec.real_valued())
    throw ValidationError("ComplexSpec", "signed moment recursions need a real-valued law");
}

// Regime of the sigma_n normalization: nonconservative, (C) fails, phi(2) <= 0.
void require_clt_regime(const WeightSpec& spec) {
  if (spec.conservative() || check_condition_c(spec) != ConditionC::Fails ||
      phi(spec, 2.0) > kPhiZeroTol)
    throw RegimeError("WrongRegime",
                      "normalized moments need the unbounded nonconservative regime");
}

// E(prod_k W_k^{beta_k}) as a real number, for real specs.
double real_mixed_moment(const WeightSpec& spec, const std::vector<int>& beta) {
  Eigen::VectorXi e(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) e[static_cast<Eigen::Index>(i)] = beta[i];
  return mixed_moment(spec, e, false).real();
}

void fill_indices(int b, int remaining, int pos, int cap, bool even_only,
                  std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (pos == b - 1) {
    if (remaining < cap && (!even_only || remaining % 2 == 0)) {
      cur[pos] = remaining;
      out.push_back(cur);
    }
    return;
  }
  for (int v = even_only ? 0 : 0; v <= std::min(remaining, cap - 1);
       v += even_only ? 2 : 1) {
    cur[pos] = v;
    fill_indices(b, remaining - v, pos + 1, cap, even_only, cur, out);
  }
}

}  // namespace

std::vector<std::vector<int>> moment_multi_indices(int q, int b, bool interior,
                                                   bool even_only) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(b, 0);
  const int cap = interior ? q : q + 1;
  fill_indices(b, q, 0, cap, even_only, cur, out);
  return out;
}

double multinomial_coefficient(int q, const std::vector<int>& beta) {
  check_order(q);
  // q! / prod(beta_k!) stays below 2^63 for q <= 20
  unsigned long long num = 1;
  for (int i = 2; i <= q; ++i) num *= static_cast<unsigned long long>(i);
  for (int be : beta)
    for (int i = 2; i <= be; ++i) num /= static_cast<unsigned long long>(i);
  return static_cast<double>(num);
}

double second_moment_exact(const WeightSpec& spec, int n) {
  if (n < 0) throw ValidationError("BadProbabilities", "depth must be >= 0");
  const double s2 = spec.abs_moment_sum(2.0);  // b^{-phi(2)}
  if (!std::isfinite(s2) || !(s2 > 0.0))
    throw RegimeError("NonFinitePhi", "second moment needs finite phi(2)");
  const double cross = spec.cross_second_moment();
  if (std::abs(s2 - 1.0) <= 1e-14) return 1.0 + n * cross;
  const double ell = cross / (1.0 - s2);
  double growth = 1.0;
  for (int i = 0; i < n; ++i) growth *= s2;
  return ell + (1.0 - ell) * growth;
}

double finite_moment_sesi(const WeightSpec& spec, int q, int n) {
  check_order(q);
  require_real(spec);
  if (n < 0) throw ValidationError("BadProbabilities", "depth must be >= 0");
  const int b = spec.branching();

  // cache the mixed moments and multinomial weights per order
  struct Term {
    double gamma;
    double moment;
    std::vector<int> beta;
  };
  std::vector<std::vector<Term>> terms(q + 1);
  for (int j = 2; j <= q; ++j)
    for (const auto& beta : moment_multi_indices(j, b, /*interior=*/true))
      terms[j].push_back({multinomial_coefficient(j, beta), real_mixed_moment(spec, beta), beta});

  std::vector<double> concentrated(q + 1, 0.0);
  for (int j = 0; j <= q; ++j) concentrated[j] = spec.signed_power_sum(j).real();

  std::vector<double> mu(q + 1, 1.0);  // E(F_0(1)^j) = 1
  std::vector<double> next(q + 1, 0.0);
  for (int step = 0; step < n; ++step) {
    next[0] = 1.0;
    for (int j = 1; j <= q; ++j) {
      double acc = concentrated[j] * mu[j];
      for (const auto& t : terms[j]) {
        double prod = t.gamma * t.moment;
        for (int be : t.beta) prod *= mu[be];
        acc += prod;
      }
      next[j] = acc;
    }
    mu = next;
  }
  return mu[q];
}

double finite_n_moment(const WeightSpec& spec, int q, int n) {
  check_order(q);
  require_real(spec);
  require_clt_regime(spec);
  if (n < 1) throw ValidationError("BadProbabilities", "finite_n_moment needs n >= 1");

  const int b = spec.branching();
  const double phi2 = phi(spec, 2.0);
  const bool critical_scale = std::abs(phi2) <= kPhiZeroTol;
  const double s2 = spec.abs_moment_sum(2.0);
  const double tilde_scale = 1.0 / std::sqrt(s2);  // b^{phi(2)/2}

  // W~ = b^{phi(2)/2} W: scale a degree-j moment of W by tilde_scale^j
  auto tilde_pow = [tilde_scale](int j) {
    double p = 1.0;
    for (int i = 0; i < j; ++i) p *= tilde_scale;
    return p;
  };

  struct Term {
    double weight;  // gamma * E(prod W~^beta)
    std::vector<int> beta;
  };
  std::vector<std::vector<Term>> terms(q + 1);
  for (int j = 2; j <= q; ++j)
    for (const auto& beta : moment_multi_indices(j, b, /*interior=*/true))
      terms[j].push_back({multinomial_coefficient(j, beta) * tilde_pow(j) *
                              real_mixed_moment(spec, beta),
                          beta});
  // concentrated term: exact E(sum_k W~_k^j); equals b^{-phi_W~(j)} for even j
  std::vector<double> concentrated(q + 1, 0.0);
  for (int j = 0; j <= q; ++j)
    concentrated[j] = tilde_pow(j) * spec.signed_power_sum(j).real();

  // seed at n = 1 from the exact law of F_1(1) = sum_i W_i
  const double sigma1 = clt_sigma_n(spec, 1);
  std::vector<double> m(q + 1, 0.0);  // m[j] = E((F_1(1)/sigma_1)^j)
  {
    double inv_pow = 1.0;
    for (int j = 0; j <= q; ++j) {
      m[j] = finite_moment_sesi(spec, j, 1) * inv_pow;
      inv_pow /= sigma1;
    }
  }

  std::vector<double> next(q + 1, 0.0);
  for (int lvl = 1; lvl < n; ++lvl) {
    const double r =
        critical_scale ? std::sqrt(static_cast<double>(lvl) / (lvl + 1)) : 1.0;
    next[0] = 1.0;
    for (int j = 1; j <= q; ++j) {
      double acc = concentrated[j] * m[j];
      for (const auto& t : terms[j]) {
        double prod = t.weight;
        for (int be : t.beta) prod *= m[be];
        acc += prod;
      }
      double rq = 1.0;
      for (int i = 0; i < j; ++i) rq *= r;
      next[j] = rq * acc;
    }
    m = next;
  }
  return m[q];
}

double limit_moment_even(const WeightSpec& spec, int order) {
  check_order(order);
  require_real(spec);
  require_clt_regime(spec);
  if (order % 2 == 1) return 0.0;

  const int b = spec.branching();
  const double s2 = spec.abs_moment_sum(2.0);
  const double tilde_scale = 1.0 / std::sqrt(s2);
  auto tilde_pow = [tilde_scale](int j) {
    double p = 1.0;
    for (int i = 0; i < j; ++i) p *= tilde_scale;
    return p;
  };

  std::vector<double> M(order + 1, 0.0);
  M[0] = 1.0;
  if (order >= 2) M[2] = 1.0;
  for (int j = 4; j <= order; j += 2) {
    const double den = 1.0 - tilde_pow(j) * spec.abs_moment_sum(static_cast<double>(j));
    if (den <= 1e-12)
      throw RegimeError("DenominatorNotPositive",
                        "1 - b^{-phi_W~(q)} must be positive; outside the CLT hypotheses");
    double acc = 0.0;
    for (const auto& beta :
         moment_multi_indices(j, b, /*interior=*/true, /*even_only=*/true)) {
      double prod = multinomial_coefficient(j, beta) * tilde_pow(j) *
                    real_mixed_moment(spec, beta);
      for (int be : beta) prod *= M[be];
      acc += prod;
    }
    M[j] = acc / den;
  }
  return M[order];
}

double limit_moment_convergent(const WeightSpec& spec, int q) {
  check_order(q);
  require_real(spec);
  if (check_condition_c(spec) == ConditionC::Fails)
    throw RegimeError("WrongRegime",
                      "limit moments of F_W(1) need the convergent regime");
  const int b = spec.branching();

  std::vector<double> m(q + 1, 0.0);
  m[0] = 1.0;
  if (q >= 1) m[1] = 1.0;
  for (int j = 2; j <= q; ++j) {
    const double den = 1.0 - spec.signed_power_sum(j).real();
    if (den <= 1e-12)
      throw RegimeError("DenominatorNotPositive",
                        "1 - E(sum W_i^q) must be positive for the fixed point");
    double acc = 0.0;
    for (const auto& beta : moment_multi_indices(j, b, /*interior=*/true)) {
      double prod = multinomial_coefficient(j, beta) * real_mixed_moment(spec, beta);
      for (int be : beta) prod *= m[be];
      acc += prod;
    }
    m[j] = acc / den;
  }
  return m[q];
}

TerminalDistribution brute_force_terminal(const WeightSpec& spec, int n,
                                          double max_assignments) {
  if (n < 0) throw ValidationError("BadProbabilities", "depth must be >= 0");
  const int b = spec.branching();
  const auto support = spec.support_vectors();
  const std::size_t k = support.size();

  std::int64_t nodes = 0;
  for (int lvl = 0; lvl < n; ++lvl) nodes += ipow(b, lvl);
  double assignments = 1.0;
  for (std::int64_t t = 0; t < nodes; ++t) {
    assignments *= static_cast<double>(k);
    if (assignments > max_assignments)
      throw ResourceError("TooManyCombinations",
                          "exhaustive tree enumeration exceeds the guard");
  }
  const std::int64_t total = static_cast<std::int64_t>(assignments);

  TerminalDistribution dist;
  dist.probs.resize(total);
  dist.values.resize(total);

  const std::int64_t leaves = ipow(b, n);
  par::for_index(total, [&](std::int64_t code) {
    // decode the per-node support choices (BFS node order)
    std::int64_t c = code;
    double prob = 1.0;
    std::vector<const Eigen::VectorXcd*> choice(nodes);
    for (std::int64_t t = 0; t < nodes; ++t) {
      const auto& atom = support[c % k];
      c /= k;
      prob *= atom.prob;
      choice[t] = &atom.values;
    }
    // multiply down the tree
    std::vector<Complex> cur(1, Complex(1.0, 0.0));
    std::vector<Complex> nxt;
    std::int64_t level_base = 0;
    for (int lvl = 0; lvl < n; ++lvl) {
      const std::int64_t width = ipow(b, lvl);
      nxt.assign(width * b, Complex(0.0, 0.0));
      for (std::int64_t j = 0; j < width; ++j) {
        const Eigen::VectorXcd& w = *choice[level_base + j];
        for (int i = 0; i < b; ++i) nxt[j * b + i] = cur[j] * w[i];
      }
      cur.swap(nxt);
      level_base += width;
    }
    Complex sum(0.0, 0.0);
    for (std::int64_t j = 0; j < leaves; ++j) sum += cur[j];
    dist.probs[code] = prob;
    dist.values[code] = sum;
  });
  return dist;
}

double brute_force_moment(const WeightSpec& spec, int q, int n, BruteKind kind) {
  check_order(q);
  const TerminalDistribution dist = brute_force_terminal(spec, n);
  double norm = 1.0;
  if (kind == BruteKind::Normalized) {
    require_real(spec);
    norm = clt_sigma_n(spec, std::max(n, 1));
  }
  if (kind == BruteKind::Plain && !spec.real_valued())
    throw ValidationError("ComplexSpec",
                          "plain signed moments are defined for real-valued laws");
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    switch (kind) {
      case BruteKind::Plain:
      case BruteKind::Normalized: {
        const double v = dist.values[i].real() / norm;
        acc += dist.probs[i] * std::pow(v, q);
        break;
      }
      case BruteKind::Absolute: {
        acc += dist.probs[i] * std::pow(std::abs(dist.values[i]), q);
        break;
      }
    }
  }
  return acc;
}

}  // namespace cascadelab
