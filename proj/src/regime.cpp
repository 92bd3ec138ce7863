#include "cascadelab/regime.hpp"

#include <cmath>
#include <limits>

namespace cascadelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPositiveTol = 1e-12;

// Maximum of the concave phi on [lo, hi]: coarse grid then golden-section
// refinement around the best bracket.
std::pair<double, double> max_phi_on(const WeightSpec& spec, double lo, double hi) {
  const double step = 1.0 / 64.0;
  double best_p = lo, best_v = phi(spec, lo);
  for (double p = lo; p <= hi + 1e-12; p += step) {
    const double v = phi(spec, std::min(p, hi));
    if (v > best_v) {
      best_v = v;
      best_p = std::min(p, hi);
    }
  }
  double a = std::max(lo, best_p - step);
  double b = std::min(hi, best_p + step);
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = phi(spec, x1), f2 = phi(spec, x2);
  for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = phi(spec, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = phi(spec, x1);
    }
  }
  const double pm = 0.5 * (a + b);
  const double vm = phi(spec, pm);
  if (vm > best_v) return {pm, vm};
  return {best_p, best_v};
}

double g_of(const WeightSpec& spec, double p) {
  return phi_derivative(spec, p) * p - phi(spec, p);
}

}  // namespace

const char* to_string(ConditionC c) {
  switch (c) {
    case ConditionC::C1: return "C1";
    case ConditionC::C2: return "C2";
    case ConditionC::C3Critical: return "C3_critical";
    case ConditionC::Fails: return "fails";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::ConvergentLp: return "ConvergentLp";
    case Regime::ConservativeCritical: return "ConservativeCritical";
    case Regime::Degenerate: return "Degenerate";
    case Regime::DivergentUnbounded: return "DivergentUnbounded";
    case Regime::TightCLT: return "TightCLT";
    case Regime::Undetermined: return "Undetermined";
  }
  return "?";
}

std::optional<double> solve_beta(const WeightSpec& spec) {
  if (spec.nonnegative()) return 1.0;  // phi(1) = 0 exactly
  const double step = 1.0 / 64.0;
  double prev_p = 1.0;
  double prev_v = phi(spec, prev_p);
  if (prev_v > kPositiveTol) return 1.0;  // numerically at the root already
  for (double p = 1.0 + step; p <= kPMax + 1e-9; p += step) {
    const double v = phi(spec, p);
    if (v > 0.0) {
      double lo = prev_p, hi = p;
      while (hi - lo > kRootTol) {
        const double mid = 0.5 * (lo + hi);
        if (phi(spec, mid) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_p = p;
    prev_v = v;
  }
  (void)prev_v;
  return std::nullopt;
}

double compute_p0(const WeightSpec& spec) {
  const double lo0 = 1.0 / 1024.0;
  if (g_of(spec, lo0) <= 0.0) return 0.0;
  if (g_of(spec, kPMax) > 0.0) return kInf;
  double lo = lo0, hi = kPMax;
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    if (g_of(spec, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ConditionC check_condition_c(const WeightSpec& spec) {
  if (max_phi_on(spec, 1.0, 2.0).second > kPositiveTol) return ConditionC::C1;
  if (spec.conservative()) {
    if (max_phi_on(spec, 1.0, kPMax).second > kPositiveTol) return ConditionC::C2;
    if (spec.max_modulus() <= 1.0 + 1e-12 &&
        std::abs(spec.expected_unit_count() - 1.0) <= 1e-12 &&
        spec.prob_single_unit() < 1.0 - 1e-12)
      return ConditionC::C3Critical;
  }
  return ConditionC::Fails;
}

std::optional<double> check_critical_structure(const WeightSpec& spec) {
  double gamma = 0.0;
  for (const auto& atom : spec.support_vectors()) {
    Complex partial(0.0, 0.0);
    for (Eigen::Index i = 0; i < atom.values.size(); ++i) {
      const Complex v = atom.values[i];
      const Complex before = partial;
      partial += v;
      if (std::abs(std::abs(v) - 1.0) <= 1e-12) {
        const bool zero_one = std::abs(before) <= 1e-9 && std::abs(partial - 1.0) <= 1e-9;
        const bool one_zero = std::abs(before - 1.0) <= 1e-9 && std::abs(partial) <= 1e-9;
        if (!zero_one && !one_zero) return std::nullopt;
      } else {
        gamma = std::max(gamma, std::abs(v));
      }
    }
  }
  if (!(gamma > 0.0) || gamma >= 1.0) return std::nullopt;  // gamma must lie in (0,1)
  return gamma;
}

RegimeReport classify(const WeightSpec& spec) {
  RegimeReport rep;
  rep.condition_c = check_condition_c(spec);
  rep.beta = solve_beta(spec);
  rep.p0 = compute_p0(spec);
  rep.phi_at_2 = phi(spec, 2.0);
  rep.extinction_prob = extinction_probability(spec);

  switch (rep.condition_c) {
    case ConditionC::C1:
    case ConditionC::C2:
      rep.regime = Regime::ConvergentLp;
      break;
    case ConditionC::C3Critical: {
      rep.critical_gamma = check_critical_structure(spec);
      if (rep.critical_gamma) {
        rep.regime = Regime::ConservativeCritical;
      } else {
        rep.regime = Regime::Undetermined;
        rep.notes.push_back(
            "critical conservative law without the verified unit-increment structure; "
            "convergence undecided");
      }
      break;
    }
    case ConditionC::Fails: {
      const bool p0_finite = std::isfinite(rep.p0);
      if (rep.p0 <= 1.0) {
        rep.regime = Regime::Degenerate;
        if (rep.p0 > 0.0) {
          const double alpha = phi(spec, rep.p0) / rep.p0;
          rep.notes.push_back("degenerate decay threshold exponent phi(p0)/p0 = " +
                              std::to_string(alpha));
        }
        break;
      }
      const bool boundary =
          p0_finite && std::abs(phi(spec, rep.p0)) <= 1e-9;
      if (spec.conservative()) {
        if (boundary) {
          rep.regime = Regime::Undetermined;
          rep.notes.push_back("phi(p0) = 0 at finite p0: convergence undecidable here");
        } else {
          rep.regime = Regime::DivergentUnbounded;
        }
      } else if (rep.p0 <= 2.0) {
        if (boundary) {
          rep.regime = Regime::Undetermined;
          rep.notes.push_back(
              "phi(p0) = 0 with p0 in (1,2]: convergence undecidable here");
        } else {
          rep.regime = Regime::DivergentUnbounded;
        }
      } else {
        rep.regime = Regime::TightCLT;
      }
      break;
    }
  }

  if (rep.condition_c == ConditionC::Fails && !spec.conservative() &&
      rep.phi_at_2 <= kPositiveTol) {
    rep.sigma = clt_sigma(spec);
  }
  return rep;
}

double clt_sigma(const WeightSpec& spec) {
  if (spec.conservative())
    throw RegimeError("WrongRegime", "sigma is undefined for conservative cascades");
  if (check_condition_c(spec) != ConditionC::Fails)
    throw RegimeError("WrongRegime", "sigma is defined only when condition (C) fails");
  const double phi2 = phi(spec, 2.0);
  if (!std::isfinite(phi2) || phi2 > kPositiveTol)
    throw RegimeError("WrongRegime", "sigma requires phi(2) <= 0 finite");

  const double cross = spec.cross_second_moment();
  if (std::abs(phi2) <= kPositiveTol) return std::sqrt(cross);
  const double s2 = spec.abs_moment_sum(2.0);         // E sum |W_i|^2 = b^{-phi(2)}
  const double sum_sq = s2 + cross;                   // E |sum W_i|^2
  return std::sqrt((sum_sq - 1.0) / (s2 - 1.0));
}

double clt_sigma_n(const WeightSpec& spec, int n) {
  if (n < 1) throw ValidationError("BadProbabilities", "sigma_n requires n >= 1");
  const double s = clt_sigma(spec);
  const double phi2 = phi(spec, 2.0);
  if (std::abs(phi2) <= kPositiveTol) return s * std::sqrt(static_cast<double>(n));
  return s * std::pow(static_cast<double>(spec.branching()), -0.5 * n * phi2);
}

double extinction_probability(const WeightSpec& spec) {
  if (!spec.has_zero_weight()) return 0.0;
  const Eigen::VectorXd dist = spec.nonzero_count_distribution();
  double mean = 0.0;
  for (int k = 0; k <= spec.branching(); ++k) mean += k * dist[k];
  if (mean <= 1.0 + 1e-15) return 1.0;

  auto P = [&dist, b = spec.branching()](double x) {
    double acc = 0.0;
    for (int k = b; k >= 0; --k) acc = acc * x + dist[k];
    return acc;
  };
  double lo = 0.0, hi = 1.0 - 1e-9;
  if (P(lo) - lo <= 0.0) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (P(mid) - mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cascadelab
