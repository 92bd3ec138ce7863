#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cascadelab/cascade.hpp"

namespace cascadelab {

/// Graph of the time-changed function B = F ∘ G^{-1} sampled at the images of
/// the b-adic grid: knot k is (G(t_k), F(t_k)), so no inversion error enters.
struct ParametricCurve {
  Eigen::ArrayXd times;    // nondecreasing, times[0] = 0
  Eigen::ArrayXcd values;
};

struct TauEstimate {
  std::vector<double> q_values;
  std::vector<double> tau_hat;
  int level_lo = 0;
  int level_hi = 0;
  Eigen::MatrixXd partition_sums;  // (levels, q): sum of Osc^q over nonzero cells
};

/// Per level-m cell, the diameter of the sampled values over the closed cell
/// (endpoints shared with neighbors). Exact min/max for real paths, convex
/// hull + rotating calipers for complex ones. The sampled diameter
/// under-estimates the true oscillation of the underlying function when the
/// path is not monotone; the gap shrinks as level - m grows.
Eigen::ArrayXd oscillations(const SamplePath& path, int m);

/// Least-squares slope of -log_b sum_{Osc != 0} Osc^q against m over
/// [level_lo, level_hi], one slope per q. Cells of zero oscillation are
/// excluded from the partition sums.
TauEstimate tau_estimate(const SamplePath& path, const std::vector<double>& q_values,
                         int level_lo, int level_hi);

/// Same free-energy regression, but each level m uses the increments of the
/// level-m path itself (|Q(w)|, |w| = m) instead of oscillations of one fixed
/// path. This is the stable estimator for diverging cascades, where the
/// subtree oscillation factor of a fixed path grows with level - m.
TauEstimate tau_estimate(const CascadeRealization& real,
                         const std::vector<double>& q_values, int level_lo, int level_hi);

/// Entry m = sup over the level-(m+1) grid of |F_{m+1} - F_m|, m = 0..depth-1.
Eigen::ArrayXd cauchy_profile(const CascadeRealization& real);

/// Right-continuous generalized inverse of a nondecreasing real path:
/// query(y) = sup { t : G(t) <= y }, exact piecewise-linear inverse on
/// strictly increasing segments, right endpoint across flats.
class MonotoneInverse {
public:
  explicit MonotoneInverse(const SamplePath& path);
  double operator()(double y) const;
  double domain_lo() const { return values_[0]; }
  double domain_hi() const { return values_[values_.size() - 1]; }

private:
  Eigen::ArrayXd values_;
  int base_;
  int level_;
};

MonotoneInverse invert_monotone(const SamplePath& path);

/// Knots (F_{W^(beta)}(t_k), F_W(t_k)) over the level-n grid, companion and
/// path from the same realization.
ParametricCurve time_change(const CascadeRealization& real, double beta);

struct HolderFit {
  double exponent = 0.0;
  std::int64_t excluded_cells = 0;   // zero-length time cells skipped
  std::int64_t used_cells = 0;
};

/// Pooled least-squares slope of log Osc_B(J_w) against log |J_w| over the
/// b-adic words of the given levels, where |J_w| is the companion increment
/// and Osc_B(J_w) the oscillation of the path over I_w. Estimates the
/// constant pointwise exponent of the time-changed function.
HolderFit holder_estimate(const ParametricCurve& curve, const CascadeRealization& real,
                          const std::vector<int>& levels);

/// Diameter of a planar point set (helper shared with tests).
double point_set_diameter(const std::vector<Eigen::Vector2d>& pts);

}  // namespace cascadelab
