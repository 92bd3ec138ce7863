#include "cascadelab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "cascadelab/parallel.hpp"

namespace cascadelab {

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew monotone chain; returns hull vertices in counter-clockwise order.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Eigen::Vector2d> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double line_fit_slope(const Eigen::Ref<const Eigen::ArrayXd>& x,
                      const Eigen::Ref<const Eigen::ArrayXd>& y) {
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = ((x - mx) * (x - mx)).sum();
  const double sxy = ((x - mx) * (y - my)).sum();
  return sxy / sxx;
}

TauEstimate tau_from_sums(const Eigen::MatrixXd& sums, const std::vector<double>& qs,
                          int lo, int hi, double logb) {
  TauEstimate est;
  est.q_values = qs;
  est.level_lo = lo;
  est.level_hi = hi;
  est.partition_sums = sums;
  const int levels = hi - lo + 1;
  Eigen::ArrayXd ms(levels);
  for (int i = 0; i < levels; ++i) ms[i] = lo + i;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    Eigen::ArrayXd y(levels);
    for (int i = 0; i < levels; ++i) y[i] = -std::log(sums(i, j)) / logb;
    est.tau_hat.push_back(line_fit_slope(ms, y));
  }
  return est;
}

}  // namespace

double point_set_diameter(const std::vector<Eigen::Vector2d>& pts) {
  const auto hull = convex_hull(pts);
  const std::size_t h = hull.size();
  if (h <= 1) return 0.0;
  if (h == 2) return (hull[1] - hull[0]).norm();
  // rotating calipers
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < h; ++i) {
    const Eigen::Vector2d edge = hull[(i + 1) % h] - hull[i];
    while (true) {
      const std::size_t jn = (j + 1) % h;
      const double adv = edge.x() * (hull[jn].y() - hull[j].y()) -
                         edge.y() * (hull[jn].x() - hull[j].x());
      if (adv > 0.0)
        j = jn;
      else
        break;
    }
    best = std::max(best, (hull[j] - hull[i]).norm());
    best = std::max(best, (hull[j] - hull[(i + 1) % h]).norm());
  }
  return best;
}

Eigen::ArrayXd oscillations(const SamplePath& path, int m) {
  if (m < 0 || m > path.level)
    throw ValidationError("WordTooDeep", "oscillation level exceeds path level");
  const std::int64_t cells = ipow(path.base, m);
  const std::int64_t span = ipow(path.base, path.level - m);
  Eigen::ArrayXd out(cells);
  if (path.real_valued()) {
    par::for_index(cells, [&](std::int64_t c) {
      double lo = path.values[c * span].real(), hi = lo;
      for (std::int64_t k = 1; k <= span; ++k) {
        const double v = path.values[c * span + k].real();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      out[c] = hi - lo;
    });
    return out;
  }
  par::for_index(cells, [&](std::int64_t c) {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(span + 1);
    for (std::int64_t k = 0; k <= span; ++k) {
      const Complex v = path.values[c * span + k];
      pts.emplace_back(v.real(), v.imag());
    }
    out[c] = point_set_diameter(pts);
  });
  return out;
}

TauEstimate tau_estimate(const SamplePath& path, const std::vector<double>& qs,
                         int level_lo, int level_hi) {
  if (level_hi > path.level || level_hi - level_lo < 2)
    throw ValidationError("WordTooDeep", "tau window needs >= 3 levels within the path");
  const int levels = level_hi - level_lo + 1;
  Eigen::MatrixXd sums(levels, qs.size());
  for (int i = 0; i < levels; ++i) {
    const Eigen::ArrayXd osc = oscillations(path, level_lo + i);
    for (std::size_t j = 0; j < qs.size(); ++j) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < osc.size(); ++c)
        if (osc[c] > 0.0) s += std::pow(osc[c], qs[j]);
      if (s == 0.0) throw RegimeError("AllCellsZero", "all cells have zero oscillation");
      sums(i, j) = s;
    }
  }
  return tau_from_sums(sums, qs, level_lo, level_hi,
                       std::log(static_cast<double>(path.base)));
}

TauEstimate tau_estimate(const CascadeRealization& real, const std::vector<double>& qs,
                         int level_lo, int level_hi) {
  if (level_hi > real.depth() || level_hi - level_lo < 2)
    throw ValidationError("WordTooDeep", "tau window needs >= 3 levels within the tree");
  const int levels = level_hi - level_lo + 1;
  Eigen::MatrixXd sums(levels, qs.size());
  for (int i = 0; i < levels; ++i) {
    const Eigen::ArrayXcd& q = real.level(level_lo + i);
    for (std::size_t j = 0; j < qs.size(); ++j) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < q.size(); ++c) {
        const double a = std::abs(q[c]);
        if (a > 0.0) s += std::pow(a, qs[j]);
      }
      if (s == 0.0) throw RegimeError("AllCellsZero", "all level products are zero");
      sums(i, j) = s;
    }
  }
  return tau_from_sums(sums, qs, level_lo, level_hi,
                       std::log(static_cast<double>(real.spec().branching())));
}

Eigen::ArrayXd cauchy_profile(const CascadeRealization& real) {
  if (real.depth() < 2)
    throw ValidationError("DepthTooLarge", "cauchy_profile needs depth >= 2");
  const int b = real.spec().branching();
  Eigen::ArrayXd prof(real.depth());
  SamplePath coarse = path(real, 0);
  for (int m = 0; m < real.depth(); ++m) {
    const SamplePath fine = path(real, m + 1);
    double sup = 0.0;
    for (Eigen::Index j = 0; j < fine.values.size(); ++j) {
      const Eigen::Index parent = j / b;
      const int r = static_cast<int>(j % b);
      const Complex interp =
          coarse.values[parent] +
          (static_cast<double>(r) / b) * (coarse.values[parent + 1] - coarse.values[parent]);
      sup = std::max(sup, std::abs(fine.values[j] - interp));
    }
    prof[m] = sup;
    coarse = fine;
  }
  return prof;
}

MonotoneInverse::MonotoneInverse(const SamplePath& p)
    : base_(p.base), level_(p.level) {
  if (!p.real_valued())
    throw ValidationError("NotMonotone", "generalized inverse needs a real path");
  values_ = p.values.real();
  for (Eigen::Index k = 0; k + 1 < values_.size(); ++k)
    if (values_[k + 1] < values_[k])
      throw ValidationError("NotMonotone", "path values must be nondecreasing");
}

double MonotoneInverse::operator()(double y) const {
  const Eigen::Index n = values_.size();
  const double grid = std::pow(static_cast<double>(base_), -level_);
  if (y <= values_[0]) {
    // sup of { t : G(t) <= y }: right endpoint of the initial flat
    Eigen::Index k = 0;
    while (k + 1 < n && values_[k + 1] <= y) ++k;
    return k * grid;
  }
  if (y >= values_[n - 1]) return 1.0;
  // last index with values_[k] <= y
  const double* begin = values_.data();
  Eigen::Index k = std::upper_bound(begin, begin + n, y) - begin - 1;
  if (values_[k] == y) return k * grid;
  return (k + (y - values_[k]) / (values_[k + 1] - values_[k])) * grid;
}

MonotoneInverse invert_monotone(const SamplePath& p) { return MonotoneInverse(p); }

ParametricCurve time_change(const CascadeRealization& real, double beta) {
  const SamplePath companion = coupled_companion(real, beta);
  const SamplePath f = path(real, real.depth());
  ParametricCurve curve;
  curve.times = companion.values.real();
  curve.values = f.values;
  return curve;
}

HolderFit holder_estimate(const ParametricCurve& curve, const CascadeRealization& real,
                          const std::vector<int>& levels) {
  if (levels.size() < 3)
    throw ValidationError("WordTooDeep", "holder_estimate needs >= 3 levels");
  const int b = real.spec().branching();
  const SamplePath full = path(real, real.depth());

  std::vector<double> xs, ys;
  std::int64_t excluded = 0;
  for (int m : levels) {
    if (m < 0 || m > real.depth())
      throw ValidationError("WordTooDeep", "holder level exceeds realization depth");
    const std::int64_t cells = ipow(b, m);
    const std::int64_t span = ipow(b, real.depth() - m);
    const Eigen::ArrayXd osc = oscillations(full, m);
    for (std::int64_t c = 0; c < cells; ++c) {
      const double jlen =
          curve.times[(c + 1) * span] - curve.times[c * span];
      if (jlen <= 0.0 || osc[c] <= 0.0) {
        ++excluded;
        continue;
      }
      xs.push_back(std::log(jlen));
      ys.push_back(std::log(osc[c]));
    }
  }
  if (xs.size() < 2)
    throw RegimeError("DegenerateCells", "no usable cells for the pooled regression");
  HolderFit fit;
  fit.excluded_cells = excluded;
  fit.used_cells = static_cast<std::int64_t>(xs.size());
  const Eigen::Map<const Eigen::ArrayXd> x(xs.data(), xs.size());
  const Eigen::Map<const Eigen::ArrayXd> y(ys.data(), ys.size());
  fit.exponent = line_fit_slope(x, y);
  return fit;
}

}  // namespace cascadelab
