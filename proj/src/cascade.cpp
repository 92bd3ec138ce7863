#include "cascadelab/cascade.hpp"

#include <cmath>

#include "cascadelab/parallel.hpp"

namespace cascadelab {

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

namespace {

void check_size(int b, int depth, bool allow_large) {
  if (depth < 0) throw ValidationError("DepthTooLarge", "depth must be >= 0");
  double leaves = 1.0;
  for (int i = 0; i < depth; ++i) {
    leaves *= b;
    if (!allow_large && leaves > static_cast<double>(kMaxLeaves))
      throw ResourceError("DepthTooLarge",
                          "b^depth exceeds 2^26 nodes; pass the override to proceed");
  }
}

}  // namespace

CascadeRealization::CascadeRealization(std::shared_ptr<const WeightSpec> spec, int depth,
                                       std::uint64_t seed, bool allow_large)
    : spec_(std::move(spec)), seed_(seed), depth_(0) {
  q_levels_.push_back(Eigen::ArrayXcd::Constant(1, Complex(1.0, 0.0)));
  build_levels(depth, allow_large);
}

void CascadeRealization::build_levels(int upto, bool allow_large) {
  check_size(spec_->branching(), upto, allow_large);
  const int b = spec_->branching();
  for (int lvl = depth_ + 1; lvl <= upto; ++lvl) {
    const Eigen::ArrayXcd& parents = q_levels_[lvl - 1];
    Eigen::ArrayXcd children(parents.size() * b);
    par::for_index(parents.size(), [&](std::int64_t j) {
      const Eigen::VectorXcd w = sample_weights(*spec_, NodeKey{lvl - 1, j}, seed_);
      const Complex q = parents[j];
      for (int i = 0; i < b; ++i) children[j * b + i] = q * w[i];
    });
    q_levels_.push_back(std::move(children));
  }
  depth_ = std::max(depth_, upto);
}

void CascadeRealization::extend(int new_depth, bool allow_large) {
  if (new_depth < depth_)
    throw ValidationError("DepthTooLarge", "extend cannot shrink a realization");
  build_levels(new_depth, allow_large);
}

CascadeRealization realize(std::shared_ptr<const WeightSpec> spec, int depth,
                           std::uint64_t seed, bool allow_large) {
  return CascadeRealization(std::move(spec), depth, seed, allow_large);
}

CascadeRealization realize(const WeightSpec& spec, int depth, std::uint64_t seed,
                           bool allow_large) {
  return CascadeRealization(std::make_shared<const WeightSpec>(spec), depth, seed,
                            allow_large);
}

CascadeRealization extend(const CascadeRealization& real, int new_depth,
                          bool allow_large) {
  CascadeRealization out = real;
  out.extend(new_depth, allow_large);
  return out;
}

SamplePath path(const CascadeRealization& real, int m) {
  if (m < 0 || m > real.depth())
    throw ValidationError("WordTooDeep", "path level exceeds realization depth");
  const Eigen::ArrayXcd& q = real.level(m);
  SamplePath p;
  p.base = real.spec().branching();
  p.level = m;
  p.values.resize(q.size() + 1);
  Complex acc(0.0, 0.0);
  p.values[0] = acc;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    acc += q[k];
    p.values[k + 1] = acc;
  }
  return p;
}

Complex increment(const CascadeRealization& real, const std::vector<int>& word, int n) {
  if (n > real.depth() || static_cast<int>(word.size()) > n)
    throw ValidationError("WordTooDeep", "increment level exceeds realization depth");
  const int b = real.spec().branching();
  std::int64_t index = 0;
  for (int digit : word) {
    if (digit < 0 || digit >= b)
      throw ValidationError("WordTooDeep", "word digit outside [0, b)");
    index = index * b + digit;
  }
  const std::int64_t span = ipow(b, n - static_cast<int>(word.size()));
  return real.level(n).segment(index * span, span).sum();
}

SamplePath coupled_companion(const CascadeRealization& real, double beta) {
  const double m = real.spec().abs_moment_sum(beta);
  if (!(beta > 0.0) || !(m > 0.0) || !std::isfinite(m))
    throw RegimeError("NonFinitePhi", "companion requires finite phi(beta)");
  const int n = real.depth();
  // b^{n phi(beta)} = m^{-n}, kept in exact product form
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale /= m;

  const Eigen::ArrayXcd& q = real.level(n);
  SamplePath p;
  p.base = real.spec().branching();
  p.level = n;
  p.values.resize(q.size() + 1);
  double acc = 0.0;
  p.values[0] = Complex(0.0, 0.0);
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const double nq = std::norm(q[k]);
    acc += nq == 0.0 ? 0.0 : scale * std::pow(nq, 0.5 * beta);
    p.values[k + 1] = Complex(acc, 0.0);
  }
  return p;
}

double max_level_product(const CascadeRealization& real, int m) {
  if (m < 0 || m > real.depth())
    throw ValidationError("WordTooDeep", "level exceeds realization depth");
  return std::sqrt(real.level(m).abs2().maxCoeff());
}

}  // namespace cascadelab
