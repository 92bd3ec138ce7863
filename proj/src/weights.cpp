#include "cascadelab/weights.hpp"

#include <cmath>

#include "cascadelab/rng.hpp"

namespace cascadelab {

namespace {

constexpr double kZeroTol = 1e-15;

bool is_zero(Complex v) { return std::abs(v) <= kZeroTol; }
bool is_real(Complex v) { return v.imag() == 0.0; }
bool is_unit_modulus(Complex v) { return std::abs(std::abs(v) - 1.0) <= 1e-12; }

// |v|^p through the squared modulus; pow(norm, p/2) stays exact for p = 2.
double abs_pow(Complex v, double p) {
  const double n = std::norm(v);
  if (n == 0.0) return 0.0;
  return std::pow(n, 0.5 * p);
}

void check_probs(const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0) || p > 1.0 + WeightSpec::kProbTol)
      throw ValidationError("BadProbabilities", "atom probabilities must lie in (0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > WeightSpec::kProbTol)
    throw ValidationError("BadProbabilities", "atom probabilities must sum to 1");
}

}  // namespace

Complex powi(Complex z, unsigned q) {
  Complex r(1.0, 0.0);
  while (q) {
    if (q & 1u) r *= z;
    z *= z;
    q >>= 1u;
  }
  return r;
}

WeightSpec WeightSpec::deterministic(const Eigen::VectorXcd& values) {
  WeightSpec s;
  s.b_ = static_cast<int>(values.size());
  s.kind_ = WeightKind::Deterministic;
  s.vector_atoms_.push_back({1.0, values});
  s.finalize();
  return s;
}

WeightSpec WeightSpec::iid(int b, std::vector<IidAtom> atoms) {
  WeightSpec s;
  s.b_ = b;
  s.kind_ = WeightKind::IidComponents;
  s.iid_atoms_ = std::move(atoms);
  std::vector<double> probs;
  for (const auto& a : s.iid_atoms_) probs.push_back(a.prob);
  check_probs(probs);
  s.finalize();
  return s;
}

WeightSpec WeightSpec::mixture(int b, std::vector<VectorAtom> atoms) {
  WeightSpec s;
  s.b_ = b;
  s.kind_ = WeightKind::MixtureOfVectors;
  s.vector_atoms_ = std::move(atoms);
  std::vector<double> probs;
  for (const auto& a : s.vector_atoms_) {
    if (a.values.size() != b)
      throw ValidationError("BadProbabilities", "mixture vector length differs from b");
    probs.push_back(a.prob);
  }
  check_probs(probs);
  s.finalize();
  return s;
}

void WeightSpec::finalize() {
  if (b_ < 2) throw ValidationError("BranchingTooSmall", "branching b must be >= 2");

  const Complex mean = mean_sum();
  if (std::abs(mean - Complex(1.0, 0.0)) > kMeanTol)
    throw ValidationError("MeanNotOne", "E(sum_i W_i) must equal 1 within 1e-9");

  real_ = true;
  nonnegative_ = true;
  has_zero_ = false;
  if (kind_ == WeightKind::IidComponents) {
    for (const auto& a : iid_atoms_) {
      if (!is_real(a.value)) real_ = false;
      if (!is_real(a.value) || a.value.real() < 0.0) nonnegative_ = false;
      if (is_zero(a.value)) has_zero_ = true;
    }
    // i.i.d. components are conservative only when the component law is a
    // point mass forcing sum_i W_i = 1.
    bool single_value = true;
    for (const auto& a : iid_atoms_)
      if (std::abs(a.value - iid_atoms_[0].value) > kConservativeTol) single_value = false;
    conservative_ =
        single_value &&
        std::abs(static_cast<double>(b_) * iid_atoms_[0].value - Complex(1.0, 0.0)) <=
            kConservativeTol;
  } else {
    conservative_ = true;
    for (const auto& a : vector_atoms_) {
      if (std::abs(a.values.sum() - Complex(1.0, 0.0)) > kConservativeTol)
        conservative_ = false;
      for (Eigen::Index i = 0; i < a.values.size(); ++i) {
        const Complex v = a.values[i];
        if (!is_real(v)) real_ = false;
        if (!is_real(v) || v.real() < 0.0) nonnegative_ = false;
        if (is_zero(v)) has_zero_ = true;
      }
    }
  }
}

Complex WeightSpec::mean_sum() const {
  if (kind_ == WeightKind::IidComponents) {
    Complex m(0.0, 0.0);
    for (const auto& a : iid_atoms_) m += a.prob * a.value;
    return static_cast<double>(b_) * m;
  }
  Complex m(0.0, 0.0);
  for (const auto& a : vector_atoms_) m += a.prob * a.values.sum();
  return m;
}

double WeightSpec::abs_moment_sum(double p) const {
  if (kind_ == WeightKind::IidComponents) {
    double m = 0.0;
    for (const auto& a : iid_atoms_) m += a.prob * abs_pow(a.value, p);
    return static_cast<double>(b_) * m;
  }
  double m = 0.0;
  for (const auto& a : vector_atoms_) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.values.size(); ++i) s += abs_pow(a.values[i], p);
    m += a.prob * s;
  }
  return m;
}

double WeightSpec::abs_moment_log_sum(double p) const {
  auto term = [p](Complex v) {
    const double n = std::norm(v);
    if (n == 0.0) return 0.0;  // x^p ln x -> 0
    return std::pow(n, 0.5 * p) * 0.5 * std::log(n);
  };
  if (kind_ == WeightKind::IidComponents) {
    double m = 0.0;
    for (const auto& a : iid_atoms_) m += a.prob * term(a.value);
    return static_cast<double>(b_) * m;
  }
  double m = 0.0;
  for (const auto& a : vector_atoms_) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.values.size(); ++i) s += term(a.values[i]);
    m += a.prob * s;
  }
  return m;
}

Complex WeightSpec::signed_power_sum(int q) const {
  if (kind_ == WeightKind::IidComponents) {
    Complex m(0.0, 0.0);
    for (const auto& a : iid_atoms_) m += a.prob * powi(a.value, static_cast<unsigned>(q));
    return static_cast<double>(b_) * m;
  }
  Complex m(0.0, 0.0);
  for (const auto& a : vector_atoms_) {
    Complex s(0.0, 0.0);
    for (Eigen::Index i = 0; i < a.values.size(); ++i)
      s += powi(a.values[i], static_cast<unsigned>(q));
    m += a.prob * s;
  }
  return m;
}

double WeightSpec::cross_second_moment() const {
  if (kind_ == WeightKind::IidComponents) {
    Complex m(0.0, 0.0);
    for (const auto& a : iid_atoms_) m += a.prob * a.value;
    return static_cast<double>(b_) * static_cast<double>(b_ - 1) * std::norm(m);
  }
  double acc = 0.0;
  for (const auto& a : vector_atoms_) {
    const Complex total = a.values.sum();
    double cross = std::norm(total);
    for (Eigen::Index i = 0; i < a.values.size(); ++i) cross -= std::norm(a.values[i]);
    acc += a.prob * cross;
  }
  return acc;
}

double WeightSpec::max_modulus() const {
  double m = 0.0;
  if (kind_ == WeightKind::IidComponents) {
    for (const auto& a : iid_atoms_) m = std::max(m, std::abs(a.value));
    return m;
  }
  for (const auto& a : vector_atoms_)
    for (Eigen::Index i = 0; i < a.values.size(); ++i)
      m = std::max(m, std::abs(a.values[i]));
  return m;
}

double WeightSpec::expected_unit_count() const {
  if (kind_ == WeightKind::IidComponents) {
    double p = 0.0;
    for (const auto& a : iid_atoms_)
      if (is_unit_modulus(a.value)) p += a.prob;
    return static_cast<double>(b_) * p;
  }
  double acc = 0.0;
  for (const auto& a : vector_atoms_) {
    int units = 0;
    for (Eigen::Index i = 0; i < a.values.size(); ++i)
      if (is_unit_modulus(a.values[i])) ++units;
    acc += a.prob * units;
  }
  return acc;
}

double WeightSpec::prob_single_unit() const {
  if (kind_ == WeightKind::IidComponents) {
    double pu = 0.0;
    for (const auto& a : iid_atoms_)
      if (is_unit_modulus(a.value)) pu += a.prob;
    // exactly one of b i.i.d. components has unit modulus
    return static_cast<double>(b_) * pu * std::pow(1.0 - pu, b_ - 1);
  }
  double acc = 0.0;
  for (const auto& a : vector_atoms_) {
    int units = 0;
    for (Eigen::Index i = 0; i < a.values.size(); ++i)
      if (is_unit_modulus(a.values[i])) ++units;
    if (units == 1) acc += a.prob;
  }
  return acc;
}

Eigen::VectorXd WeightSpec::nonzero_count_distribution() const {
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(b_ + 1);
  if (kind_ == WeightKind::IidComponents) {
    double pz = 0.0;
    for (const auto& a : iid_atoms_)
      if (is_zero(a.value)) pz += a.prob;
    const double pn = 1.0 - pz;
    // N ~ Binomial(b, pn)
    for (int k = 0; k <= b_; ++k) {
      double c = 1.0;
      for (int j = 0; j < k; ++j) c = c * static_cast<double>(b_ - j) / (j + 1);
      dist[k] = c * std::pow(pn, k) * std::pow(pz, b_ - k);
    }
    return dist;
  }
  for (const auto& a : vector_atoms_) {
    int n = 0;
    for (Eigen::Index i = 0; i < a.values.size(); ++i)
      if (!is_zero(a.values[i])) ++n;
    dist[n] += a.prob;
  }
  return dist;
}

std::vector<VectorAtom> WeightSpec::support_vectors(std::size_t max_size) const {
  if (kind_ != WeightKind::IidComponents) return vector_atoms_;
  const std::size_t k = iid_atoms_.size();
  double combos = 1.0;
  for (int i = 0; i < b_; ++i) combos *= static_cast<double>(k);
  if (combos > static_cast<double>(max_size))
    throw ResourceError("TooManyCombinations", "i.i.d. joint support too large to expand");
  const std::size_t total = static_cast<std::size_t>(combos);
  std::vector<VectorAtom> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    VectorAtom atom{1.0, Eigen::VectorXcd(b_)};
    std::size_t c = code;
    for (int i = 0; i < b_; ++i) {
      const auto& a = iid_atoms_[c % k];
      c /= k;
      atom.prob *= a.prob;
      atom.values[i] = a.value;
    }
    out.push_back(std::move(atom));
  }
  return out;
}

double phi(const WeightSpec& spec, double p) {
  if (p == 0.0) return -1.0;  // 0^0 = 1 convention: sum_i |W_i|^0 = b
  if (p < 0.0 && spec.has_zero_weight()) return -std::numeric_limits<double>::infinity();
  const double m = spec.abs_moment_sum(p);
  return -std::log(m) / std::log(static_cast<double>(spec.branching()));
}

double phi_derivative(const WeightSpec& spec, double p) {
  if (!(p > 0.0))
    throw ValidationError("NonFiniteMoment", "phi_derivative requires p > 0");
  const double den = spec.abs_moment_sum(p);
  if (!(den > 0.0) || !std::isfinite(den))
    throw RegimeError("NonFiniteMoment", "E(sum |W_i|^p) not finite and positive");
  const double num = spec.abs_moment_log_sum(p);
  return -num / (std::log(static_cast<double>(spec.branching())) * den);
}

Complex mixed_moment(const WeightSpec& spec, const Eigen::VectorXi& exponents,
                     bool use_modulus) {
  if (exponents.size() != spec.branching())
    throw ValidationError("BadProbabilities", "exponent vector length differs from b");
  for (Eigen::Index i = 0; i < exponents.size(); ++i)
    if (exponents[i] < 0)
      throw ValidationError("BadProbabilities", "mixed_moment exponents must be >= 0");

  auto value_of = [use_modulus](Complex v) {
    return use_modulus ? Complex(std::abs(v), 0.0) : v;
  };

  if (spec.kind() == WeightKind::IidComponents) {
    Complex prod(1.0, 0.0);
    for (Eigen::Index i = 0; i < exponents.size(); ++i) {
      const unsigned e = static_cast<unsigned>(exponents[i]);
      Complex m(0.0, 0.0);
      for (const auto& a : spec.iid_atoms()) m += a.prob * powi(value_of(a.value), e);
      prod *= m;
    }
    return prod;
  }
  Complex acc(0.0, 0.0);
  for (const auto& a : spec.vector_atoms()) {
    Complex term(1.0, 0.0);
    for (Eigen::Index i = 0; i < exponents.size(); ++i)
      term *= powi(value_of(a.values[i]), static_cast<unsigned>(exponents[i]));
    acc += a.prob * term;
  }
  return acc;
}

WeightSpec power_transform(const WeightSpec& spec, double beta) {
  if (!(beta > 0.0))
    throw RegimeError("NonFinitePhi", "power_transform requires beta > 0");
  const double m = spec.abs_moment_sum(beta);
  if (!(m > 0.0) || !std::isfinite(m))
    throw RegimeError("NonFinitePhi", "phi_W(beta) is not finite");
  const double scale = 1.0 / m;  // b^{phi(beta)} without a log/exp round trip

  auto transform = [beta, scale](Complex v) {
    const double n = std::norm(v);
    return Complex(n == 0.0 ? 0.0 : scale * std::pow(n, 0.5 * beta), 0.0);
  };

  if (spec.kind() == WeightKind::IidComponents) {
    std::vector<IidAtom> atoms;
    for (const auto& a : spec.iid_atoms()) atoms.push_back({a.prob, transform(a.value)});
    return WeightSpec::iid(spec.branching(), std::move(atoms));
  }
  std::vector<VectorAtom> atoms;
  for (const auto& a : spec.vector_atoms()) {
    VectorAtom out{a.prob, Eigen::VectorXcd(a.values.size())};
    for (Eigen::Index i = 0; i < a.values.size(); ++i) out.values[i] = transform(a.values[i]);
    atoms.push_back(std::move(out));
  }
  if (spec.kind() == WeightKind::Deterministic)
    return WeightSpec::deterministic(atoms[0].values);
  return WeightSpec::mixture(spec.branching(), std::move(atoms));
}

Eigen::VectorXcd sample_weights(const WeightSpec& spec, NodeKey key, std::uint64_t seed) {
  const std::uint64_t node = rng::node_state(seed, static_cast<std::uint64_t>(key.level),
                                             static_cast<std::uint64_t>(key.index));
  const int b = spec.branching();
  Eigen::VectorXcd out(b);
  switch (spec.kind()) {
    case WeightKind::Deterministic:
      return spec.vector_atoms()[0].values;
    case WeightKind::IidComponents: {
      for (int i = 0; i < b; ++i) {
        const double u = rng::channel_uniform(node, static_cast<std::uint64_t>(i));
        double cum = 0.0;
        Complex v = spec.iid_atoms().back().value;
        for (const auto& a : spec.iid_atoms()) {
          cum += a.prob;
          if (u < cum) {
            v = a.value;
            break;
          }
        }
        out[i] = v;
      }
      return out;
    }
    case WeightKind::MixtureOfVectors: {
      const double u = rng::channel_uniform(node, 0);
      double cum = 0.0;
      for (const auto& a : spec.vector_atoms()) {
        cum += a.prob;
        if (u < cum) return a.values;
      }
      return spec.vector_atoms().back().values;
    }
  }
  return out;
}

}  // namespace cascadelab
