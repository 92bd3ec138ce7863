#include <doctest.h>

#include <cmath>
#include <random>

#include "cascadelab/rng.hpp"
#include "cascadelab/weights.hpp"
#include "helpers.hpp"

using namespace cascadelab;

namespace {

Eigen::VectorXcd vec2(Complex a, Complex b) {
  Eigen::VectorXcd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("validation accepts the basic laws and caches flags") {
  const auto id2 = testutil::spec("identity2");
  CHECK(id2.conservative());
  CHECK(id2.nonnegative());
  CHECK(!id2.has_zero_weight());

  const auto signed_iid = WeightSpec::iid(2, {{0.6, Complex(1.0, 0.0)},
                                              {0.4, Complex(-0.25, 0.0)}});
  CHECK(!signed_iid.conservative());
  CHECK(signed_iid.real_valued());
  CHECK(!signed_iid.nonnegative());

  const auto levyc = testutil::spec("levyc");
  CHECK(levyc.conservative());
  CHECK(!levyc.real_valued());
}

TEST_CASE("validation rejects broken inputs") {
  CHECK_THROWS_AS(WeightSpec::deterministic(vec2(0.7, 0.7)), ValidationError);
  CHECK_THROWS_AS(WeightSpec::iid(2, {{0.7, Complex(1.0, 0.0)},
                                      {0.4, Complex(-0.25, 0.0)}}),
                  ValidationError);
  CHECK_THROWS_AS(WeightSpec::iid(2, {{-0.1, Complex(1.0, 0.0)},
                                      {1.1, Complex(0.5, 0.0)}}),
                  ValidationError);
  Eigen::VectorXcd one(1);
  one << Complex(1.0, 0.0);
  CHECK_THROWS_AS(WeightSpec::deterministic(one), ValidationError);
}

TEST_CASE("phi on closed-form specs") {
  const auto id2 = testutil::spec("identity2");
  CHECK(phi(id2, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi(id2, 5.5) == doctest::Approx(4.5).epsilon(1e-12));

  const auto levyc = testutil::spec("levyc");
  CHECK(std::abs(phi(levyc, 2.0)) < 1e-14);
  CHECK(phi(levyc, 4.0) == doctest::Approx(1.0).epsilon(1e-12));

  const auto conv = testutil::spec("conv");
  CHECK(phi(conv, 2.0) == doctest::Approx(-std::log2(0.68)).epsilon(1e-12));

  CHECK(phi(id2, 0.0) == -1.0);
  const auto extinct = testutil::spec("extinct");
  CHECK(phi(extinct, 0.0) == -1.0);
  CHECK(phi(extinct, -1.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("phi_derivative on closed-form specs") {
  const auto id2 = testutil::spec("identity2");
  const auto levyc = testutil::spec("levyc");
  for (double p : {0.5, 1.0, 2.0, 3.7}) {
    CHECK(phi_derivative(id2, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi_derivative(levyc, p) == doctest::Approx(0.5).epsilon(1e-12));
  }
  const auto pm1 = WeightSpec::iid(2, {{0.75, Complex(1.0, 0.0)},
                                       {0.25, Complex(-1.0, 0.0)}});
  CHECK(std::abs(phi_derivative(pm1, 1.7)) < 1e-14);
}

TEST_CASE("mixed moments") {
  const auto clt = testutil::spec("clt");
  Eigen::VectorXi e22(2);
  e22 << 2, 2;
  CHECK(mixed_moment(clt, e22).real() == doctest::Approx(0.390625).epsilon(1e-14));

  Eigen::VectorXi zero(2);
  zero << 0, 0;
  CHECK(mixed_moment(clt, zero).real() == doctest::Approx(1.0));

  const auto det3 = testutil::spec("det3");
  Eigen::VectorXi ones(3);
  ones << 1, 1, 1;
  CHECK(mixed_moment(det3, ones).real() == doctest::Approx(-0.27).epsilon(1e-14));
}

TEST_CASE("power transform") {
  const auto levyc = testutil::spec("levyc");
  const auto t = power_transform(levyc, 2.0);
  CHECK(t.kind() == WeightKind::Deterministic);
  CHECK(t.vector_atoms()[0].values[0].real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t.vector_atoms()[0].values[1].real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t.conservative());

  const auto sign = testutil::spec("sign");
  const auto s2 = power_transform(sign, 2.0);
  for (const auto& a : s2.iid_atoms())
    CHECK(a.value.real() == doctest::Approx(0.5).epsilon(1e-12));

  // phi_{W^(beta)}(1) = 0 is forced by the normalization
  for (const char* name : {"clt", "conv", "det3", "degen"}) {
    const auto s = testutil::spec(name);
    for (double beta : {0.7, 1.3, 2.0, 3.5})
      CHECK(std::abs(phi(power_transform(s, beta), 1.0)) < 1e-12);
  }
}

TEST_CASE("phi identity of the power transform (property)") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> unif(0.5, 6.0);
  for (const char* name : {"clt", "conv", "levyc", "det3", "crit4"}) {
    const auto s = testutil::spec(name);
    for (int it = 0; it < 25; ++it) {
      const double p = unif(gen), beta = unif(gen);
      const double lhs = phi(power_transform(s, beta), p);
      const double rhs = phi(s, beta * p) - p * phi(s, beta);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("phi concavity and phi(1) sign (property)") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unif(1e-3, 8.0);
  for (const char* name :
       {"identity2", "levyc", "sign", "clt", "conv", "degen", "crit4", "det3", "extinct"}) {
    const auto s = testutil::spec(name);
    CHECK(phi(s, 1.0) <= 1e-12);
    if (s.nonnegative()) CHECK(std::abs(phi(s, 1.0)) < 1e-12);
    for (int it = 0; it < 40; ++it) {
      double p1 = unif(gen), p2 = unif(gen), p3 = unif(gen);
      if (p1 > p2) std::swap(p1, p2);
      if (p2 > p3) std::swap(p2, p3);
      if (p1 > p2) std::swap(p1, p2);
      if (p3 - p1 < 1e-6) continue;
      const double t = (p2 - p1) / (p3 - p1);
      const double chord = (1.0 - t) * phi(s, p1) + t * phi(s, p3);
      CHECK(phi(s, p2) >= chord - 1e-10);
    }
  }
}

TEST_CASE("unit-pattern mixed moments recover b^{-phi(p)}") {
  for (const char* name : {"clt", "conv", "levyc", "det3"}) {
    const auto s = testutil::spec(name);
    for (int q : {1, 2, 3}) {
      double total = 0.0;
      for (int i = 0; i < s.branching(); ++i) {
        Eigen::VectorXi e = Eigen::VectorXi::Zero(s.branching());
        e[i] = q;
        total += mixed_moment(s, e, /*use_modulus=*/true).real();
      }
      const double expect = std::pow(static_cast<double>(s.branching()),
                                     -phi(s, static_cast<double>(q)));
      CHECK(total == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("sampling is a pure function of (spec, seed, key)") {
  const auto det3 = testutil::spec("det3");
  const auto w = sample_weights(det3, {5, 11}, 42);
  CHECK(w[0].real() == doctest::Approx(0.9));

  const auto clt = testutil::spec("clt");
  const auto a = sample_weights(clt, {7, 1234}, 99);
  const auto b = sample_weights(clt, {7, 1234}, 99);
  CHECK((a - b).norm() == 0.0);
  const auto c = sample_weights(clt, {7, 1235}, 99);
  const auto d = sample_weights(clt, {8, 1234}, 99);
  const auto e = sample_weights(clt, {7, 1234}, 100);
  // different keys give different draws somewhere
  CHECK(((a - c).norm() != 0.0 || (a - d).norm() != 0.0 || (a - e).norm() != 0.0));
}

TEST_CASE("empirical atom frequencies match the law") {
  const auto clt = testutil::spec("clt");
  const int trials = 100000;
  int hits = 0;
  for (int k = 0; k < trials; ++k) {
    const auto w = sample_weights(clt, {3, k}, 2024);
    for (int i = 0; i < 2; ++i)
      if (std::abs(w[i].real() - 1.0) < 1e-12) ++hits;
  }
  const double p = 0.6;
  const double n = 2.0 * trials;
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(hits / n - p) < 3.0 * se);
}

TEST_CASE("support vectors expand the iid law") {
  const auto conv = testutil::spec("conv");
  const auto sup = conv.support_vectors();
  CHECK(sup.size() == 4);
  double total = 0.0;
  for (const auto& a : sup) total += a.prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}
