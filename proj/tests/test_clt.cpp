#include <doctest.h>

#include <cmath>

#include "cascadelab/clt.hpp"
#include "cascadelab/moments.hpp"
#include "cascadelab/parallel.hpp"
#include "cascadelab/regime.hpp"
#include "helpers.hpp"

using namespace cascadelab;

TEST_CASE("ensemble guards") {
  CHECK_THROWS_AS(normalized_ensemble(testutil::spec_ptr("levyc"), 6, 100, 1),
                  Error);  // conservative (and complex)
  CHECK_THROWS_AS(normalized_ensemble(testutil::spec_ptr("conv"), 6, 100, 1),
                  RegimeError);
  CHECK_THROWS_AS(reference_sample(testutil::spec_ptr("sign"), 6, 1, 1),
                  ValidationError);  // count >= 2
  CHECK_THROWS_AS(residual_ensemble(testutil::spec_ptr("conv"), 6, 0, 100, 1),
                  ValidationError);  // DegenerateTail
  CHECK_THROWS_AS(residual_ensemble(testutil::spec_ptr("clt"), 6, 10, 100, 1),
                  RegimeError);
}

TEST_CASE("ensembles are deterministic in (spec, n, count, seed)") {
  const auto spec = testutil::spec_ptr("sign");
  const auto a = normalized_ensemble(spec, 6, 500, 99);
  const auto b = normalized_ensemble(spec, 6, 500, 99);
  CHECK((a.values == b.values).all());
  const auto c = normalized_ensemble(spec, 6, 500, 100);
  CHECK(!(c.values == a.values).all());

  // worker count does not change the values
  par::set_worker_threads(4);
  const auto d = normalized_ensemble(spec, 6, 500, 99);
  par::set_worker_threads(1);
  CHECK((d.values == a.values).all());
}

TEST_CASE("normalized ensemble matches the exact moment recursion") {
  const auto spec = testutil::spec_ptr("sign");
  const int n = 10, count = 5000;
  const auto sample = normalized_ensemble(spec, n, count, 12);
  const auto lines = moment_report(sample, {1, 2, 3, 4});
  for (const auto& line : lines) {
    REQUIRE(line.target.has_value());
    if (line.order == 2 || line.order == 4)
      CHECK(std::abs(line.empirical - *line.target) < 3.0 * line.std_error);
  }
  // the order-2 target is the closed-form v_n / sigma_n^2
  CHECK(*lines[1].target == doctest::Approx((n + 2.0) / n).epsilon(1e-12));
}

TEST_CASE("moment matching at depth 14 for both CLT example specs") {
  for (const char* name : {"sign", "clt"}) {
    const auto spec = testutil::spec_ptr(name);
    const auto sample = normalized_ensemble(spec, 14, 5000, 3);
    for (const auto& line : moment_report(sample, {2, 4})) {
      REQUIRE(line.target.has_value());
      CHECK(std::abs(line.empirical - *line.target) < 3.0 * line.std_error);
    }
  }
}

TEST_CASE("reference sample of the sign law is exactly standard normal") {
  // W^(2) is the identity cascade, so the companion mass is 1
  const auto spec = testutil::spec_ptr("sign");
  const auto ref = reference_sample(spec, 8, 4000, 5);
  CHECK(ks_distance_to_normal(ref.values) < 1.36 / std::sqrt(4000.0) * 1.5);

  // symmetry: odd empirical moments vanish within 3 SE
  for (const auto& line : moment_report(ref, {1, 3}))
    CHECK(std::abs(line.empirical) < 3.0 * line.std_error);
}

TEST_CASE("two-sample KS statistic") {
  const auto spec = testutil::spec_ptr("sign");
  const auto a = reference_sample(spec, 6, 3000, 7);
  CHECK(ks_distance(a, a) == 0.0);
  const auto b = reference_sample(spec, 6, 3000, 8);
  // both exactly N(0,1): the distance sits under the 95% two-sample band
  CHECK(ks_distance(a, b) <= 1.36 * std::sqrt(2.0 / 3000.0));
}

TEST_CASE("residual ensemble") {
  const auto spec = testutil::spec_ptr("conv");
  // sigma of the residual normalization is sqrt(m_2 - 1) = 0.75
  CHECK(std::sqrt(limit_moment_convergent(*spec, 2) - 1.0) ==
        doctest::Approx(0.75).epsilon(1e-12));

  const auto rn = residual_ensemble(spec, 6, 8, 4000, 21);
  double var = 0.0;
  for (Eigen::Index i = 0; i < rn.values.size(); ++i) var += rn.values[i] * rn.values[i];
  var /= rn.values.size();
  // truncation leaves (1 - 0.68^tail) of the variance
  const double expect = 1.0 - std::pow(0.68, 8);
  CHECK(std::abs(var - expect) < 0.06);
}

TEST_CASE("comparison report carries the companion bias") {
  const auto spec = testutil::spec_ptr("clt");
  const auto zn = normalized_ensemble(spec, 8, 400, 2);
  const auto ref = reference_sample(spec, 8, 400, 2);
  const auto rep = compare_ensembles(zn, ref, {2, 4});
  REQUIRE(rep.reference_bias.has_value());
  const auto companion = power_transform(*spec, 2.0);
  const double expect =
      3.0 * (second_moment_exact(companion, 8) - limit_moment_convergent(companion, 2));
  CHECK(*rep.reference_bias == doctest::Approx(expect).epsilon(1e-12));
  CHECK(rep.ks_statistic > 0.0);
  CHECK(rep.ks_statistic <= 1.0);
}

TEST_CASE("path snapshots") {
  const auto spec = testutil::spec_ptr("sign");
  const auto zn = normalized_ensemble(spec, 9, 50, 4, /*keep_paths=*/true);
  REQUIRE(zn.paths.rows() == 50);
  REQUIRE(zn.paths.cols() == 256);
  // the last snapshot cell is the terminal value
  for (int r = 0; r < 50; ++r)
    CHECK(zn.paths(r, 255) == doctest::Approx(zn.values[r]).epsilon(1e-9));
}
