#include <doctest.h>

#include <cmath>
#include <random>

#include "cascadelab/analysis.hpp"
#include "cascadelab/regime.hpp"
#include "helpers.hpp"

using namespace cascadelab;

namespace {

double brute_diameter(const std::vector<Eigen::Vector2d>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, (pts[i] - pts[j]).norm());
  return best;
}

}  // namespace

TEST_CASE("point set diameter equals the pairwise maximum (property)") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    std::vector<Eigen::Vector2d> pts;
    const int n = 2 + static_cast<int>(gen() % 40);
    for (int k = 0; k < n; ++k) pts.emplace_back(unif(gen), unif(gen));
    CHECK(point_set_diameter(pts) == doctest::Approx(brute_diameter(pts)).epsilon(1e-12));
  }
  // collinear and duplicate points
  std::vector<Eigen::Vector2d> line{{0, 0}, {1, 1}, {2, 2}, {1, 1}};
  CHECK(point_set_diameter(line) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("oscillations of basic paths") {
  const auto id = realize(testutil::spec("identity2"), 8, 1);
  const auto p = path(id, 8);
  for (int m : {2, 5}) {
    const auto osc = oscillations(p, m);
    for (Eigen::Index c = 0; c < osc.size(); ++c)
      CHECK(osc[c] == doctest::Approx(std::pow(2.0, -m)).epsilon(1e-12));
  }

  // real nondecreasing path: oscillation equals the increment
  const auto det3 = realize(testutil::spec("det3"), 6, 9);
  const auto comp = coupled_companion(det3, 2.0);
  const auto osc = oscillations(comp, 3);
  for (Eigen::Index c = 0; c < osc.size(); ++c) {
    const double inc =
        (comp.values[(c + 1) * 27] - comp.values[c * 27]).real();
    CHECK(osc[c] == doctest::Approx(inc).epsilon(1e-12));
  }

  // complex cell {0, 1, i, 1+i, 1+i}: diameter sqrt(2)
  SamplePath synth;
  synth.base = 2;
  synth.level = 2;
  synth.values.resize(5);
  synth.values << Complex(0, 0), Complex(1, 0), Complex(0, 1), Complex(1, 1), Complex(1, 1);
  CHECK(oscillations(synth, 0)[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("tau estimate is exact on the identity path") {
  const auto id = realize(testutil::spec("identity2"), 12, 4);
  const auto est = tau_estimate(path(id, 12), {0.5, 1.0, 2.0, 3.0}, 2, 10);
  for (std::size_t j = 0; j < est.q_values.size(); ++j)
    CHECK(est.tau_hat[j] == doctest::Approx(est.q_values[j] - 1.0).epsilon(1e-10));
}

TEST_CASE("tau estimate from per-level increments is exact for constant-modulus laws") {
  // |Q(w)| = b^{-m theta} cell by cell makes tau(q) = theta q - 1 to machine precision
  const auto sign = realize(testutil::spec("sign"), 12, 8);
  const auto est = tau_estimate(sign, {1.0, 2.0, 4.0}, 3, 11);
  CHECK(est.tau_hat[0] == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(est.tau_hat[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(est.tau_hat[2] == doctest::Approx(1.0).epsilon(1e-9));

  const auto levyc = realize(testutil::spec("levyc"), 12, 8);
  const auto est2 = tau_estimate(levyc, {2.0}, 3, 11);
  CHECK(est2.tau_hat[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("tau estimate on the modulus-constant convergent law") {
  const auto levyc = realize(testutil::spec("levyc"), 16, 31);
  const auto est = tau_estimate(path(levyc, 16), {2.0}, 6, 15);
  CHECK(std::abs(est.tau_hat[0]) < 0.1);
}

TEST_CASE("cauchy profile") {
  const auto id = realize(testutil::spec("identity2"), 8, 1);
  const auto prof = cauchy_profile(id);
  for (Eigen::Index m = 0; m < prof.size(); ++m) CHECK(prof[m] < 1e-15);

  // convergent law: log_b profile decreases roughly linearly, with slope at
  // most -max_{q in (1,2]} phi(q)/q + 0.1, pooled over seeds
  const auto conv = testutil::spec_ptr("conv");
  double bound = 0.0;
  for (double q = 1.01; q <= 2.0; q += 0.01)
    bound = std::max(bound, phi(*conv, q) / q);
  const int seeds = 100, depth = 14;
  Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(depth);
  for (int s = 0; s < seeds; ++s) {
    const auto real = realize(conv, depth, 1000 + s);
    mean += cauchy_profile(real).log() / std::log(2.0);
  }
  mean /= seeds;
  // least-squares slope over m
  const int lo = 2;
  const int n = depth - lo;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int m = lo; m < depth; ++m) {
    sx += m;
    sy += mean[m];
    sxx += m * m;
    sxy += m * mean[m];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope <= -bound + 0.1);

  // critical conservative law: the profile still tends to zero
  const auto crit = realize(testutil::spec("crit4"), 9, 12);
  const auto cp = cauchy_profile(crit);
  CHECK(cp[8] < cp[0]);
  CHECK(cp.minCoeff() >= 0.0);
}

TEST_CASE("generalized inverse") {
  const auto id = realize(testutil::spec("identity2"), 8, 1);
  const auto inv = invert_monotone(path(id, 8));
  for (double y : {0.0, 0.125, 0.3, 0.77, 1.0})
    CHECK(inv(y) == doctest::Approx(y).epsilon(1e-12));

  // flat cell: the inverse lands on the right endpoint of the flat
  SamplePath flat;
  flat.base = 2;
  flat.level = 2;
  flat.values.resize(5);
  flat.values << Complex(0, 0), Complex(0.5, 0), Complex(0.5, 0), Complex(0.75, 0),
      Complex(1, 0);
  const auto finv = invert_monotone(flat);
  CHECK(finv(0.5) == doctest::Approx(0.5).epsilon(1e-12));   // t = 2/4
  CHECK(finv(0.25) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(finv(0.75) == doctest::Approx(0.75).epsilon(1e-12));

  // strictly increasing random path: exact piecewise-linear inverse
  const auto conv = realize(testutil::spec("conv"), 8, 77);
  const auto g = path(conv, 8);
  const auto ginv = invert_monotone(g);
  for (Eigen::Index k = 0; k <= 256; k += 13) {
    const double t = k * std::pow(2.0, -8);
    CHECK(ginv(g.values[k].real()) == doctest::Approx(t).epsilon(1e-12));
  }

  // sandwich property at random query points
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    const double y = unif(gen);
    const double t = ginv(y);
    // evaluate G at t and slightly left of t on the grid
    auto eval = [&](double tt) {
      const double x = tt * 256.0;
      const Eigen::Index k = std::min<Eigen::Index>(255, static_cast<Eigen::Index>(x));
      const double frac = x - k;
      return (1 - frac) * g.values[k].real() + frac * g.values[k + 1].real();
    };
    CHECK(eval(t) >= y - 1e-12);
    if (t > 1e-9) CHECK(eval(t - 1e-9) <= y + 1e-12);
  }

  CHECK_THROWS_AS(invert_monotone(path(realize(testutil::spec("clt"), 4, 1), 4)),
                  ValidationError);
}

TEST_CASE("time change knots") {
  // modulus-constant law at beta = 2: the time change is the identity
  const auto levyc = realize(testutil::spec("levyc"), 10, 5);
  const auto curve = time_change(levyc, 2.0);
  const auto f = path(levyc, 10);
  for (Eigen::Index k = 0; k < curve.times.size(); ++k) {
    CHECK(std::abs(curve.times[k] - k * std::pow(2.0, -10)) < 1e-13);
    CHECK(curve.values[k] == f.values[k]);
  }

  // knot consistency is bit-exact against path and companion
  const auto det3 = realize(testutil::spec("det3"), 7, 5);
  const double beta = *solve_beta(det3.spec());
  const auto c3 = time_change(det3, beta);
  const auto comp = coupled_companion(det3, beta);
  const auto f3 = path(det3, 7);
  CHECK((c3.times == comp.values.real()).all());
  CHECK((c3.values == f3.values).all());
  // all weights nonzero: knot times strictly increasing
  for (Eigen::Index k = 0; k + 1 < c3.times.size(); ++k)
    CHECK(c3.times[k + 1] > c3.times[k]);
}

TEST_CASE("holder estimate recovers 1/beta") {
  // identity: oscillation equals cell length exactly, slope 1
  const auto id = realize(testutil::spec("identity2"), 10, 3);
  const auto idc = time_change(id, 1.0);
  const auto idfit = holder_estimate(idc, id, {3, 4, 5, 6});
  CHECK(idfit.exponent == doctest::Approx(1.0).epsilon(1e-6));

  const auto levyc = realize(testutil::spec("levyc"), 16, 2);
  const auto curve = time_change(levyc, 2.0);
  std::vector<int> levels;
  for (int m = 6; m <= 14; ++m) levels.push_back(m);
  const auto fit = holder_estimate(curve, levyc, levels);
  CHECK(std::abs(fit.exponent - 0.5) < 0.05);

  const auto det3 = realize(testutil::spec("det3"), 10, 2);
  const double beta = *solve_beta(det3.spec());
  const auto c3 = time_change(det3, beta);
  const auto fit3 = holder_estimate(c3, det3, {3, 4, 5, 6, 7});
  CHECK(std::abs(fit3.exponent - 1.0 / beta) < 0.08);
}

TEST_CASE("oscillation super-additivity across one refinement (property)") {
  const auto levyc = realize(testutil::spec("levyc"), 10, 44);
  const auto p = path(levyc, 10);
  for (int m : {3, 6}) {
    const auto parent = oscillations(p, m);
    const auto child = oscillations(p, m + 1);
    for (Eigen::Index c = 0; c < parent.size(); ++c) {
      double cmax = 0.0, csum = 0.0;
      for (int i = 0; i < 2; ++i) {
        cmax = std::max(cmax, child[2 * c + i]);
        csum += child[2 * c + i];
      }
      CHECK(parent[c] >= cmax - 1e-12);
      CHECK(parent[c] <= csum + 1e-12);
    }
  }
}
