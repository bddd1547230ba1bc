#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "intrep/matched_pairs.hpp"
#include "intrep/two_group.hpp"
#include "support/stat_test_utils.hpp"

using namespace intrep;

namespace {

StratumData gen(StratumFamily family, double psi, int m, std::uint64_t seed, int r_max = 4) {
  StrataGenSpec spec;
  spec.family = family;
  spec.psi = psi;
  spec.m = m;
  spec.r_max = r_max;
  RngStream rng(seed, 0);
  return gen_strata(spec, rng);
}

}  // namespace

TEST_CASE("normal_u point values", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::normal;
  s.s1 = {2.5};
  s.s0 = {1.0};
  s.r1 = {1};
  s.r0 = {1};
  CHECK(normal_u(s, 1.5, 1.0).values[0] == Catch::Approx(0.5).margin(1e-14));
  // Unit variance: tau (1/1 + 1/1) = 1 with tau = 0.5.
  s.s1 = {2.0};
  s.s0 = {0.0};
  CHECK(normal_u(s, 1.0, 0.5).values[0] ==
        Catch::Approx(normal_cdf(1.0)).margin(1e-12));
  CHECK_THROWS_AS(normal_u(s, 1.0, 0.0), std::domain_error);
}

TEST_CASE("normal_u is uniform under the null with plug-in estimates", "[two_group]") {
  const StratumData s = gen(StratumFamily::normal, 1.0, 2000, 201);
  const NormalEstimate est = normal_estimate(s);
  CHECK(test_support::ks_uniform_pass(normal_u(s, est.psi_hat, est.tau_hat).values, 0.01));
}

TEST_CASE("normal_estimate hand-computed case", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::normal;
  s.s1 = {0.0, 2.0};
  s.s0 = {0.0, 0.0};
  s.r1 = {1, 1};
  s.r0 = {1, 1};
  const NormalEstimate est = normal_estimate(s);
  CHECK(est.psi_hat == Catch::Approx(1.0).margin(1e-14));
  CHECK(est.tau_hat == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("normal_estimate is consistent", "[two_group]") {
  const StratumData s = gen(StratumFamily::normal, 1.5, 20000, 202);
  const NormalEstimate est = normal_estimate(s);
  // Weighted SE is 1/sqrt(sum w) <= sqrt(2/m) here.
  CHECK(est.psi_hat == Catch::Approx(1.5).margin(3.0 * std::sqrt(2.0 / 20000)));
  CHECK(est.tau_hat == Catch::Approx(1.0).epsilon(0.05));
}

TEST_CASE("balanced strata reduce to the plain mean of differences", "[two_group]") {
  StratumData s = gen(StratumFamily::normal, 0.7, 50, 203, 1);  // all r = 1
  const NormalEstimate est = normal_estimate(s);
  double zbar = 0.0;
  for (int j = 0; j < s.m(); ++j) zbar += s.s1[j] - s.s0[j];
  zbar /= s.m();
  CHECK(est.psi_hat == Catch::Approx(zbar).margin(1e-12));
}

TEST_CASE("poisson_u randomizes an empty stratum to a plain uniform", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::poisson;
  s.s1 = {0.0};
  s.s0 = {0.0};
  s.r1 = {2};
  s.r0 = {3};
  RngStream rng(204, 0);
  RngStream rng_copy(204, 0);
  const double u = poisson_u(s, 1.3, rng).values[0];
  CHECK(u == Catch::Approx(rng_copy.uniform01()).margin(1e-15));
}

TEST_CASE("poisson_u pushes the upper tail toward one", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::poisson;
  s.s1 = {40.0};
  s.s0 = {0.0};
  s.r1 = {1};
  s.r0 = {1};
  RngStream rng(205, 0);
  CHECK(poisson_u(s, 1.0, rng).values[0] > 0.999);
}

TEST_CASE("poisson_u is exactly uniform under the null", "[two_group]") {
  const StratumData s = gen(StratumFamily::poisson, 2.0, 5000, 206);
  RngStream rng(206, 1);
  CHECK(test_support::ks_uniform_pass(poisson_u(s, 2.0, rng).values, 0.01));
}

TEST_CASE("poisson_u is deterministic given the stream", "[two_group]") {
  const StratumData s = gen(StratumFamily::poisson, 1.0, 100, 207);
  RngStream a(207, 9), b(207, 9);
  const USample ua = poisson_u(s, 1.0, a);
  const USample ub = poisson_u(s, 1.0, b);
  for (int j = 0; j < ua.m(); ++j) CHECK(ua.values[j] == ub.values[j]);
}

TEST_CASE("poisson_mle on a symmetric stratum", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::poisson;
  s.s1 = {5.0};
  s.s0 = {5.0};
  s.r1 = {1};
  s.r0 = {1};
  CHECK(poisson_mle(s) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("poisson_mle is consistent", "[two_group]") {
  StrataGenSpec spec;
  spec.family = StratumFamily::poisson;
  spec.psi = 2.0;
  spec.m = 5000;
  spec.r_max = 5;
  RngStream rng(208, 0);
  const StratumData s = gen_strata(spec, rng);
  CHECK(poisson_mle(s) == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("swapping poisson treatment labels inverts the estimate", "[two_group]") {
  StratumData s = gen(StratumFamily::poisson, 1.7, 400, 209);
  const double psi_hat = poisson_mle(s);
  std::swap(s.s1, s.s0);
  std::swap(s.r1, s.r0);
  CHECK(poisson_mle(s) == Catch::Approx(1.0 / psi_hat).epsilon(1e-8));
}

TEST_CASE("poisson_mle flags boundary data", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::poisson;
  s.s1 = {0.0, 0.0};
  s.s0 = {3.0, 1.0};
  s.r1 = {1, 2};
  s.r0 = {1, 1};
  CHECK_THROWS_AS(poisson_mle(s), std::runtime_error);
}

TEST_CASE("gamma_f_u point value and reduction to the pair transform", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::gamma;
  s.s1 = {1.0};
  s.s0 = {1.0};
  s.r1 = {1};
  s.r0 = {1};
  CHECK(gamma_f_u(s, 1.0).values[0] == Catch::Approx(0.5).margin(1e-13));

  const StratumData unit = gen(StratumFamily::gamma, 1.4, 200, 210, 1);
  PairData pairs;
  pairs.y1 = unit.s1;
  pairs.y0 = unit.s0;
  const USample a = gamma_f_u(unit, 0.9);
  const USample b = mult_u(pairs, 0.9);
  for (int j = 0; j < a.m(); ++j) {
    CHECK(a.values[j] == Catch::Approx(b.values[j]).margin(1e-12));
  }
}

TEST_CASE("gamma_f_u is uniform under the null", "[two_group]") {
  const StratumData s = gen(StratumFamily::gamma, 2.0, 5000, 211);
  CHECK(test_support::ks_uniform_pass(gamma_f_u(s, 2.0).values, 0.01));
}

TEST_CASE("gamma_mle reduces to mult_mle for unit strata", "[two_group]") {
  const StratumData unit = gen(StratumFamily::gamma, 1.4, 500, 212, 1);
  PairData pairs;
  pairs.y1 = unit.s1;
  pairs.y0 = unit.s0;
  CHECK(gamma_mle(unit) == Catch::Approx(mult_mle(pairs)).epsilon(1e-6));
}

TEST_CASE("gamma_mle single symmetric stratum and consistency", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::gamma;
  s.s1 = {2.0};
  s.s0 = {2.0};
  s.r1 = {1};
  s.r0 = {1};
  CHECK(gamma_mle(s) == Catch::Approx(1.0).margin(1e-8));

  const StratumData big = gen(StratumFamily::gamma, 2.0, 10000, 213);
  CHECK(gamma_mle(big) == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("stratum validation catches malformed inputs", "[two_group]") {
  StratumData s;
  s.family = StratumFamily::poisson;
  s.s1 = {1.5};  // not an integer count
  s.s0 = {1.0};
  s.r1 = {1};
  s.r0 = {1};
  CHECK_THROWS_AS(s.validate(), std::domain_error);
  s.family = StratumFamily::gamma;
  s.s1 = {0.0};
  CHECK_THROWS_AS(s.validate(), std::domain_error);
  s.family = StratumFamily::normal;
  s.r1 = {0};
  CHECK_THROWS_AS(s.validate(), std::domain_error);
}
