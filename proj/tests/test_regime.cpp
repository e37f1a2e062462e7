// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "core/channel.hpp"
#include "core/errors.hpp"
#include "core/genie.hpp"
#include "core/regime.hpp"

using namespace tinsum;

namespace {

constexpr double kPi = 3.14159265358979323846;

// independent scalar oracle for the SISO reduction h (1 + h^2 P) = 0.5
double siso_root_oracle(double P) {
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + mid * mid * mid * P - 0.5 <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("threshold_h0 endpoint examples") {
  CHECK(threshold_h0({kPi / 2, 5.0}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(threshold_h0({kPi / 2, 0.0}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(threshold_h0({0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS((void)threshold_h0({-0.1, 1.0}), Error);
  CHECK_THROWS_AS((void)threshold_h0({0.3, -1.0}), Error);
}

TEST_CASE("threshold_h0 at theta = 0 matches the independent SISO oracle") {
  // frozen from the oracle: root of h + h^3 = 0.5
  CHECK(siso_root_oracle(1.0) == doctest::Approx(0.4238537990697857).epsilon(1e-12));
  for (double P : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    CHECK(threshold_h0({0.0, P}) == doctest::Approx(siso_root_oracle(P)).epsilon(1e-9));
    CHECK(siso_threshold(P) == doctest::Approx(siso_root_oracle(P)).epsilon(1e-9));
  }
}

TEST_CASE("threshold_h0 collapses exactly to sin(theta) at theta=pi/4, P=10") {
  // cos(t)/(1 + P sin^2 t) < sin(t) makes h = sin(t) an exact root
  CHECK(threshold_h0({kPi / 4, 10.0}) == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-12));
  CHECK(std::fabs(threshold_residual(std::sin(kPi / 4), kPi / 4, 10.0)) <= 1e-15);
}

TEST_CASE("siso_threshold examples") {
  CHECK(siso_threshold(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(siso_threshold(1e6) < 0.01);
  CHECK(siso_threshold(1.0) == doctest::Approx(threshold_h0({0.0, 1.0})).epsilon(1e-9));
}

TEST_CASE("threshold properties: above sine, root-valid, large-P collapse") {
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double theta = kPi / 2 * i / 19.0;
      const double P = std::pow(10.0, -1.0 + 3.0 * j / 9.0);
      const double h0 = threshold_h0({theta, P});
      CHECK(h0 >= std::sin(theta) - 1e-12);
      CHECK(std::fabs(threshold_residual(h0, theta, P)) <= 1e-9);
    }
  }
  // for each theta >= 0.3, h0 == sin(theta) for all P past the collapse point
  for (int i = 0; i < 12; ++i) {
    const double theta = 0.3 + (kPi / 2 - 0.31) * i / 11.0;
    const double st = std::sin(theta);
    const double p_collapse = std::max(0.0, (std::cos(theta) / st - 1.0) / (st * st));
    for (double mult : {1.0, 2.0, 100.0, 1e4}) {
      const double P = p_collapse * mult + 1e-9;
      CHECK(threshold_h0({theta, P}) == doctest::Approx(st).epsilon(1e-9));
    }
  }
}

TEST_CASE("certify_miso well inside the sine region") {
  const auto sch = make_vector_channel(VectorKind::miso, kPi / 3, 0.9 * std::sin(kPi / 3), 2.0);
  const RegimeVerdict v = certify_miso(sch);
  CHECK(v.classification == Classification::certified_low_interference);
  for (const auto& e : v.evidence) CHECK(e.pass);
  CHECK(v.evidence.size() == 6);
}

TEST_CASE("certify_miso above threshold reports the first broken check") {
  const double theta = 0.6, P = 1.5;
  const double h0 = threshold_h0({theta, P});
  const auto sch = make_vector_channel(VectorKind::miso, theta, h0 + 0.05, P);
  const RegimeVerdict v = certify_miso(sch);
  CHECK(v.classification == Classification::uncertified);
  CHECK_FALSE(v.evidence.back().pass);
  CHECK(v.evidence.back().name == "h_lt_h0");
}

TEST_CASE("certify_miso near the threshold edge, with vanishing genie gap") {
  const double theta = kPi / 4, P = 1.0;
  const double h0 = threshold_h0({theta, P});
  const auto sch = make_vector_channel(VectorKind::miso, theta, 0.99 * h0, P);
  const RegimeVerdict v = certify_miso(sch);
  CHECK(v.classification == Classification::certified_low_interference);

  const MisoGenie g = miso_genie(sch);
  const Vec b = optimal_beam(sch);
  const SymMatrix q = SymMatrix::symmetrized(P * outer(b, b));
  CHECK(std::fabs(diff_rate(sch.to_matrices(), {q, q}, miso_genie_params(g))) <= 1e-9);
}

TEST_CASE("certify_simo mirrors certify_miso across a shared grid") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> th(0.1, kPi / 2 - 0.1), lp(-1.0, 2.0), hf(0.3, 1.4);
  for (int t = 0; t < 100; ++t) {
    const double theta = th(rng), P = std::pow(10.0, lp(rng));
    const double hh = hf(rng) * threshold_h0({theta, P});
    CertifyOptions opts;
    opts.seed = 7 + t;
    opts.trace_samples = 120;
    const auto vm = certify_miso(make_vector_channel(VectorKind::miso, theta, hh, P), opts);
    const auto vs = certify_simo(make_vector_channel(VectorKind::simo, theta, hh, P), opts);
    CHECK(vm.classification == vs.classification);
  }
}

TEST_CASE("certify_simo boundary and failure examples") {
  // h = sin(theta) exactly certifies (edge of the always-certified region),
  // even where the
  // threshold has collapsed onto the sine curve
  const auto edge = make_vector_channel(VectorKind::simo, kPi / 4, std::sin(kPi / 4), 1.0);
  const RegimeVerdict v = certify_simo(edge);
  CHECK(v.classification == Classification::certified_low_interference);

  const auto hot = make_vector_channel(VectorKind::simo, kPi / 4, 1.0, 1.0);
  CHECK(certify_simo(hot).classification == Classification::uncertified);

  CHECK_THROWS_AS((void)certify_simo(make_vector_channel(VectorKind::miso, 0.5, 0.1, 1.0)), Error);
  CHECK_THROWS_AS((void)certify_miso(make_vector_channel(VectorKind::simo, 0.5, 0.1, 1.0)), Error);
}

TEST_CASE("genie parameter bounds hold just below the threshold") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> th(0.05, kPi / 2 - 0.05), lp(-1.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const double theta = th(rng), P = std::pow(10.0, lp(rng));
    const double hh = 0.999 * threshold_h0({theta, P});
    const auto sch = make_vector_channel(VectorKind::miso, theta, hh, P);
    const MisoGenie g = miso_genie(sch);  // would throw if a > 0.5
    CHECK(g.a < 0.5);
    CHECK(g.mu * hh < std::cos(theta));
  }
}

TEST_CASE("sweep_threshold ordering, properties, CSV format") {
  const auto single = sweep_threshold({kPi / 2}, {3.0});
  REQUIRE(single.size() == 1);
  CHECK(single[0].h0 == doctest::Approx(1.0).epsilon(1e-10));

  // P = 1e4 collapses onto sine for theta >= 0.3
  for (double theta : {0.3, 0.6, 1.0, 1.4}) {
    const auto r = sweep_threshold({theta}, {1e4});
    CHECK(r[0].h0 == doctest::Approx(std::sin(theta)).epsilon(1e-10));
  }

  std::vector<double> thetas;
  for (int i = 0; i < 50; ++i) thetas.push_back(0.01 + (kPi / 2 - 0.01) * i / 49.0);
  const std::vector<double> ps{0.1, 1.0, 10.0, 100.0};
  const auto rows = sweep_threshold(thetas, ps);
  REQUIRE(rows.size() == 200);
  int k = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 4; ++j, ++k) {
      CHECK(rows[k].theta == thetas[i]);  // theta-major ordering
      CHECK(rows[k].P == ps[j]);
      CHECK(rows[k].h0 >= rows[k].sin_theta - 1e-12);
    }

  // monotonicity in P is an observation from the sweep, not an invariant:
  // report violations instead of asserting
  int violations = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j + 1 < 4; ++j)
      if (rows[i * 4 + j + 1].h0 > rows[i * 4 + j].h0 + 1e-9) ++violations;
  if (violations > 0)
    MESSAGE("observed ", violations, " P-monotonicity violations (not asserted)");

  const std::string csv = sweep_to_csv({{0.5, 2.0, 0.75, std::sin(0.5)}});
  CHECK(csv.substr(0, 24) == "theta,P,h0,sin_theta\n0.5");
  CHECK(csv.find("0.47942553860420301") != std::string::npos);  // 17 significant digits
}

TEST_CASE("sweep_threshold rejects empty grids") {
  CHECK_THROWS_AS((void)sweep_threshold({}, {1.0}), Error);
  CHECK_THROWS_AS((void)sweep_threshold({0.5}, {}), Error);
}
