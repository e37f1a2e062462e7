// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "tinsum.h"

namespace {

constexpr double kPi = 3.14159265358979323846;

struct ChannelGuard {
  tinsum_channel* h = nullptr;
  ~ChannelGuard() { tinsum_channel_free(h); }
};

} // namespace

TEST_CASE("channel creation, dims, and validation errors") {
  ChannelGuard ch;
  const double h11[] = {1.0, 0.0, 0.0, 1.0};
  const double hx[] = {0.1, 0.0, 0.0, 0.1};
  REQUIRE(tinsum_channel_create_mimo(h11, hx, hx, h11, 2, 2, 2, 2, 1.0, 1.0, &ch.h) == TINSUM_OK);
  int rx1 = 0, rx2 = 0, tx1 = 0, tx2 = 0;
  tinsum_channel_dims(ch.h, &rx1, &rx2, &tx1, &tx2);
  CHECK(rx1 == 2);
  CHECK(tx2 == 2);
  CHECK(tinsum_channel_is_vector(ch.h) == 0);

  tinsum_channel* bad = nullptr;
  CHECK(tinsum_channel_create_mimo(h11, hx, hx, h11, 2, 2, 2, 2, -1.0, 1.0, &bad) ==
        TINSUM_ERR_INVALID_INPUT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(tinsum_last_error()) > 0);

  ChannelGuard vec;
  REQUIRE(tinsum_channel_create_vector(0, kPi / 4, 0.5, 1.0, &vec.h) == TINSUM_OK);
  CHECK(tinsum_channel_is_vector(vec.h) == 1);
  tinsum_channel_dims(vec.h, &rx1, &rx2, &tx1, &tx2);
  CHECK(rx1 == 1);
  CHECK(tx1 == 2);

  tinsum_channel* bad2 = nullptr;
  CHECK(tinsum_channel_create_vector(7, 0.5, 0.5, 1.0, &bad2) == TINSUM_ERR_INVALID_INPUT);
}

TEST_CASE("tin and genie-aided rates through the C surface") {
  ChannelGuard ch;
  REQUIRE(tinsum_channel_create_vector(0, kPi / 4, 0.5, 1.0, &ch.h) == TINSUM_OK);

  // Q = P b b^T with b from the rank-one inverse beam
  const double hp = 1.0 + 0.25;
  const double ct = std::cos(kPi / 4), st = std::sin(kPi / 4);
  double b0 = ct / hp, b1 = st;
  const double nb = std::hypot(b0, b1);
  b0 /= nb;
  b1 /= nb;
  const double q[] = {b0 * b0, b0 * b1, b0 * b1, b1 * b1};
  double rate = 0;
  REQUIRE(tinsum_tin_sum_rate(ch.h, q, q, &rate) == TINSUM_OK);
  CHECK(rate == doctest::Approx(std::log2(1.9)).epsilon(1e-12));

  // independent genie (a = 0, sigma = 1) cannot reduce the rate
  const double a0[] = {0.0};
  const double s1[] = {1.0};
  double ga = 0;
  REQUIRE(tinsum_ga_sum_rate(ch.h, q, q, a0, a0, s1, s1, &ga) == TINSUM_OK);
  CHECK(ga >= rate - 1e-12);

  // invalid genie block: |a| > sigma
  const double abig[] = {2.0};
  CHECK(tinsum_ga_sum_rate(ch.h, q, q, abig, abig, s1, s1, &ga) == TINSUM_ERR_INVALID_GENIE);

  double res = 0;
  REQUIRE(tinsum_kkt_residual(ch.h, q, q, &res) == TINSUM_OK);
  CHECK(res >= 0.0);
}

TEST_CASE("optimizer report accessors") {
  ChannelGuard ch;
  REQUIRE(tinsum_channel_create_vector(0, kPi / 4, 0.3, 1.0, &ch.h) == TINSUM_OK);
  tinsum_optimize_options opts;
  tinsum_optimize_options_init(&opts);
  CHECK(opts.restarts == 8);
  CHECK(opts.seed == 42);

  tinsum_report* rep = nullptr;
  REQUIRE(tinsum_optimize(ch.h, &opts, &rep) == TINSUM_OK);
  const double sinr = std::cos(kPi / 4) * std::cos(kPi / 4) / (1.0 + 0.09) +
                      std::sin(kPi / 4) * std::sin(kPi / 4);
  CHECK(tinsum_report_rate(rep) >= std::log2(1.0 + sinr) - 1e-6);
  CHECK(tinsum_report_kkt_residual(rep) <= 1e-6);
  CHECK(tinsum_report_restarts_used(rep) == 8);

  double q1[4] = {0};
  REQUIRE(tinsum_report_covariance(rep, 1, q1) == TINSUM_OK);
  double check_rate = 0;
  double q2[4] = {0};
  REQUIRE(tinsum_report_covariance(rep, 2, q2) == TINSUM_OK);
  REQUIRE(tinsum_tin_sum_rate(ch.h, q1, q2, &check_rate) == TINSUM_OK);
  CHECK(check_rate == doctest::Approx(tinsum_report_rate(rep)).epsilon(1e-12));

  int full = -1;
  double ratio = -1;
  const char* cls = nullptr;
  REQUIRE(tinsum_report_rank(rep, 1, &full, &ratio, &cls) == TINSUM_OK);
  CHECK(full == 0);
  CHECK(ratio <= 1e-6);
  CHECK(std::string(cls) == "unit_rank");
  CHECK(tinsum_report_rank(rep, 3, &full, &ratio, &cls) == TINSUM_ERR_INVALID_INPUT);

  tinsum_report_free(rep);
}

TEST_CASE("threshold and sweep through the C surface") {
  double h0 = 0;
  REQUIRE(tinsum_threshold_h0(kPi / 2, 5.0, &h0) == TINSUM_OK);
  CHECK(h0 == doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(tinsum_siso_threshold(1.0, &h0) == TINSUM_OK);
  CHECK(h0 == doctest::Approx(0.4238537990697857).epsilon(1e-9));
  CHECK(tinsum_threshold_h0(-1.0, 1.0, &h0) == TINSUM_ERR_INVALID_INPUT);

  const double thetas[] = {0.3, 0.9};
  const double ps[] = {1.0, 10.0, 100.0};
  double grid[6] = {0};
  REQUIRE(tinsum_sweep_threshold(thetas, 2, ps, 3, grid) == TINSUM_OK);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(grid[i * 3 + j] >= std::sin(thetas[i]) - 1e-12);

  char* csv = nullptr;
  REQUIRE(tinsum_sweep_threshold_csv(thetas, 2, ps, 3, &csv) == TINSUM_OK);
  const std::string text(csv);
  tinsum_string_free(csv);
  CHECK(text.rfind("theta,P,h0,sin_theta\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("classification verdicts through the C surface") {
  ChannelGuard ch;
  REQUIRE(tinsum_channel_create_vector(1, 0.9, 0.5 * std::sin(0.9), 2.0, &ch.h) == TINSUM_OK);
  tinsum_verdict* v = nullptr;
  REQUIRE(tinsum_classify(ch.h, 42, 200, &v) == TINSUM_OK);
  CHECK(tinsum_verdict_certified(v) == 1);
  CHECK(tinsum_verdict_h0(v) >= std::sin(0.9));
  REQUIRE(tinsum_verdict_evidence_count(v) >= 4);
  const char* name = nullptr;
  int pass = 0;
  double margin = 0;
  REQUIRE(tinsum_verdict_evidence(v, 0, &name, &pass, &margin) == TINSUM_OK);
  CHECK(std::string(name) == "h_le_h0");
  CHECK(pass == 1);
  CHECK(tinsum_verdict_evidence(v, 99, &name, &pass, &margin) == TINSUM_ERR_INVALID_INPUT);
  tinsum_verdict_free(v);

  // general MIMO channels are rejected by classify
  ChannelGuard mimo;
  const double h11[] = {1.0, 0.0, 0.0, 1.0};
  const double hx[] = {0.1, 0.0, 0.0, 0.1};
  REQUIRE(tinsum_channel_create_mimo(h11, hx, hx, h11, 2, 2, 2, 2, 1.0, 1.0, &mimo.h) == TINSUM_OK);
  tinsum_verdict* v2 = nullptr;
  CHECK(tinsum_classify(mimo.h, 42, 100, &v2) == TINSUM_ERR_PRECONDITION);
}

TEST_CASE("full-rank certification through the C surface") {
  ChannelGuard ch;
  const double h11[] = {1.0, 0.05, -0.03, 0.97};
  const double h22[] = {1.02, 0.0, 0.04, 0.95};
  const double h12[] = {0.02, -0.01, 0.015, 0.02};
  const double h21[] = {-0.02, 0.01, 0.01, 0.03};
  REQUIRE(tinsum_channel_create_mimo(h11, h12, h21, h22, 2, 2, 2, 2, 1.0, 1.0, &ch.h) == TINSUM_OK);

  tinsum_report* rep = nullptr;
  REQUIRE(tinsum_optimize(ch.h, nullptr, &rep) == TINSUM_OK);
  tinsum_certificate* t1 = nullptr;
  REQUIRE(tinsum_certify_full_rank(ch.h, rep, &t1) == TINSUM_OK);
  CHECK(std::string(tinsum_certificate_verdict(t1)) == "certified");
  CHECK(std::fabs(tinsum_certificate_diff_rate(t1)) <= 1e-8);
  CHECK(tinsum_certificate_smartness_residual(t1) <= 1e-8);
  CHECK(tinsum_certificate_usefulness_margin(t1) >= -1e-10);
  tinsum_certificate_free(t1);
  tinsum_report_free(rep);
}

TEST_CASE("status names and version") {
  CHECK(std::string(tinsum_status_name(TINSUM_OK)) == "ok");
  CHECK(std::string(tinsum_status_name(TINSUM_ERR_NO_VALID_GENIE)) == "no_valid_genie");
  CHECK(std::strlen(tinsum_version()) > 0);
}
