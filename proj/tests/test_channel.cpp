// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/channel.hpp"
#include "core/errors.hpp"
#include "core/genie.hpp"

using namespace tinsum;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat random_mat(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * g(rng);
  return m;
}

SymMatrix random_cov(std::mt19937_64& rng, int n, double budget) {
  const Mat r = random_mat(rng, n, n);
  Mat q = r * transpose(r);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  const double tr = trace(q);
  if (tr > 0) q = (frac(rng) * budget / tr) * q;
  return SymMatrix::symmetrized(q);
}

Vec random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (double& x : v) x = g(rng);
  const double nv = norm(v);
  for (double& x : v) x /= nv;
  return v;
}

ChannelMatrices random_mimo(std::mt19937_64& rng, double cross_scale = 0.5) {
  ChannelMatrices ch;
  ch.h11 = random_mat(rng, 2, 2);
  ch.h22 = random_mat(rng, 2, 2);
  ch.h12 = random_mat(rng, 2, 2, cross_scale);
  ch.h21 = random_mat(rng, 2, 2, cross_scale);
  ch.p1 = ch.p2 = 1.5;
  return ch;
}

} // namespace

TEST_CASE("canonicalize endpoint examples") {
  const Vec v{0.0, 1.0, 0.0};
  const auto same = canonicalize(v, v);
  CHECK(same.theta == doctest::Approx(0.0).epsilon(1e-14));

  const Vec c{1.0, 0.0, 0.0};
  const auto perp = canonicalize(v, c);
  CHECK(perp.theta == doctest::Approx(kPi / 2).epsilon(1e-14));

  CHECK_THROWS_AS((void)canonicalize(Vec{0.0, 0.0}, Vec{1.0, 0.0}), Error);
}

TEST_CASE("canonicalize preserves inner products in R^4") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const Vec d = random_unit(rng, 4), c = random_unit(rng, 4);
    const auto can = canonicalize(d, c);
    const Mat bt = transpose(can.basis);
    const Vec dp = bt * d, cp = bt * c;
    CHECK(std::fabs(dot(dp, cp)) == doctest::Approx(std::fabs(dot(d, c))).epsilon(1e-12));
    CHECK(norm(dp) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(cp) == doctest::Approx(1.0).epsilon(1e-12));
    // basis orthonormal
    const Mat gram = bt * can.basis;
    CHECK(std::fabs(gram(0, 0) - 1.0) <= 1e-12);
    CHECK(std::fabs(gram(1, 1) - 1.0) <= 1e-12);
    CHECK(std::fabs(gram(0, 1)) <= 1e-12);
  }
}

TEST_CASE("canonicalize theta-zero completion is deterministic") {
  const Vec v{0.0, 0.0, 1.0};
  const auto can = canonicalize(v, v);
  CHECK(can.theta == 0.0);
  // smallest-index completion: e_0 already orthogonal to c = e_2
  CHECK(can.basis(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("tin_sum_rate closed-form examples") {
  // clean SISO links at unit SNR: 1/2 log2(2) per user
  ChannelMatrices siso;
  siso.h11 = siso.h22 = Mat{{1.0}};
  siso.h12 = siso.h21 = Mat{{0.0}};
  siso.p1 = siso.p2 = 1.0;
  const CovariancePair qs{SymMatrix::diag({1.0}), SymMatrix::diag({1.0})};
  CHECK(tin_sum_rate(siso, qs) == doctest::Approx(1.0).epsilon(1e-12));

  // orthogonal MISO: interference vanishes, rate = log2(1 + P)
  const auto orth = make_vector_channel(VectorKind::miso, kPi / 2, 0.8, 3.0);
  const Vec b1 = optimal_beam(orth);
  const SymMatrix q1 = SymMatrix::symmetrized(3.0 * outer(b1, b1));
  CHECK(tin_sum_rate(orth.to_matrices(), {q1, q1}) == doctest::Approx(2.0).epsilon(1e-12));

  // theta = pi/4, P = 1, h = 0.5: SINR = 0.9
  const auto sch = make_vector_channel(VectorKind::miso, kPi / 4, 0.5, 1.0);
  CHECK(sinr_closed_form(sch) == doctest::Approx(0.9).epsilon(1e-12));
  const Vec b = optimal_beam(sch);
  const SymMatrix q = SymMatrix::symmetrized(1.0 * outer(b, b));
  CHECK(tin_sum_rate(sch.to_matrices(), {q, q}) == doctest::Approx(std::log2(1.9)).epsilon(1e-12));
  CHECK(beamforming_sum_rate(sch) == doctest::Approx(std::log2(1.9)).epsilon(1e-12));
}

TEST_CASE("tin_sum_rate rejects bad inputs") {
  ChannelMatrices ch;
  ch.h11 = ch.h22 = Mat{{1.0, 0.0}};
  ch.h12 = ch.h21 = Mat{{0.3, 0.0}};
  ch.p1 = ch.p2 = 1.0;
  const SymMatrix wrong_dim = SymMatrix::diag({1.0});
  CHECK_THROWS_AS((void)tin_sum_rate(ch, {wrong_dim, wrong_dim}), Error);
  const SymMatrix over = SymMatrix::diag({2.0, 0.0});
  CHECK_THROWS_AS((void)tin_sum_rate(ch, {over, over}), Error);
  const SymMatrix indef = SymMatrix::diag({1.0, -0.5});
  CHECK_THROWS_AS((void)tin_sum_rate(ch, {indef, indef}), Error);
}

TEST_CASE("ga_sum_rate with an independent genie never falls below TIN") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 50; ++t) {
    const ChannelMatrices ch = random_mimo(rng);
    const CovariancePair q{random_cov(rng, 2, ch.p1), random_cov(rng, 2, ch.p2)};
    GenieParams g;
    g.a1 = Mat(2, 2);
    g.a2 = Mat(2, 2);
    g.sigma1 = SymMatrix::identity(2);
    g.sigma2 = SymMatrix::identity(2);
    const double diff = diff_rate(ch, q, g);
    CHECK(diff >= -1e-10);
  }
}

TEST_CASE("smart MISO genie: genie-aided rate equals TIN at Q*") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> th(0.1, kPi / 2 - 0.1), pw(0.2, 10.0);
  for (int t = 0; t < 50; ++t) {
    const double theta = th(rng), P = pw(rng);
    const auto sch = make_vector_channel(VectorKind::miso, theta, 0.9 * std::sin(theta), P);
    const MisoGenie mg = miso_genie(sch);
    const Vec b = optimal_beam(sch);
    const SymMatrix q = SymMatrix::symmetrized(P * outer(b, b));
    const double tin = tin_sum_rate(sch.to_matrices(), {q, q});
    const double ga = ga_sum_rate(sch.to_matrices(), {q, q}, miso_genie_params(mg));
    CHECK(std::fabs(ga - tin) <= 1e-9);
    CHECK(std::fabs(diff_rate(sch.to_matrices(), {q, q}, miso_genie_params(mg))) <= 1e-9);
  }
}

TEST_CASE("independent genie with interference strictly helps") {
  const auto sch = make_vector_channel(VectorKind::miso, kPi / 4, 0.5, 1.0);
  const Vec b = optimal_beam(sch);
  const SymMatrix q = SymMatrix::symmetrized(1.0 * outer(b, b));
  GenieParams g;
  g.a1 = g.a2 = Mat(1, 1);
  g.sigma1 = g.sigma2 = SymMatrix::identity(1);
  CHECK(diff_rate(sch.to_matrices(), {q, q}, g) > 1e-3);
}

TEST_CASE("diff_rate nonnegative for random valid genies") {
  std::mt19937_64 rng(24);
  int done = 0;
  while (done < 300) {
    const ChannelMatrices ch = random_mimo(rng, 0.7);
    const CovariancePair q{random_cov(rng, 2, ch.p1), random_cov(rng, 2, ch.p2)};
    GenieParams g;
    g.a1 = random_mat(rng, 2, 2, 0.3);
    g.a2 = random_mat(rng, 2, 2, 0.3);
    const Mat r1 = random_mat(rng, 2, 2), r2 = random_mat(rng, 2, 2);
    g.sigma1 = SymMatrix::symmetrized(0.4 * Mat::identity(2) + 0.2 * (r1 * transpose(r1)));
    g.sigma2 = SymMatrix::symmetrized(0.4 * Mat::identity(2) + 0.2 * (r2 * transpose(r2)));
    try {
      if (!schur_psd_check(g.a1, g.sigma1) || !schur_psd_check(g.a2, g.sigma2)) continue;
    } catch (const Error&) {
      continue;
    }
    CHECK(diff_rate(ch, q, g) >= -1e-10);
    ++done;
  }
}

TEST_CASE("ga_sum_rate rejects invalid genie blocks") {
  const auto sch = make_vector_channel(VectorKind::miso, 0.6, 0.4, 1.0);
  const SymMatrix q = SymMatrix::symmetrized(0.5 * Mat::identity(2));
  GenieParams g;
  g.a1 = g.a2 = Mat{{2.0}};           // |a| > sigma: block not PSD
  g.sigma1 = g.sigma2 = SymMatrix::diag({1.0});
  CHECK_THROWS_AS((void)ga_sum_rate(sch.to_matrices(), {q, q}, g), Error);
  try {
    (void)ga_sum_rate(sch.to_matrices(), {q, q}, g);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_genie);
  }
}

TEST_CASE("TIN rate is invariant under two-antenna canonicalization") {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 60; ++t) {
    const int m = 5;
    const Vec d = random_unit(rng, m), c = random_unit(rng, m);
    const double hh = 0.45;
    ChannelMatrices big;
    big.h11 = Mat(1, m);
    big.h12 = Mat(1, m);
    for (int i = 0; i < m; ++i) {
      big.h11(0, i) = d[i];
      big.h12(0, i) = hh * c[i];
    }
    big.h22 = big.h11;
    big.h21 = big.h12;
    big.p1 = big.p2 = 2.0;
    const CovariancePair q{random_cov(rng, m, 2.0), random_cov(rng, m, 2.0)};

    const auto can = canonicalize(d, c);
    ChannelMatrices small;
    small.h11 = small.h22 = Mat{{std::cos(can.theta), std::sin(can.theta)}};
    small.h12 = small.h21 = Mat{{hh, 0.0}};
    small.p1 = small.p2 = 2.0;
    const Mat bt = transpose(can.basis);
    const CovariancePair qr{SymMatrix::symmetrized(bt * q.q1.dense() * can.basis),
                            SymMatrix::symmetrized(bt * q.q2.dense() * can.basis)};
    CHECK(tin_sum_rate(big, q) == doctest::Approx(tin_sum_rate(small, qr)).epsilon(1e-10));
  }
}

TEST_CASE("negating the cross links leaves the TIN rate unchanged") {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 100; ++t) {
    const ChannelMatrices ch = random_mimo(rng);
    const CovariancePair q{random_cov(rng, 2, ch.p1), random_cov(rng, 2, ch.p2)};
    ChannelMatrices neg = ch;
    neg.h12 = -1.0 * ch.h12;
    neg.h21 = -1.0 * ch.h21;
    CHECK(std::fabs(tin_sum_rate(neg, q) - tin_sum_rate(ch, q)) <= 1e-12);
  }
  // vector channels store |h| outright
  const auto a = make_vector_channel(VectorKind::simo, 0.8, -0.5, 2.0);
  CHECK(a.h == 0.5);
}

TEST_CASE("ga_sum_rate is concave along segments for useful genies") {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> tpos(0.15, 0.85);
  int segments = 0;
  while (segments < 200) {
    const ChannelMatrices ch = random_mimo(rng, 0.3);
    GenieParams g;
    g.a1 = random_mat(rng, 2, 2, 0.06);
    g.a2 = random_mat(rng, 2, 2, 0.06);
    g.sigma1 = SymMatrix::symmetrized(0.4 * Mat::identity(2));
    g.sigma2 = SymMatrix::symmetrized(0.4 * Mat::identity(2));
    if (!usefulness_check(g)) continue;
    for (int s = 0; s < 20 && segments < 200; ++s, ++segments) {
      const CovariancePair qa{random_cov(rng, 2, ch.p1), random_cov(rng, 2, ch.p2)};
      const CovariancePair qb{random_cov(rng, 2, ch.p1), random_cov(rng, 2, ch.p2)};
      const auto at = [&](double t) {
        const CovariancePair q{SymMatrix::symmetrized((1 - t) * qa.q1.dense() + t * qb.q1.dense()),
                               SymMatrix::symmetrized((1 - t) * qa.q2.dense() + t * qb.q2.dense())};
        return ga_sum_rate(ch, q, g);
      };
      const double t0 = tpos(rng), dl = 0.1;
      CHECK(at(t0 - dl) - 2.0 * at(t0) + at(t0 + dl) <= 1e-8);
    }
  }
}

TEST_CASE("equality-usefulness decomposition cross-check") {
  // When the usefulness LMIs hold with equality the genie-aided rate equals
  // sum_i h(Y_i|S_i) - h(W_i); verified on the scalar MISO genie.
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> th(0.2, 1.2), pw(0.5, 5.0);
  for (int t = 0; t < 20; ++t) {
    const double theta = th(rng), P = pw(rng);
    const auto sch = make_vector_channel(VectorKind::miso, theta, 0.8 * std::sin(theta), P);
    const MisoGenie mg = miso_genie(sch);
    const ChannelMatrices ch = sch.to_matrices();
    const CovariancePair q{random_cov(rng, 2, P), random_cov(rng, 2, P)};

    const double ga = ga_sum_rate(ch, q, miso_genie_params(mg));
    // h(Y|S) - h(W) with everything scalar: 1/2 log2(det joint / det Cs) - 1/2 log2 sigma
    double decomp = 0.0;
    for (int user = 0; user < 2; ++user) {
      const SymMatrix& qa = user == 0 ? q.q1 : q.q2;
      const SymMatrix& qb = user == 0 ? q.q2 : q.q1;
      const Vec d{std::cos(theta), std::sin(theta)};
      const Vec c{sch.h, 0.0};
      const double var_y = dot(d, qa.dense() * d) + dot(c, qb.dense() * c) + 1.0;
      const double var_s = dot(c, qa.dense() * c) + mg.sigma;
      const double cov_ys = dot(d, qa.dense() * c) + mg.a;
      decomp += 0.5 * std::log2((var_y * var_s - cov_ys * cov_ys) / var_s) - 0.5 * std::log2(mg.sigma);
    }
    CHECK(ga == doctest::Approx(decomp).epsilon(1e-9));
  }
}
