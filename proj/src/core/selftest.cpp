// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#include "core/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "core/channel.hpp"
#include "core/covopt.hpp"
#include "core/errors.hpp"
#include "core/genie.hpp"
#include "core/matkit.hpp"
#include "core/regime.hpp"

namespace tinsum {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat random_mat(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * g(rng);
  return m;
}

SymMatrix random_sym(std::mt19937_64& rng, int n, double scale = 1.0) {
  return SymMatrix::symmetrized(random_mat(rng, n, n, scale));
}

SymMatrix random_cov(std::mt19937_64& rng, int n, double budget) {
  const Mat r = random_mat(rng, n, n);
  Mat q = r * transpose(r);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  const double tr = trace(q);
  if (tr > 0) q = (frac(rng) * budget / tr) * q;
  return SymMatrix::symmetrized(q);
}

struct Harness {
  std::uint64_t seed;
  SelftestResult result;

  void check(const std::string& name, const std::function<bool(std::ostringstream&)>& fn) {
    std::ostringstream detail;
    bool pass = false;
    try {
      pass = fn(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    result.checks.push_back({name, pass, pass ? "" : detail.str()});
    (pass ? result.passed : result.failed)++;
  }

  std::mt19937_64 rng(std::uint64_t salt) const { return std::mt19937_64(seed * 0x9e3779b97f4a7c15ULL + salt); }
};

} // namespace

SelftestResult run_selftest(std::uint64_t seed) {
  Harness h{seed, {}};

  h.check("matkit.eigen_reconstruction", [&](std::ostringstream& out) {
    auto rng = h.rng(1);
    std::uniform_int_distribution<int> dim(1, 6);
    for (int t = 0; t < 200; ++t) {
      const SymMatrix s = random_sym(rng, dim(rng), 3.0);
      const EigenDecomp d = sym_eigen(s);
      const int n = s.dim();
      Mat rec(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int k = 0; k < n; ++k) acc += d.vectors(i, k) * d.values[k] * d.vectors(j, k);
          rec(i, j) = acc;
        }
      const double err = fro_norm(rec - s.dense());
      if (err > 1e-10 * std::max(1.0, s.fro_norm())) {
        out << "reconstruction error " << err;
        return false;
      }
      const Mat vtv = transpose(d.vectors) * d.vectors - Mat::identity(n);
      if (fro_norm(vtv) > 1e-10 * n) {
        out << "orthonormality error";
        return false;
      }
    }
    return true;
  });

  h.check("matkit.gen_eig_residual", [&](std::ostringstream& out) {
    auto rng = h.rng(2);
    std::uniform_int_distribution<int> dim(2, 4);
    for (int t = 0; t < 200; ++t) {
      const int n = dim(rng);
      const SymMatrix s = SymMatrix::symmetrized(random_mat(rng, n, n) * transpose(random_mat(rng, n, n)));
      const Mat r = random_mat(rng, n, n);
      const SymMatrix tm = SymMatrix::symmetrized(r * transpose(r) + 0.5 * Mat::identity(n));
      const GenEig ge = gen_eig_max(s, tm);
      Vec resid = s.dense() * ge.vector;
      const Vec tv = tm.dense() * ge.vector;
      for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= ge.value * tv[i];
      if (norm(resid) > 1e-8 * (s.fro_norm() + std::fabs(ge.value) * tm.fro_norm())) {
        out << "residual " << norm(resid);
        return false;
      }
    }
    return true;
  });

  h.check("matkit.schur_block_oracle", [&](std::ostringstream& out) {
    auto rng = h.rng(3);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> sc(0.2, 1.5);
    for (int t = 0; t < 1000; ++t) {
      const int p = dim(rng), q = dim(rng);
      const Mat a = random_mat(rng, p, q, sc(rng));
      const Mat r = random_mat(rng, q, q);
      const SymMatrix sig = SymMatrix::symmetrized(r * transpose(r) + 0.1 * Mat::identity(q));
      const bool fast = schur_psd_check(a, sig);
      const Mat block = block2x2(Mat::identity(p), a, transpose(a), sig.dense());
      const bool oracle = is_psd(SymMatrix::symmetrized(block));
      if (fast != oracle) {
        out << "disagreement at trial " << t;
        return false;
      }
    }
    return true;
  });

  h.check("matkit.rank_one_inverse_oracle", [&](std::ostringstream& out) {
    auto rng = h.rng(4);
    std::uniform_int_distribution<int> dim(2, 4);
    std::uniform_real_distribution<double> hp(0.0, 10.0);
    for (int t = 0; t < 300; ++t) {
      const int n = dim(rng);
      Vec c(n);
      std::normal_distribution<double> g(0.0, 1.0);
      for (double& x : c) x = g(rng);
      const double nc = norm(c);
      for (double& x : c) x /= nc;
      Vec x(n);
      for (double& xi : x) xi = g(rng);
      const double h2p = hp(rng);
      const Vec fast = rank_one_inv_apply(h2p, c, x);
      const Mat j = Mat::identity(n) + h2p * outer(c, c);
      const Vec slow = sym_inverse(SymMatrix::symmetrized(j)) * x;
      Vec diff = fast;
      for (int i = 0; i < n; ++i) diff[i] -= slow[i];
      if (norm(diff) > 1e-12 * std::max(1.0, norm(x))) {
        out << "mismatch " << norm(diff);
        return false;
      }
    }
    return true;
  });

  h.check("matkit.rank2_top_eigen_closed_form", [&](std::ostringstream& out) {
    auto rng = h.rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
      Vec x1{g(rng), g(rng)}, x2{g(rng), g(rng)};
      if (dot(x1, x2) <= 0)
        for (double& x : x2) x = -x;
      if (dot(x1, x2) <= 0) continue;
      const SymMatrix m = SymMatrix::symmetrized(outer(x1, x1) + outer(x2, x2));
      const EigenDecomp d = sym_eigen(m);
      const double s1 = dot(x1, x1), s2 = dot(x2, x2), cr = dot(x1, x2);
      const double mid = 0.5 * (s1 + s2);
      const double rad = 0.5 * std::sqrt((s1 - s2) * (s1 - s2) + 4.0 * cr * cr);
      if (std::fabs(d.values[0] - (mid + rad)) > 1e-10 * std::max(1.0, mid + rad) ||
          std::fabs(d.values[1] - (mid - rad)) > 1e-10 * std::max(1.0, mid + rad)) {
        out << "eigenvalue mismatch";
        return false;
      }
      Vec top{d.vectors(0, 0), d.vectors(1, 0)}, bot{d.vectors(0, 1), d.vectors(1, 1)};
      if (!top_eig_rank2_predicate(x1, x2, top) || top_eig_rank2_predicate(x1, x2, bot)) {
        out << "predicate mismatch";
        return false;
      }
    }
    return true;
  });

  h.check("channel.canonicalization_rate_invariance", [&](std::ostringstream& out) {
    auto rng = h.rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
      const int m = 4;
      Vec d(m), c(m);
      for (double& x : d) x = g(rng);
      for (double& x : c) x = g(rng);
      const double nd = norm(d), nc = norm(c);
      for (double& x : d) x /= nd;
      for (double& x : c) x /= nc;
      const double hh = 0.4;
      ChannelMatrices big;
      big.h11 = big.h22 = Mat(1, m);
      big.h12 = big.h21 = Mat(1, m);
      for (int i = 0; i < m; ++i) {
        big.h11(0, i) = d[i];
        big.h12(0, i) = hh * c[i];
      }
      big.h22 = big.h11;
      big.h21 = big.h12;
      big.p1 = big.p2 = 2.0;
      const CovariancePair q{random_cov(rng, m, 2.0), random_cov(rng, m, 2.0)};
      const double r_big = tin_sum_rate(big, q);

      const Canonicalization can = canonicalize(d, c);
      ChannelMatrices small;
      small.h11 = small.h22 = Mat{{std::cos(can.theta), std::sin(can.theta)}};
      small.h12 = small.h21 = Mat{{hh, 0.0}};
      small.p1 = small.p2 = 2.0;
      const Mat bt = transpose(can.basis);
      const CovariancePair qs{SymMatrix::symmetrized(bt * q.q1.dense() * can.basis),
                              SymMatrix::symmetrized(bt * q.q2.dense() * can.basis)};
      const double r_small = tin_sum_rate(small, qs);
      if (std::fabs(r_big - r_small) > 1e-10) {
        out << "rates differ by " << r_big - r_small;
        return false;
      }
    }
    return true;
  });

  h.check("channel.cross_sign_invariance", [&](std::ostringstream& out) {
    auto rng = h.rng(7);
    for (int t = 0; t < 100; ++t) {
      ChannelMatrices ch;
      ch.h11 = random_mat(rng, 2, 2);
      ch.h22 = random_mat(rng, 2, 2);
      ch.h12 = random_mat(rng, 2, 2, 0.5);
      ch.h21 = random_mat(rng, 2, 2, 0.5);
      ch.p1 = ch.p2 = 1.0;
      const CovariancePair q{random_cov(rng, 2, 1.0), random_cov(rng, 2, 1.0)};
      const double r = tin_sum_rate(ch, q);
      ChannelMatrices neg = ch;
      neg.h12 = -1.0 * ch.h12;
      neg.h21 = -1.0 * ch.h21;
      if (std::fabs(tin_sum_rate(neg, q) - r) > 1e-12) {
        out << "sign flip changed the rate";
        return false;
      }
    }
    return true;
  });

  h.check("channel.diff_rate_nonnegative", [&](std::ostringstream& out) {
    auto rng = h.rng(8);
    for (int t = 0; t < 200; ++t) {
      ChannelMatrices ch;
      ch.h11 = random_mat(rng, 2, 2);
      ch.h22 = random_mat(rng, 2, 2);
      ch.h12 = random_mat(rng, 2, 2, 0.6);
      ch.h21 = random_mat(rng, 2, 2, 0.6);
      ch.p1 = ch.p2 = 1.5;
      const CovariancePair q{random_cov(rng, 2, 1.5), random_cov(rng, 2, 1.5)};
      GenieParams g;
      g.a1 = random_mat(rng, 2, 2, 0.25);
      g.a2 = random_mat(rng, 2, 2, 0.25);
      g.sigma1 = SymMatrix::symmetrized(0.6 * Mat::identity(2) + 0.2 * random_sym(rng, 2).dense());
      g.sigma2 = SymMatrix::symmetrized(0.6 * Mat::identity(2) + 0.2 * random_sym(rng, 2).dense());
      try {
        if (!schur_psd_check(g.a1, g.sigma1) || !schur_psd_check(g.a2, g.sigma2)) continue;
      } catch (const Error&) {
        continue;
      }
      if (diff_rate(ch, q, g) < -1e-10) {
        out << "negative diff at trial " << t;
        return false;
      }
    }
    return true;
  });

  h.check("channel.ga_concavity_for_useful_genies", [&](std::ostringstream& out) {
    auto rng = h.rng(9);
    std::uniform_real_distribution<double> tpos(0.2, 0.8);
    for (int c = 0; c < 5; ++c) {
      ChannelMatrices ch;
      ch.h11 = random_mat(rng, 2, 2);
      ch.h22 = random_mat(rng, 2, 2);
      ch.h12 = random_mat(rng, 2, 2, 0.3);
      ch.h21 = random_mat(rng, 2, 2, 0.3);
      ch.p1 = ch.p2 = 1.0;
      GenieParams g;
      g.a1 = random_mat(rng, 2, 2, 0.05);
      g.a2 = random_mat(rng, 2, 2, 0.05);
      g.sigma1 = SymMatrix::symmetrized(0.4 * Mat::identity(2));
      g.sigma2 = SymMatrix::symmetrized(0.4 * Mat::identity(2));
      if (!usefulness_check(g)) continue;
      for (int s = 0; s < 40; ++s) {
        const CovariancePair qa{random_cov(rng, 2, 1.0), random_cov(rng, 2, 1.0)};
        const CovariancePair qb{random_cov(rng, 2, 1.0), random_cov(rng, 2, 1.0)};
        const auto at = [&](double t) {
          const CovariancePair q{SymMatrix::symmetrized((1 - t) * qa.q1.dense() + t * qb.q1.dense()),
                                 SymMatrix::symmetrized((1 - t) * qa.q2.dense() + t * qb.q2.dense())};
          return ga_sum_rate(ch, q, g);
        };
        const double t0 = tpos(rng), dl = 0.1;
        const double second = at(t0 - dl) - 2.0 * at(t0) + at(t0 + dl);
        if (second > 1e-8) {
          out << "convex segment, second difference " << second;
          return false;
        }
      }
    }
    return true;
  });

  h.check("covopt.gradient_matches_finite_differences", [&](std::ostringstream& out) {
    auto rng = h.rng(10);
    for (int t = 0; t < 25; ++t) {
      ChannelMatrices ch;
      ch.h11 = random_mat(rng, 2, 2);
      ch.h22 = random_mat(rng, 2, 2);
      ch.h12 = random_mat(rng, 2, 2, 0.5);
      ch.h21 = random_mat(rng, 2, 2, 0.5);
      ch.p1 = ch.p2 = 2.0;
      // interior points: the +/- eps probes must stay PSD
      const SymMatrix floor_eye = 1e-3 * SymMatrix::identity(2);
      const CovariancePair q{random_cov(rng, 2, 1.0) + floor_eye, random_cov(rng, 2, 1.0) + floor_eye};
      const auto [g1, g2] = tin_gradient(ch, q);
      const double eps = 1e-5;
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
          SymMatrix qp = q.q1, qm = q.q1;
          qp.set(i, j, qp(i, j) + eps);
          qm.set(i, j, qm(i, j) - eps);
          const double fd =
              (tin_sum_rate(ch, {qp, q.q2}) - tin_sum_rate(ch, {qm, q.q2})) / (2 * eps);
          const double an = (i == j) ? g1(i, i) : 2.0 * g1(i, j);
          if (std::fabs(fd - an) > 1e-5 * std::max(1.0, std::fabs(an))) {
            out << "grad mismatch fd=" << fd << " an=" << an;
            return false;
          }
        }
    }
    return true;
  });

  h.check("covopt.projection_feasible_idempotent", [&](std::ostringstream& out) {
    auto rng = h.rng(11);
    for (int t = 0; t < 100; ++t) {
      const SymMatrix s = random_sym(rng, 2, 2.0);
      const SymMatrix p = psd_trace_project(s, 1.0);
      const EigenDecomp d = sym_eigen(p);
      if (d.values.back() < -psd_tol(d.values) || p.trace() > 1.0 + 1e-9) {
        out << "projection infeasible";
        return false;
      }
      const SymMatrix pp = psd_trace_project(p, 1.0);
      if ((pp - p).fro_norm() > 1e-9) {
        out << "projection not idempotent";
        return false;
      }
    }
    return true;
  });

  h.check("covopt.optimizer_matches_miso_closed_form", [&](std::ostringstream& out) {
    auto rng = h.rng(12);
    std::uniform_real_distribution<double> th(0.2, 1.3), pw(0.5, 5.0);
    for (int t = 0; t < 5; ++t) {
      const double theta = th(rng), P = pw(rng);
      const double h0 = threshold_h0({theta, P});
      const auto sch = make_vector_channel(VectorKind::miso, theta, 0.8 * h0, P);
      OptimizeOptions opts;
      opts.seed = seed + t;
      const OptimizationReport rep = optimize_tin(sch.to_matrices(), opts);
      const double target = beamforming_sum_rate(sch);
      if (rep.rate < target - 1e-6) {
        out << "optimizer rate " << rep.rate << " below closed form " << target;
        return false;
      }
    }
    return true;
  });

  h.check("genie.miso_identities", [&](std::ostringstream&) {
    // construction cross-validates internally; exercise a grid
    for (int i = 1; i <= 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double theta = kPi / 2.0 * i / 11.0;
        const double P = std::pow(10.0, -1.0 + 3.0 * j / 9.0);
        const auto sch = make_vector_channel(VectorKind::miso, theta, 0.95 * std::sin(theta), P);
        (void)miso_genie(sch);
      }
    return true;
  });

  h.check("genie.simo_search_iff_threshold", [&](std::ostringstream& out) {
    auto rng = h.rng(13);
    std::uniform_real_distribution<double> th(0.05, kPi / 2 - 0.05), lp(-1.0, 2.0);
    for (int t = 0; t < 20; ++t) {
      const double theta = th(rng), P = std::pow(10.0, lp(rng));
      const double h0 = threshold_h0({theta, P});
      const auto below = simo_genie_search(make_vector_channel(VectorKind::simo, theta, h0 - 1e-4, P));
      const auto above = simo_genie_search(make_vector_channel(VectorKind::simo, theta, h0 + 1e-4, P));
      if (!below || above) {
        out << "iff violated at theta=" << theta << " P=" << P;
        return false;
      }
    }
    return true;
  });

  h.check("genie.full_rank_certification_weak_mimo", [&](std::ostringstream& out) {
    auto rng = h.rng(14);
    for (int t = 0; t < 3; ++t) {
      ChannelMatrices ch;
      ch.h11 = Mat::identity(2) + random_mat(rng, 2, 2, 0.1);
      ch.h22 = Mat::identity(2) + random_mat(rng, 2, 2, 0.1);
      ch.h12 = random_mat(rng, 2, 2, 0.02);
      ch.h21 = random_mat(rng, 2, 2, 0.02);
      ch.p1 = ch.p2 = 1.0;
      OptimizeOptions opts;
      opts.seed = seed + t;
      const OptimizationReport rep = optimize_tin(ch, opts);
      const FullRankCertificate res = certify_full_rank_optimum(ch, rep);
      if (res.verdict != CertificateVerdict::certified || std::fabs(res.diff) > 1e-8) {
        out << "verdict " << certificate_verdict_name(res.verdict) << " diff " << res.diff;
        return false;
      }
    }
    return true;
  });

  h.check("regime.h0_above_sine_and_root_valid", [&](std::ostringstream& out) {
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 10; ++j) {
        const double theta = kPi / 2.0 * i / 19.0;
        const double P = std::pow(10.0, -1.0 + 3.0 * j / 9.0);
        const double h0 = threshold_h0({theta, P});
        if (h0 < std::sin(theta) - 1e-12) {
          out << "h0 below sine";
          return false;
        }
        if (std::fabs(threshold_residual(h0, theta, P)) > 1e-9) {
          out << "root residual too large";
          return false;
        }
      }
    return true;
  });

  h.check("regime.large_p_collapse", [&](std::ostringstream& out) {
    for (int i = 0; i < 10; ++i) {
      const double theta = 0.3 + (kPi / 2 - 0.31) * i / 9.0;
      const double st = std::sin(theta);
      const double p_collapse = std::max(0.0, (std::cos(theta) / st - 1.0) / (st * st));
      for (double mult : {1.5, 10.0, 1000.0}) {
        const double P = std::max(p_collapse * mult, 1e-6);
        if (std::fabs(threshold_h0({theta, P}) - st) > 1e-9) {
          out << "no collapse at theta=" << theta << " P=" << P;
          return false;
        }
      }
    }
    return true;
  });

  h.check("regime.siso_consistency", [&](std::ostringstream& out) {
    for (double P : {0.0, 0.1, 1.0, 10.0, 100.0}) {
      if (std::fabs(threshold_h0({0.0, P}) - siso_threshold(P)) > 1e-9) {
        out << "mismatch at P=" << P;
        return false;
      }
    }
    return true;
  });

  h.check("regime.genie_bounds_below_threshold", [&](std::ostringstream& out) {
    auto rng = h.rng(15);
    std::uniform_real_distribution<double> th(0.05, kPi / 2 - 0.05), lp(-1.0, 2.0);
    for (int t = 0; t < 50; ++t) {
      const double theta = th(rng), P = std::pow(10.0, lp(rng));
      const double hh = 0.999 * threshold_h0({theta, P});
      const auto sch = make_vector_channel(VectorKind::miso, theta, hh, P);
      const MisoGenie g = miso_genie(sch);  // throws if a > 0.5
      if (!(g.a < 0.5) || !(g.mu * hh < std::cos(theta))) {
        out << "implication failed at theta=" << theta << " P=" << P;
        return false;
      }
    }
    return true;
  });

  h.check("regime.miso_simo_duality", [&](std::ostringstream& out) {
    auto rng = h.rng(16);
    std::uniform_real_distribution<double> th(0.1, kPi / 2 - 0.1), lp(-1.0, 2.0), hf(0.3, 1.3);
    for (int t = 0; t < 20; ++t) {
      const double theta = th(rng), P = std::pow(10.0, lp(rng));
      const double hh = hf(rng) * threshold_h0({theta, P});
      CertifyOptions copts;
      copts.seed = seed + t;
      copts.trace_samples = 100;
      const auto vm = certify_miso(make_vector_channel(VectorKind::miso, theta, hh, P), copts);
      const auto vs = certify_simo(make_vector_channel(VectorKind::simo, theta, hh, P), copts);
      if (vm.classification != vs.classification) {
        out << "duality broken at theta=" << theta << " P=" << P << " h=" << hh;
        return false;
      }
    }
    return true;
  });

  return h.result;
}

} // namespace tinsum
