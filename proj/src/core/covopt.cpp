// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#include "core/covopt.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/channel.hpp"
#include "core/errors.hpp"

namespace tinsum {

const char* rank_class_name(RankClass c) {
  switch (c) {
    case RankClass::full_rank: return "full_rank";
    case RankClass::unit_rank: return "unit_rank";
    case RankClass::indeterminate: return "indeterminate";
  }
  return "?";
}

std::pair<SymMatrix, SymMatrix> tin_gradient(const ChannelMatrices& ch, const CovariancePair& q) {
  ch.validate();
  validate_covariances(ch, q);
  const double scale = 1.0 / (2.0 * std::log(2.0));
  const Mat q1 = q.q1.dense(), q2 = q.q2.dense();

  const Mat n1 = Mat::identity(ch.rx1()) + ch.h12 * q2 * transpose(ch.h12);
  const Mat g1 = n1 + ch.h11 * q1 * transpose(ch.h11);
  const Mat n2 = Mat::identity(ch.rx2()) + ch.h21 * q1 * transpose(ch.h21);
  const Mat g2 = n2 + ch.h22 * q2 * transpose(ch.h22);

  const Mat g1_inv = sym_inverse(SymMatrix::symmetrized(g1));
  const Mat n1_inv = sym_inverse(SymMatrix::symmetrized(n1));
  const Mat g2_inv = sym_inverse(SymMatrix::symmetrized(g2));
  const Mat n2_inv = sym_inverse(SymMatrix::symmetrized(n2));

  const Mat grad1 = scale * (transpose(ch.h11) * g1_inv * ch.h11 + transpose(ch.h21) * (g2_inv - n2_inv) * ch.h21);
  const Mat grad2 = scale * (transpose(ch.h22) * g2_inv * ch.h22 + transpose(ch.h12) * (g1_inv - n1_inv) * ch.h12);
  return {SymMatrix::symmetrized(grad1), SymMatrix::symmetrized(grad2)};
}

SymMatrix psd_trace_project(const SymMatrix& s, double budget) {
  if (!(budget > 0.0)) fail(Errc::invalid_input, "psd_trace_project: budget must be positive");
  const EigenDecomp d = sym_eigen(s);

  bool feasible = s.trace() <= budget;
  for (double v : d.values)
    if (v < 0.0) feasible = false;
  if (feasible) return s;

  Vec lam = d.values;
  for (double& v : lam) v = std::max(0.0, v);
  double total = 0.0;
  for (double v : lam) total += v;
  if (total > budget) {
    // shift-and-clamp: find tau with sum max(0, lam_i - tau) == budget;
    // eigenvalues are already sorted descending.
    const int n = static_cast<int>(lam.size());
    double tau = 0.0, csum = 0.0;
    for (int k = 0; k < n; ++k) {
      csum += lam[k];
      const double cand = (csum - budget) / (k + 1);
      if (k + 1 == n || lam[k + 1] <= cand) {
        tau = cand;
        break;
      }
    }
    for (double& v : lam) v = std::max(0.0, v - tau);
  }

  Mat r(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < s.dim(); ++k) acc += d.vectors(i, k) * d.vectors(j, k) * lam[k];
      r(i, j) = acc;
    }
  return SymMatrix::symmetrized(r);
}

namespace {

double inner(const SymMatrix& a, const SymMatrix& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) s += a(i, j) * b(i, j);
  return s;
}

double kkt_residual_one(const SymMatrix& qm, const SymMatrix& grad, double budget) {
  const double trq = qm.trace();
  const bool trace_active = trq >= budget * (1.0 - 1e-6);
  double lam = 0.0;
  if (trace_active && trq > 0.0) lam = std::max(0.0, inner(grad, qm) / trq);

  const SymMatrix m = lam * SymMatrix::identity(qm.dim()) - grad;
  const Mat mq = m.dense() * qm.dense();
  const double stat = fro_norm(mq);                       // stationarity + tr(MQ)=0
  const double psd_viol = std::max(0.0, -min_eigenvalue(m));
  const double slack = lam * std::max(0.0, budget - trq); // lambda (tr Q - P) = 0
  return stat * stat + psd_viol * psd_viol + slack * slack;
}

} // namespace

double kkt_residual(const ChannelMatrices& ch, const CovariancePair& q) {
  const auto [g1, g2] = tin_gradient(ch, q);
  return std::sqrt(kkt_residual_one(q.q1, g1, ch.p1) + kkt_residual_one(q.q2, g2, ch.p2));
}

namespace {

RankFlags rank_flags_of(const SymMatrix& qm) {
  const EigenDecomp d = sym_eigen(qm);
  const double top = std::max(d.values.front(), 0.0);
  RankFlags f;
  f.min_eig_ratio = top > 0.0 ? std::max(d.values.back(), 0.0) / top : 0.0;
  if (f.min_eig_ratio >= 1e-6)
    f.rank_class = RankClass::full_rank;
  else if (f.min_eig_ratio <= 1e-8)
    f.rank_class = RankClass::unit_rank;
  else
    f.rank_class = RankClass::indeterminate;
  f.full_rank = f.rank_class == RankClass::full_rank;
  return f;
}

SymMatrix random_psd(std::mt19937_64& rng, int n, double budget) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = gauss(rng);
  Mat q = r * transpose(r);
  std::uniform_real_distribution<double> frac(0.3, 1.0);
  const double target = frac(rng) * budget;
  const double tr = trace(q);
  return SymMatrix::symmetrized(tr > 0 ? (target / tr) * q : Mat::identity(n));
}

struct PgResult {
  CovariancePair q;
  double rate;
  bool converged;
  int iterations;
};

PgResult projected_gradient(const ChannelMatrices& ch, CovariancePair q, const OptimizeOptions& opts,
                             int restart_index) {
  double rate = tin_sum_rate(ch, q);
  if (opts.on_iterate) opts.on_iterate(restart_index, q, rate);
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const auto [g1, g2] = tin_gradient(ch, q);

    const SymMatrix p1 = psd_trace_project(g1 + q.q1, ch.p1);
    const SymMatrix p2 = psd_trace_project(g2 + q.q2, ch.p2);
    const double pg_norm = std::hypot((p1 - q.q1).fro_norm(), (p2 - q.q2).fro_norm());
    if (pg_norm <= opts.tol) {
      converged = true;
      break;
    }

    double alpha = opts.step;
    bool accepted = false;
    while (alpha > 1e-14) {
      CovariancePair cand{psd_trace_project(q.q1 + alpha * g1, ch.p1),
                          psd_trace_project(q.q2 + alpha * g2, ch.p2)};
      const double decrease = inner(g1, cand.q1 - q.q1) + inner(g2, cand.q2 - q.q2);
      if (decrease > 0.0) {
        const double cand_rate = tin_sum_rate(ch, cand);
        if (cand_rate >= rate + 1e-4 * decrease) {
          q = cand;
          rate = cand_rate;
          accepted = true;
          if (opts.on_iterate) opts.on_iterate(restart_index, q, rate);
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // line search stalled; re-test stationarity before giving up
      converged = pg_norm <= std::max(opts.tol, 1e-7);
      break;
    }
  }
  return {q, rate, converged, it};
}

bool same_point(const LocalOptimum& a, const LocalOptimum& b) {
  return std::fabs(a.rate - b.rate) <= 1e-9 &&
         (a.q.q1 - b.q.q1).fro_norm() + (a.q.q2 - b.q.q2).fro_norm() <= 1e-6;
}

bool lex_less(const SymMatrix& a, const SymMatrix& b) {
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
    }
  return false;
}

} // namespace

OptimizationReport optimize_tin(const ChannelMatrices& ch, const OptimizeOptions& opts) {
  ch.validate();
  if (opts.restarts < 1) fail(Errc::invalid_input, "optimize_tin: need at least one restart");

  std::vector<LocalOptimum> found;
  for (int s = 0; s < opts.restarts; ++s) {
    CovariancePair start;
    if (s == 0) {
      start.q1 = (ch.p1 / ch.tx1()) * SymMatrix::identity(ch.tx1());
      start.q2 = (ch.p2 / ch.tx2()) * SymMatrix::identity(ch.tx2());
    } else {
      std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(s));
      start.q1 = random_psd(rng, ch.tx1(), ch.p1);
      start.q2 = random_psd(rng, ch.tx2(), ch.p2);
    }
    const PgResult r = projected_gradient(ch, start, opts, s);
    LocalOptimum opt{r.q, r.rate, kkt_residual(ch, r.q), r.converged, r.iterations};
    bool dup = false;
    for (const auto& f : found)
      if (same_point(f, opt)) {
        dup = true;
        break;
      }
    if (!dup) found.push_back(std::move(opt));
  }

  std::stable_sort(found.begin(), found.end(), [](const LocalOptimum& a, const LocalOptimum& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    if (a.kkt_residual != b.kkt_residual) return a.kkt_residual < b.kkt_residual;
    return lex_less(a.q.q1, b.q.q1);
  });

  OptimizationReport rep;
  rep.q_star = found.front().q;
  rep.rate = found.front().rate;
  rep.kkt_residual = found.front().kkt_residual;
  rep.converged = found.front().converged;
  rep.restarts_used = opts.restarts;
  rep.rank1 = rank_flags_of(rep.q_star.q1);
  rep.rank2 = rank_flags_of(rep.q_star.q2);
  rep.local_optima = std::move(found);
  return rep;
}

namespace {

// log2 det via Cholesky; inputs are I + PSD so this cannot fail in practice.
double logdet2_chol(const Mat& m) {
  const int n = m.rows();
  Mat l(n, n);
  double ld = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = 0.5 * (m(i, j) + m(j, i));
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) fail(Errc::not_positive_definite, "logdet: matrix is not positive definite");
        l(i, i) = std::sqrt(s);
        ld += std::log2(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return ld;
}

std::vector<SymMatrix> tx_candidates(int n, double budget, const GridSpec& grid) {
  std::vector<SymMatrix> out;
  if (n == 1) {
    for (double f : grid.power_fracs) out.push_back(SymMatrix::diag({f * budget}));
    return out;
  }
  const double pi = std::acos(-1.0);
  for (int k = 0; k < grid.beam_angles; ++k) {
    const double phi = pi * k / grid.beam_angles;
    const Vec b{std::cos(phi), std::sin(phi)};
    for (double f : grid.power_fracs) out.push_back(SymMatrix::symmetrized(f * budget * outer(b, b)));
  }
  for (int ia = 0; ia <= grid.diag_steps; ++ia)
    for (int ib = 0; ia + ib <= grid.diag_steps; ++ib) {
      if (ia == 0 && ib == 0) continue;
      out.push_back(SymMatrix::diag({budget * ia / grid.diag_steps, budget * ib / grid.diag_steps}));
    }
  return out;
}

} // namespace

BruteForceResult brute_force_best(const ChannelMatrices& ch, const GridSpec& grid) {
  ch.validate();
  if (ch.tx1() > 2 || ch.tx2() > 2)
    fail(Errc::unsupported, "brute_force_best supports at most two transmit antennas per user");
  if (grid.beam_angles < 720) fail(Errc::invalid_input, "brute_force_best: beam_angles must be >= 720");

  const auto c1 = tx_candidates(ch.tx1(), ch.p1, grid);
  const auto c2 = tx_candidates(ch.tx2(), ch.p2, grid);

  // Per-candidate channel outputs, so the pair loop only adds and factorizes.
  struct Pre {
    Mat t_direct, t_cross;
    double ld_cross;  // log2 det(I + t_cross)
  };
  std::vector<Pre> p1(c1.size()), p2(c2.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    const Mat q = c1[i].dense();
    p1[i].t_direct = ch.h11 * q * transpose(ch.h11);
    p1[i].t_cross = ch.h21 * q * transpose(ch.h21);
    p1[i].ld_cross = logdet2_chol(Mat::identity(ch.rx2()) + p1[i].t_cross);
  }
  for (std::size_t j = 0; j < c2.size(); ++j) {
    const Mat q = c2[j].dense();
    p2[j].t_direct = ch.h22 * q * transpose(ch.h22);
    p2[j].t_cross = ch.h12 * q * transpose(ch.h12);
    p2[j].ld_cross = logdet2_chol(Mat::identity(ch.rx1()) + p2[j].t_cross);
  }

  double best = -1.0;
  std::size_t bi = 0, bj = 0;
  if (ch.rx1() <= 2 && ch.rx2() <= 2) {
    // allocation-free pair loop for the common small-receiver case
    const auto fast_ld = [](const Mat& a, const Mat& b) {
      if (a.rows() == 1) return std::log2(1.0 + a(0, 0) + b(0, 0));
      const double m00 = 1.0 + a(0, 0) + b(0, 0), m01 = a(0, 1) + b(0, 1);
      const double m10 = a(1, 0) + b(1, 0), m11 = 1.0 + a(1, 1) + b(1, 1);
      return std::log2(m00 * m11 - m01 * m10);
    };
    for (std::size_t i = 0; i < c1.size(); ++i) {
      for (std::size_t j = 0; j < c2.size(); ++j) {
        const double r = 0.5 * (fast_ld(p2[j].t_cross, p1[i].t_direct) - p2[j].ld_cross) +
                         0.5 * (fast_ld(p1[i].t_cross, p2[j].t_direct) - p1[i].ld_cross);
        if (r > best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    }
  } else {
    const Mat i1 = Mat::identity(ch.rx1()), i2 = Mat::identity(ch.rx2());
    for (std::size_t i = 0; i < c1.size(); ++i) {
      for (std::size_t j = 0; j < c2.size(); ++j) {
        const double r = 0.5 * (logdet2_chol(i1 + p2[j].t_cross + p1[i].t_direct) - p2[j].ld_cross) +
                         0.5 * (logdet2_chol(i2 + p1[i].t_cross + p2[j].t_direct) - p1[i].ld_cross);
        if (r > best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    }
  }
  return {{c1[bi], c2[bj]}, best};
}

} // namespace tinsum
