// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#include "core/genie.hpp"

#include <algorithm>
#include <cmath>

#include "core/channel.hpp"
#include "core/errors.hpp"

namespace tinsum {

namespace {

SymMatrix useful_gap(const Mat& a_other, const SymMatrix& sigma_other, const SymMatrix& sigma_self) {
  // I - A_j Sigma_j^-1 A_j^T - Sigma_i
  const Mat inv = sym_inverse(sigma_other);
  const Mat gap = Mat::identity(sigma_self.dim()) - a_other * inv * transpose(a_other) - sigma_self.dense();
  return SymMatrix::symmetrized(gap);
}

} // namespace

bool usefulness_check(const GenieParams& g) {
  return is_psd(useful_gap(g.a2, g.sigma2, g.sigma1)) && is_psd(useful_gap(g.a1, g.sigma1, g.sigma2));
}

double usefulness_margin(const GenieParams& g) {
  return std::min(min_eigenvalue(useful_gap(g.a2, g.sigma2, g.sigma1)),
                  min_eigenvalue(useful_gap(g.a1, g.sigma1, g.sigma2)));
}

double simo_usefulness_margin(const SimoGenie& g, const Vec& c) {
  if (!(g.eta > 0.0)) fail(Errc::invalid_genie, "simo genie requires eta > 0");
  if (g.v.size() != c.size()) fail(Errc::invalid_genie, "simo genie direction has wrong dimension");
  const double cv = dot(c, g.v);
  const double t = g.eta - g.k * g.k;
  const double den = t + g.k * g.k * cv * cv;
  if (den <= 1e-300) {
    // t == 0 and c^T v == 0: the bound degenerates to the A = 0 case, eta <= 1.
    if (std::fabs(cv) < 1e-12) return 1.0 - g.eta;
    return -g.eta;  // ratio collapses to zero; fails for any eta > 0
  }
  return t / den - g.eta;
}

bool simo_usefulness_check(const SimoGenie& g, const Vec& c) {
  return simo_usefulness_margin(g, c) >= -1e-12;
}

double smartness_residual(const ChannelMatrices& ch, const CovariancePair& q, const GenieParams& g) {
  ch.validate();
  const Mat q1 = q.q1.dense(), q2 = q.q2.dense();
  const Mat n1 = Mat::identity(ch.rx1()) + ch.h12 * q2 * transpose(ch.h12);
  const Mat n2 = Mat::identity(ch.rx2()) + ch.h21 * q1 * transpose(ch.h21);
  const Mat r1 = (transpose(g.a1) * sym_inverse(SymMatrix::symmetrized(n1)) * ch.h11 - ch.h21) * q1;
  const Mat r2 = (transpose(g.a2) * sym_inverse(SymMatrix::symmetrized(n2)) * ch.h22 - ch.h12) * q2;
  return fro_norm(r1) + fro_norm(r2);
}

MisoGenie miso_genie(const SymmetricVectorChannel& sch) {
  if (sch.kind != VectorKind::miso) fail(Errc::precondition_violated, "miso_genie requires a MISO channel");
  const double ct = std::cos(sch.theta), st = std::sin(sch.theta);
  const double hp = 1.0 + sch.h * sch.h * sch.P;

  const double a = sch.h * hp * ct / (ct * ct + hp * hp * st * st);
  if (a > 0.5) fail(Errc::no_valid_genie, "miso_genie: a > 0.5, no real sigma satisfies usefulness");
  const double sigma = 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - 4.0 * a * a));

  const Vec b = optimal_beam(sch);
  const double bc = b[0];
  const double bd = b[0] * ct + b[1] * st;
  const double h2pbc2 = sch.h * sch.h * sch.P * bc * bc;
  const double mu = (a + sch.h * sch.P * bc * bd) / (sigma + h2pbc2);

  // cross-check the closed forms against the definitional beam expressions
  const double a_def = sch.h * (bc / bd) * (1.0 + h2pbc2);
  if (std::fabs(a - a_def) > 1e-12 * std::max(1.0, std::fabs(a)))
    fail(Errc::internal, "miso_genie: closed form for a disagrees with the definitional expression");
  if (a > 1e-12) {
    // the alternative form subtracts terms of size sigma/a, so allow for
    // that cancellation when judging agreement
    const double mu_alt = bd / (sch.h * bc) - sigma / a;
    const double scale = std::max({1.0, std::fabs(mu), sigma / a});
    if (std::fabs(mu - mu_alt) > 1e-12 * scale)
      fail(Errc::internal, "miso_genie: the two expressions for mu disagree");
  }
  return {a, sigma, mu};
}

std::optional<SimoGenie> simo_genie_search(const SymmetricVectorChannel& sch) {
  if (sch.kind != VectorKind::simo) fail(Errc::precondition_violated, "simo_genie_search requires a SIMO channel");
  const double ct = std::cos(sch.theta), st = std::sin(sch.theta);
  const double hp = 1.0 + sch.h * sch.h * sch.P;

  const double g0 = ct / hp - sch.h;
  double alpha, beta;
  if (g0 >= 0.0) {
    const double n = std::hypot(g0, st);
    if (n > 0.0) {
      alpha = g0 / n;
      beta = st / n;
    } else {
      alpha = 1.0;
      beta = 0.0;
    }
  } else {
    alpha = 0.0;
    beta = 1.0;
  }

  double k = 0.0;
  if (sch.h > 0.0) {
    const double vjd = alpha * ct / hp + beta * st;  // v^T J^-1 d
    if (vjd <= 0.0) return std::nullopt;
    k = sch.h / vjd;
  }
  if (k * (1.0 + std::fabs(alpha)) > 1.0) return std::nullopt;

  const double t = std::max(0.0, 0.5 * (1.0 - k * k * (1.0 + alpha * alpha)));
  return SimoGenie{k, t + k * k, Vec{alpha, beta}};
}

GenieParams miso_genie_params(const MisoGenie& g) {
  GenieParams p;
  p.a1 = p.a2 = Mat{{g.a}};
  p.sigma1 = p.sigma2 = SymMatrix::diag({g.sigma});
  return p;
}

GenieParams simo_genie_params(const SimoGenie& g) {
  GenieParams p;
  p.a1 = p.a2 = g.k * outer(g.v, Vec{1.0, 0.0});
  p.sigma1 = p.sigma2 = g.eta * SymMatrix::identity(2);
  return p;
}

const char* certificate_verdict_name(CertificateVerdict v) {
  switch (v) {
    case CertificateVerdict::certified: return "certified";
    case CertificateVerdict::not_full_rank: return "not_full_rank";
    case CertificateVerdict::no_genie_found: return "no_genie_found";
    case CertificateVerdict::invalid: return "invalid";
  }
  return "?";
}

namespace {

// Pseudo-inverse via the eigendecomposition of B B^T.
Mat pinv(const Mat& b) {
  const SymMatrix bbt = SymMatrix::symmetrized(b * transpose(b));
  const EigenDecomp d = sym_eigen(bbt);
  const double tol = psd_tol(d.values);
  Mat inv(bbt.dim(), bbt.dim());
  for (int i = 0; i < bbt.dim(); ++i)
    for (int j = 0; j < bbt.dim(); ++j) {
      double s = 0.0;
      for (int k = 0; k < bbt.dim(); ++k)
        if (d.values[k] > tol) s += d.vectors(i, k) * d.vectors(j, k) / d.values[k];
      inv(i, j) = s;
    }
  return transpose(b) * inv;  // B^T (B B^T)^+
}

// Least-squares solve of X B = target for X; returns (X, relative residual).
std::pair<Mat, double> solve_right(const Mat& b, const Mat& target) {
  const Mat x = target * pinv(b);
  const double res = fro_norm(x * b - target) / std::max(1.0, fro_norm(target));
  return {x, res};
}

// Candidate family: scaled identity blended with the A^T A direction. The
// data term is normalized to half-unit trace so the blend stays strictly
// inside the PSD order interval even when A^T A is nearly rank one.
SymMatrix sigma_family(const Mat& a, double s) {
  const int n = a.cols();
  const SymMatrix ata = SymMatrix::symmetrized(transpose(a) * a);
  const double tr = ata.trace();
  SymMatrix dir = tr > 1e-300 ? (0.5 / tr) * ata : (0.25 / n) * SymMatrix::identity(n);
  return s * SymMatrix::identity(n) + (1.0 - s) * dir;
}

} // namespace

FullRankCertificate certify_full_rank_optimum(const ChannelMatrices& ch, const OptimizationReport& report) {
  FullRankCertificate out;
  ch.validate();
  if (report.q_star.q1.dim() != ch.tx1() || report.q_star.q2.dim() != ch.tx2()) {
    out.verdict = CertificateVerdict::invalid;
    out.note = "report covariances do not match the channel dimensions";
    return out;
  }
  if (!(report.kkt_residual <= 1e-6)) {
    out.verdict = CertificateVerdict::invalid;
    out.note = "report is not stationary (kkt_residual > 1e-6)";
    return out;
  }
  if (report.rank1.rank_class != RankClass::full_rank || report.rank2.rank_class != RankClass::full_rank) {
    out.verdict = CertificateVerdict::not_full_rank;
    out.note = "optimal covariances are not full rank; full-rank certification does not apply";
    return out;
  }

  const Mat q1 = report.q_star.q1.dense(), q2 = report.q_star.q2.dense();
  const Mat n1_inv = sym_inverse(SymMatrix::symmetrized(Mat::identity(ch.rx1()) + ch.h12 * q2 * transpose(ch.h12)));
  const Mat n2_inv = sym_inverse(SymMatrix::symmetrized(Mat::identity(ch.rx2()) + ch.h21 * q1 * transpose(ch.h21)));

  // Full-rank Q makes the smartness equations linear in A_i:
  // A_1^T (N_1^-1 H11) = H21 and A_2^T (N_2^-1 H22) = H12.
  const auto [a1t, res1] = solve_right(n1_inv * ch.h11, ch.h21);
  const auto [a2t, res2] = solve_right(n2_inv * ch.h22, ch.h12);
  if (res1 > 1e-8 || res2 > 1e-8) {
    out.verdict = CertificateVerdict::no_genie_found;
    out.note = "smartness equations have no exact solution for this channel";
    return out;
  }

  GenieParams g;
  g.a1 = transpose(a1t);
  g.a2 = transpose(a2t);

  static const double s_grid[] = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01};
  for (double s1 : s_grid) {
    for (double s2 : s_grid) {
      g.sigma1 = sigma_family(g.a1, s1);
      g.sigma2 = sigma_family(g.a2, s2);
      bool ok;
      try {
        ok = schur_psd_check(g.a1, g.sigma1) && schur_psd_check(g.a2, g.sigma2) && usefulness_check(g);
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        out.verdict = CertificateVerdict::certified;
        out.genie = g;
        out.smartness_res = smartness_residual(ch, report.q_star, g);
        out.usefulness_mgn = usefulness_margin(g);
        out.diff = diff_rate(ch, report.q_star, g);
        return out;
      }
    }
  }
  out.verdict = CertificateVerdict::no_genie_found;
  out.note = "the scaled-identity sigma search found no pair passing usefulness";
  return out;
}

} // namespace tinsum
