// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#include "core/regime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "core/channel.hpp"
#include "core/errors.hpp"
#include "core/genie.hpp"

namespace tinsum {

double threshold_residual(double h, double theta, double P) {
  const double pos = std::max(0.0, std::cos(theta) / (1.0 + h * h * P) - h);
  return h * h - std::sin(theta) * std::sin(theta) - pos * pos;
}

double threshold_h0(const ThresholdQuery& q) {
  if (!std::isfinite(q.theta) || q.theta < 0.0 || q.theta > std::acos(-1.0) / 2.0 + 1e-15)
    fail(Errc::invalid_input, "threshold_h0: theta must lie in [0, pi/2]");
  if (!std::isfinite(q.P) || q.P < 0.0) fail(Errc::invalid_input, "threshold_h0: P must be nonnegative");

  double lo = std::sin(q.theta) * (1.0 - 1e-15);
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (threshold_residual(mid, q.theta, q.P) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double siso_threshold(double P) {
  if (!std::isfinite(P) || P < 0.0) fail(Errc::invalid_input, "siso_threshold: P must be nonnegative");
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * (1.0 + mid * mid * P) <= 0.5)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

const char* classification_name(Classification c) {
  return c == Classification::certified_low_interference ? "certified_low_interference" : "uncertified";
}

namespace {

bool push(RegimeVerdict& v, const std::string& name, bool pass, double margin) {
  v.evidence.push_back({name, pass, margin});
  if (!pass) v.classification = Classification::uncertified;
  return pass;
}

} // namespace

RegimeVerdict certify_miso(const SymmetricVectorChannel& sch, const CertifyOptions& opts) {
  if (sch.kind != VectorKind::miso) fail(Errc::precondition_violated, "certify_miso requires a MISO channel");
  RegimeVerdict v;
  v.classification = Classification::certified_low_interference;
  v.h0 = threshold_h0({sch.theta, sch.P});

  if (!push(v, "h_lt_h0", sch.h < v.h0, v.h0 - sch.h)) return v;

  const double ct = std::cos(sch.theta), st = std::sin(sch.theta);
  const double hp = 1.0 + sch.h * sch.h * sch.P;
  const double a = sch.h * hp * ct / (ct * ct + hp * hp * st * st);
  if (!push(v, "a_lt_half", a < 0.5, 0.5 - a)) return v;

  const MisoGenie g = miso_genie(sch);
  if (!push(v, "mu_h_lt_cos", g.mu * sch.h < ct, ct - g.mu * sch.h)) return v;

  // M = (d - mu h c)(d - mu h c)^T + h^2 c c^T; the optimal beam must be its
  // top eigenvector (Q* = P b b^T then maximizes tr(MQ) over the budget).
  const Vec d{ct, st}, c{1.0, 0.0};
  Vec x1{d[0] - g.mu * sch.h, d[1]};
  Vec x2{sch.h, 0.0};
  const Mat m = outer(x1, x1) + outer(x2, x2);
  const SymMatrix ms = SymMatrix::symmetrized(m);
  const Vec b = optimal_beam(sch);
  const Vec mb = m * b;
  const double lam_b = dot(b, mb);
  Vec resid = mb;
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= lam_b * b[i];
  const double eig_resid = norm(resid);
  bool is_top = eig_resid <= 1e-9;
  if (is_top) {
    const EigenDecomp dec = sym_eigen(ms);
    is_top = lam_b >= dec.values.front() - 1e-9;
    if (is_top && sch.h > 0.0) is_top = top_eig_rank2_predicate(x1, x2, b);
  }
  if (!push(v, "eigvec_M", is_top, eig_resid)) return v;

  // sampled trace inequality tr(MQ) <= tr(MQ*), plus deterministic extremes
  const SymMatrix qstar = SymMatrix::symmetrized(sch.P * outer(b, b));
  const double tr_star = trace(m * qstar.dense());
  double worst = 1e300;
  const auto probe = [&](const SymMatrix& qm) { worst = std::min(worst, tr_star - trace(m * qm.dense())); };
  probe(SymMatrix::symmetrized(sch.P * outer(c, c)));
  probe(SymMatrix::symmetrized(sch.P * outer(d, d)));
  probe((sch.P / 2.0) * SymMatrix::identity(2));
  std::mt19937_64 rng(opts.seed ^ 0x7ac30ffULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int i = 0; i < opts.trace_samples; ++i) {
    Mat r(2, 2);
    for (int a_ = 0; a_ < 2; ++a_)
      for (int b_ = 0; b_ < 2; ++b_) r(a_, b_) = gauss(rng);
    Mat q = r * transpose(r);
    const double tr = trace(q);
    if (tr > 0) q = (frac(rng) * sch.P / tr) * q;
    probe(SymMatrix::symmetrized(q));
  }
  if (!push(v, "trace_ineq", worst >= -1e-9, worst)) return v;

  // usefulness with equality and smartness at Q* = P b b^T
  const double useful_eq = std::fabs(g.sigma - (1.0 - g.a * g.a / g.sigma));
  const double smart = smartness_residual(sch.to_matrices(), {qstar, qstar}, miso_genie_params(g));
  push(v, "genie_valid", useful_eq <= 1e-9 && smart <= 1e-10, std::max(useful_eq, smart));
  return v;
}

RegimeVerdict certify_simo(const SymmetricVectorChannel& sch, const CertifyOptions&) {
  if (sch.kind != VectorKind::simo) fail(Errc::precondition_violated, "certify_simo requires a SIMO channel");
  RegimeVerdict v;
  v.classification = Classification::certified_low_interference;
  v.h0 = threshold_h0({sch.theta, sch.P});

  // The SIMO construction is valid on the closed region h <= h0; allow the
  // bisection tolerance so the exact boundary (h = sin theta at large P)
  // still classifies.
  if (!push(v, "h_le_h0", sch.h <= v.h0 + 1e-9, v.h0 - sch.h)) return v;

  const auto g = simo_genie_search(sch);
  double found_margin = -1.0;
  if (g) found_margin = 1.0 - g->k * (1.0 + std::fabs(g->v[0]));
  if (!push(v, "genie_found", g.has_value(), found_margin)) return v;

  const Vec c{1.0, 0.0};
  if (!push(v, "genie_cond2", g->eta >= g->k * g->k - 1e-12, g->eta - g->k * g->k)) return v;
  if (!push(v, "usefulness", simo_usefulness_check(*g, c), simo_usefulness_margin(*g, c))) return v;

  const SymMatrix qp = SymMatrix::diag({sch.P});
  const double smart = smartness_residual(sch.to_matrices(), {qp, qp}, simo_genie_params(*g));
  push(v, "smartness", smart <= 1e-10, smart);
  return v;
}

std::vector<SweepRow> sweep_threshold(const std::vector<double>& thetas, const std::vector<double>& Ps) {
  if (thetas.empty() || Ps.empty()) fail(Errc::invalid_input, "sweep_threshold: empty grid");
  std::vector<SweepRow> rows;
  rows.reserve(thetas.size() * Ps.size());
  for (double theta : thetas)
    for (double P : Ps) rows.push_back({theta, P, threshold_h0({theta, P}), std::sin(theta)});
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "theta,P,h0,sin_theta\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.theta, r.P, r.h0, r.sin_theta);
    out += buf;
  }
  return out;
}

} // namespace tinsum
