// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#include "core/channel.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace tinsum {

void ChannelMatrices::validate() const {
  if (h11.rows() < 1 || h11.cols() < 1 || h22.rows() < 1 || h22.cols() < 1)
    fail(Errc::invalid_input, "channel matrices must be nonempty");
  if (h11.rows() != h12.rows()) fail(Errc::invalid_input, "H11 and H12 must have the same number of rows");
  if (h21.rows() != h22.rows()) fail(Errc::invalid_input, "H21 and H22 must have the same number of rows");
  if (h11.cols() != h21.cols()) fail(Errc::invalid_input, "H11 and H21 must have the same number of columns");
  if (h12.cols() != h22.cols()) fail(Errc::invalid_input, "H12 and H22 must have the same number of columns");
  if (!all_finite(h11) || !all_finite(h12) || !all_finite(h21) || !all_finite(h22))
    fail(Errc::invalid_input, "channel matrices must be finite");
  if (!(p1 > 0.0) || !(p2 > 0.0) || !std::isfinite(p1) || !std::isfinite(p2))
    fail(Errc::invalid_input, "power budgets must be positive and finite");
}

SymmetricVectorChannel make_vector_channel(VectorKind kind, double theta, double h, double P) {
  if (!std::isfinite(theta) || theta < 0.0 || theta > std::acos(-1.0) / 2.0 + 1e-15)
    fail(Errc::invalid_input, "theta must lie in [0, pi/2]");
  if (!std::isfinite(h)) fail(Errc::invalid_input, "h must be finite");
  if (!(P > 0.0) || !std::isfinite(P)) fail(Errc::invalid_input, "P must be positive and finite");
  return {theta, std::fabs(h), P, kind};
}

ChannelMatrices SymmetricVectorChannel::to_matrices() const {
  const double ct = std::cos(theta), st = std::sin(theta);
  ChannelMatrices ch;
  if (kind == VectorKind::miso) {
    ch.h11 = ch.h22 = Mat{{ct, st}};
    ch.h12 = ch.h21 = Mat{{h, 0.0}};
  } else {
    ch.h11 = ch.h22 = Mat{{ct}, {st}};
    ch.h12 = ch.h21 = Mat{{h}, {0.0}};
  }
  ch.p1 = ch.p2 = P;
  return ch;
}

Canonicalization canonicalize(const Vec& d_raw, const Vec& c_raw) {
  if (d_raw.size() != c_raw.size()) fail(Errc::invalid_input, "canonicalize: dimension mismatch");
  const int m = static_cast<int>(d_raw.size());
  if (m < 1) fail(Errc::invalid_input, "canonicalize: empty vectors");
  const double nd = norm(d_raw), nc = norm(c_raw);
  if (nd == 0.0 || nc == 0.0 || !std::isfinite(nd) || !std::isfinite(nc))
    fail(Errc::invalid_input, "canonicalize: vectors must be nonzero and finite");

  Vec dh = d_raw, chat = c_raw;
  for (double& x : dh) x /= nd;
  for (double& x : chat) x /= nc;
  double cosd = dot(dh, chat);
  if (cosd < 0.0) {  // fold the sign into c; theta stays in [0, pi/2]
    for (double& x : chat) x = -x;
    cosd = -cosd;
  }
  cosd = std::min(cosd, 1.0);
  const double theta = std::acos(cosd);

  Canonicalization out;
  out.theta = theta;
  out.basis = Mat(m, 2);
  for (int i = 0; i < m; ++i) out.basis(i, 0) = chat[i];
  if (m == 1) return out;  // degenerate: no orthogonal direction exists

  Vec w(m);
  for (int i = 0; i < m; ++i) w[i] = dh[i] - cosd * chat[i];
  const double s = norm(w);
  if (s > 1e-12) {
    for (int i = 0; i < m; ++i) out.basis(i, 1) = w[i] / s;
  } else {
    // theta == 0: smallest-index completion of c to an orthonormal pair
    for (int k = 0; k < m; ++k) {
      Vec u(m, 0.0);
      u[k] = 1.0;
      const double proj = chat[k];
      for (int i = 0; i < m; ++i) u[i] -= proj * chat[i];
      const double nu = norm(u);
      if (nu > 1e-8) {
        for (int i = 0; i < m; ++i) out.basis(i, 1) = u[i] / nu;
        break;
      }
    }
  }
  return out;
}

void validate_covariances(const ChannelMatrices& ch, const CovariancePair& q) {
  if (q.q1.dim() != ch.tx1())
    fail(Errc::invalid_input, "Q1 dimension does not match the columns of H11/H21");
  if (q.q2.dim() != ch.tx2())
    fail(Errc::invalid_input, "Q2 dimension does not match the columns of H12/H22");
  const auto check = [](const SymMatrix& qm, double budget, const char* name) {
    const EigenDecomp d = sym_eigen(qm);
    if (d.values.back() < -psd_tol(d.values))
      fail(Errc::invalid_input, std::string(name) + " is not positive semidefinite");
    if (qm.trace() > budget + 1e-9)
      fail(Errc::invalid_input, std::string(name) + " exceeds the trace budget");
  };
  check(q.q1, ch.p1, "Q1");
  check(q.q2, ch.p2, "Q2");
}

namespace {

double logdet2(const Mat& m) { return logdet_psd(SymMatrix::symmetrized(m)); }

// Covariance blocks of (Y_i, S_i) for one receiver. ha/qa belong to the user
// being decoded, hb/qb to the interferer, hc is the cross matrix inside S_i.
struct ReceiverBlocks {
  Mat cy, cs, cys;  // full covariance
  Mat ny;           // Cov(Y_i | X_i) = I + hb Qb hb^T
};

ReceiverBlocks receiver_blocks(const Mat& ha, const Mat& hb, const Mat& hc, const SymMatrix& qa,
                               const SymMatrix& qb, const Mat& a, const SymMatrix& sigma) {
  ReceiverBlocks r;
  const Mat qa_d = qa.dense(), qb_d = qb.dense();
  r.ny = Mat::identity(ha.rows()) + hb * qb_d * transpose(hb);
  r.cy = r.ny + ha * qa_d * transpose(ha);
  r.cs = hc * qa_d * transpose(hc) + sigma.dense();
  r.cys = ha * qa_d * transpose(hc) + a;
  return r;
}

} // namespace

double tin_sum_rate(const ChannelMatrices& ch, const CovariancePair& q) {
  ch.validate();
  validate_covariances(ch, q);
  double rate = 0.0;
  const Mat q1 = q.q1.dense(), q2 = q.q2.dense();
  {
    const Mat n1 = Mat::identity(ch.rx1()) + ch.h12 * q2 * transpose(ch.h12);
    const Mat g1 = n1 + ch.h11 * q1 * transpose(ch.h11);
    rate += 0.5 * (logdet2(g1) - logdet2(n1));
  }
  {
    const Mat n2 = Mat::identity(ch.rx2()) + ch.h21 * q1 * transpose(ch.h21);
    const Mat g2 = n2 + ch.h22 * q2 * transpose(ch.h22);
    rate += 0.5 * (logdet2(g2) - logdet2(n2));
  }
  return rate;
}

double ga_sum_rate(const ChannelMatrices& ch, const CovariancePair& q, const GenieParams& g) {
  ch.validate();
  validate_covariances(ch, q);
  // S_1 = H21 X_1 + W_1 and S_2 = H12 X_2 + W_2, so W_1 lives in rx2
  // dimensions and W_2 in rx1 dimensions.
  if (g.a1.rows() != ch.rx1() || g.a1.cols() != ch.rx2() || g.sigma1.dim() != ch.rx2())
    fail(Errc::invalid_genie, "genie blocks for user 1 have wrong dimensions");
  if (g.a2.rows() != ch.rx2() || g.a2.cols() != ch.rx1() || g.sigma2.dim() != ch.rx1())
    fail(Errc::invalid_genie, "genie blocks for user 2 have wrong dimensions");
  try {
    if (!schur_psd_check(g.a1, g.sigma1) || !schur_psd_check(g.a2, g.sigma2))
      fail(Errc::invalid_genie, "genie blocks are not a valid joint covariance");
  } catch (const Error& e) {
    if (e.code() == Errc::not_positive_definite)
      fail(Errc::invalid_genie, "genie noise covariance is not positive definite");
    throw;
  }

  double rate = 0.0;
  const auto add_user = [&rate](const ReceiverBlocks& b, const Mat& a, const SymMatrix& sigma) {
    const Mat joint = block2x2(b.cy, b.cys, transpose(b.cys), b.cs);
    const Mat cond = block2x2(b.ny, a, transpose(a), sigma.dense());
    rate += 0.5 * (logdet2(joint) - logdet2(cond));
  };
  add_user(receiver_blocks(ch.h11, ch.h12, ch.h21, q.q1, q.q2, g.a1, g.sigma1), g.a1, g.sigma1);
  add_user(receiver_blocks(ch.h22, ch.h21, ch.h12, q.q2, q.q1, g.a2, g.sigma2), g.a2, g.sigma2);
  return rate;
}

double diff_rate(const ChannelMatrices& ch, const CovariancePair& q, const GenieParams& g) {
  return ga_sum_rate(ch, q, g) - tin_sum_rate(ch, q);
}

Vec optimal_beam(const SymmetricVectorChannel& sch) {
  const Vec d{std::cos(sch.theta), std::sin(sch.theta)};
  const Vec c{1.0, 0.0};
  Vec jd = rank_one_inv_apply(sch.h * sch.h * sch.P, c, d);
  const double n = norm(jd);
  for (double& x : jd) x /= n;
  return jd;
}

double sinr_closed_form(const SymmetricVectorChannel& sch) {
  const double ct = std::cos(sch.theta), st = std::sin(sch.theta);
  const double h2p = sch.h * sch.h * sch.P;
  return sch.P * ct * ct / (1.0 + h2p) + sch.P * st * st;
}

double beamforming_sum_rate(const SymmetricVectorChannel& sch) {
  return std::log2(1.0 + sinr_closed_form(sch));
}

} // namespace tinsum
