// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#include "tinsum.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/channel.hpp"
#include "core/covopt.hpp"
#include "core/errors.hpp"
#include "core/genie.hpp"
#include "core/regime.hpp"
#include "core/selftest.hpp"

using namespace tinsum;

namespace {

thread_local std::string g_last_error;

tinsum_status to_status(Errc c) {
  switch (c) {
    case Errc::invalid_input: return TINSUM_ERR_INVALID_INPUT;
    case Errc::not_positive_definite: return TINSUM_ERR_NOT_POSITIVE_DEFINITE;
    case Errc::precondition_violated: return TINSUM_ERR_PRECONDITION;
    case Errc::invalid_genie: return TINSUM_ERR_INVALID_GENIE;
    case Errc::no_valid_genie: return TINSUM_ERR_NO_VALID_GENIE;
    case Errc::unsupported: return TINSUM_ERR_UNSUPPORTED;
    case Errc::internal: return TINSUM_ERR_INTERNAL;
  }
  return TINSUM_ERR_INTERNAL;
}

template <typename Fn>
tinsum_status guarded(Fn&& fn) {
  try {
    fn();
    return TINSUM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TINSUM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TINSUM_ERR_INTERNAL;
  }
}

Mat mat_from(const double* data, int rows, int cols) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = data[static_cast<std::size_t>(i) * cols + j];
  return m;
}

void mat_to(const Mat& m, double* out) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
}

// upper triangle authoritative, per the SymMatrix construction rule
SymMatrix sym_from(const double* data, int n) { return SymMatrix::from_upper(mat_from(data, n, n)); }

} // namespace

struct tinsum_channel {
  ChannelMatrices ch;
  int vector_kind = 0;  // 0 general, 1 MISO, 2 SIMO
  SymmetricVectorChannel sch{};
};

struct tinsum_report {
  OptimizationReport rep;
};

struct tinsum_verdict {
  RegimeVerdict v;
};

struct tinsum_certificate {
  FullRankCertificate r;
  std::string verdict_name;
};

extern "C" {

const char* tinsum_status_name(tinsum_status s) {
  switch (s) {
    case TINSUM_OK: return "ok";
    case TINSUM_ERR_INVALID_INPUT: return "invalid_input";
    case TINSUM_ERR_NOT_POSITIVE_DEFINITE: return "not_positive_definite";
    case TINSUM_ERR_PRECONDITION: return "precondition_violated";
    case TINSUM_ERR_INVALID_GENIE: return "invalid_genie";
    case TINSUM_ERR_NO_VALID_GENIE: return "no_valid_genie";
    case TINSUM_ERR_UNSUPPORTED: return "unsupported";
    case TINSUM_ERR_INTERNAL: return "internal";
  }
  return "?";
}

const char* tinsum_last_error(void) { return g_last_error.c_str(); }

const char* tinsum_version(void) { return "0.1.0"; }

tinsum_status tinsum_channel_create_mimo(const double* h11, const double* h12, const double* h21,
                                         const double* h22, int rx1, int rx2, int tx1, int tx2,
                                         double p1, double p2, tinsum_channel** out) {
  return guarded([&] {
    if (!h11 || !h12 || !h21 || !h22 || !out) fail(Errc::invalid_input, "null pointer argument");
    auto ch = std::make_unique<tinsum_channel>();
    ch->ch.h11 = mat_from(h11, rx1, tx1);
    ch->ch.h12 = mat_from(h12, rx1, tx2);
    ch->ch.h21 = mat_from(h21, rx2, tx1);
    ch->ch.h22 = mat_from(h22, rx2, tx2);
    ch->ch.p1 = p1;
    ch->ch.p2 = p2;
    ch->ch.validate();
    *out = ch.release();
  });
}

tinsum_status tinsum_channel_create_vector(int kind, double theta, double h, double p,
                                           tinsum_channel** out) {
  return guarded([&] {
    if (!out) fail(Errc::invalid_input, "null pointer argument");
    if (kind != 0 && kind != 1) fail(Errc::invalid_input, "kind must be 0 (MISO) or 1 (SIMO)");
    auto ch = std::make_unique<tinsum_channel>();
    ch->sch = make_vector_channel(kind == 0 ? VectorKind::miso : VectorKind::simo, theta, h, p);
    ch->ch = ch->sch.to_matrices();
    ch->vector_kind = kind == 0 ? 1 : 2;
    *out = ch.release();
  });
}

void tinsum_channel_free(tinsum_channel* ch) { delete ch; }

void tinsum_channel_dims(const tinsum_channel* ch, int* rx1, int* rx2, int* tx1, int* tx2) {
  if (!ch) return;
  if (rx1) *rx1 = ch->ch.rx1();
  if (rx2) *rx2 = ch->ch.rx2();
  if (tx1) *tx1 = ch->ch.tx1();
  if (tx2) *tx2 = ch->ch.tx2();
}

int tinsum_channel_is_vector(const tinsum_channel* ch) { return ch ? ch->vector_kind : 0; }

tinsum_status tinsum_tin_sum_rate(const tinsum_channel* ch, const double* q1, const double* q2,
                                  double* rate) {
  return guarded([&] {
    if (!ch || !q1 || !q2 || !rate) fail(Errc::invalid_input, "null pointer argument");
    const CovariancePair q{sym_from(q1, ch->ch.tx1()), sym_from(q2, ch->ch.tx2())};
    *rate = tin_sum_rate(ch->ch, q);
  });
}

tinsum_status tinsum_ga_sum_rate(const tinsum_channel* ch, const double* q1, const double* q2,
                                 const double* a1, const double* a2, const double* sigma1,
                                 const double* sigma2, double* rate) {
  return guarded([&] {
    if (!ch || !q1 || !q2 || !a1 || !a2 || !sigma1 || !sigma2 || !rate)
      fail(Errc::invalid_input, "null pointer argument");
    const CovariancePair q{sym_from(q1, ch->ch.tx1()), sym_from(q2, ch->ch.tx2())};
    GenieParams g;
    g.a1 = mat_from(a1, ch->ch.rx1(), ch->ch.rx2());
    g.a2 = mat_from(a2, ch->ch.rx2(), ch->ch.rx1());
    g.sigma1 = sym_from(sigma1, ch->ch.rx2());
    g.sigma2 = sym_from(sigma2, ch->ch.rx1());
    *rate = ga_sum_rate(ch->ch, q, g);
  });
}

void tinsum_optimize_options_init(tinsum_optimize_options* opts) {
  if (!opts) return;
  const OptimizeOptions d;
  opts->restarts = d.restarts;
  opts->step = d.step;
  opts->tol = d.tol;
  opts->max_iters = d.max_iters;
  opts->seed = d.seed;
}

tinsum_status tinsum_optimize(const tinsum_channel* ch, const tinsum_optimize_options* opts,
                              tinsum_report** out) {
  return guarded([&] {
    if (!ch || !out) fail(Errc::invalid_input, "null pointer argument");
    OptimizeOptions o;
    if (opts) {
      o.restarts = opts->restarts;
      o.step = opts->step;
      o.tol = opts->tol;
      o.max_iters = opts->max_iters;
      o.seed = opts->seed;
    }
    auto rep = std::make_unique<tinsum_report>();
    rep->rep = optimize_tin(ch->ch, o);
    *out = rep.release();
  });
}

void tinsum_report_free(tinsum_report* rep) { delete rep; }

double tinsum_report_rate(const tinsum_report* rep) { return rep ? rep->rep.rate : 0.0; }
double tinsum_report_kkt_residual(const tinsum_report* rep) { return rep ? rep->rep.kkt_residual : 0.0; }
int tinsum_report_converged(const tinsum_report* rep) { return rep && rep->rep.converged ? 1 : 0; }
int tinsum_report_restarts_used(const tinsum_report* rep) { return rep ? rep->rep.restarts_used : 0; }
int tinsum_report_local_optima_count(const tinsum_report* rep) {
  return rep ? static_cast<int>(rep->rep.local_optima.size()) : 0;
}

tinsum_status tinsum_report_covariance(const tinsum_report* rep, int user, double* q) {
  return guarded([&] {
    if (!rep || !q) fail(Errc::invalid_input, "null pointer argument");
    if (user != 1 && user != 2) fail(Errc::invalid_input, "user must be 1 or 2");
    mat_to(user == 1 ? rep->rep.q_star.q1.dense() : rep->rep.q_star.q2.dense(), q);
  });
}

tinsum_status tinsum_report_rank(const tinsum_report* rep, int user, int* full_rank,
                                 double* min_eig_ratio, const char** rank_class) {
  return guarded([&] {
    if (!rep) fail(Errc::invalid_input, "null pointer argument");
    if (user != 1 && user != 2) fail(Errc::invalid_input, "user must be 1 or 2");
    const RankFlags& f = user == 1 ? rep->rep.rank1 : rep->rep.rank2;
    if (full_rank) *full_rank = f.full_rank ? 1 : 0;
    if (min_eig_ratio) *min_eig_ratio = f.min_eig_ratio;
    if (rank_class) *rank_class = rank_class_name(f.rank_class);
  });
}

tinsum_status tinsum_kkt_residual(const tinsum_channel* ch, const double* q1, const double* q2,
                                  double* residual) {
  return guarded([&] {
    if (!ch || !q1 || !q2 || !residual) fail(Errc::invalid_input, "null pointer argument");
    const CovariancePair q{sym_from(q1, ch->ch.tx1()), sym_from(q2, ch->ch.tx2())};
    *residual = kkt_residual(ch->ch, q);
  });
}

tinsum_status tinsum_threshold_h0(double theta, double p, double* h0) {
  return guarded([&] {
    if (!h0) fail(Errc::invalid_input, "null pointer argument");
    *h0 = threshold_h0({theta, p});
  });
}

tinsum_status tinsum_siso_threshold(double p, double* h0) {
  return guarded([&] {
    if (!h0) fail(Errc::invalid_input, "null pointer argument");
    *h0 = siso_threshold(p);
  });
}

tinsum_status tinsum_sweep_threshold(const double* thetas, int n_theta, const double* ps, int n_p,
                                     double* h0_out) {
  return guarded([&] {
    if (!thetas || !ps || !h0_out) fail(Errc::invalid_input, "null pointer argument");
    if (n_theta < 1 || n_p < 1) fail(Errc::invalid_input, "grids must be nonempty");
    const auto rows = sweep_threshold(std::vector<double>(thetas, thetas + n_theta),
                                      std::vector<double>(ps, ps + n_p));
    for (std::size_t i = 0; i < rows.size(); ++i) h0_out[i] = rows[i].h0;
  });
}

tinsum_status tinsum_sweep_threshold_csv(const double* thetas, int n_theta, const double* ps,
                                         int n_p, char** out_csv) {
  return guarded([&] {
    if (!thetas || !ps || !out_csv) fail(Errc::invalid_input, "null pointer argument");
    const std::string csv = sweep_to_csv(sweep_threshold(
        std::vector<double>(thetas, thetas + n_theta), std::vector<double>(ps, ps + n_p)));
    char* buf = static_cast<char*>(std::malloc(csv.size() + 1));
    if (!buf) fail(Errc::internal, "out of memory");
    std::memcpy(buf, csv.c_str(), csv.size() + 1);
    *out_csv = buf;
  });
}

void tinsum_string_free(char* s) { std::free(s); }

tinsum_status tinsum_classify(const tinsum_channel* ch, uint64_t seed, int trace_samples,
                              tinsum_verdict** out) {
  return guarded([&] {
    if (!ch || !out) fail(Errc::invalid_input, "null pointer argument");
    if (ch->vector_kind == 0)
      fail(Errc::precondition_violated, "classify requires a symmetric MISO/SIMO channel");
    CertifyOptions opts;
    opts.seed = seed;
    if (trace_samples > 0) opts.trace_samples = trace_samples;
    auto v = std::make_unique<tinsum_verdict>();
    v->v = ch->vector_kind == 1 ? certify_miso(ch->sch, opts) : certify_simo(ch->sch, opts);
    *out = v.release();
  });
}

void tinsum_verdict_free(tinsum_verdict* v) { delete v; }

int tinsum_verdict_certified(const tinsum_verdict* v) {
  return v && v->v.classification == Classification::certified_low_interference ? 1 : 0;
}

double tinsum_verdict_h0(const tinsum_verdict* v) { return v ? v->v.h0 : 0.0; }

int tinsum_verdict_evidence_count(const tinsum_verdict* v) {
  return v ? static_cast<int>(v->v.evidence.size()) : 0;
}

tinsum_status tinsum_verdict_evidence(const tinsum_verdict* v, int index, const char** name,
                                      int* pass, double* margin) {
  return guarded([&] {
    if (!v) fail(Errc::invalid_input, "null pointer argument");
    if (index < 0 || index >= static_cast<int>(v->v.evidence.size()))
      fail(Errc::invalid_input, "evidence index out of range");
    const EvidenceItem& e = v->v.evidence[index];
    if (name) *name = e.name.c_str();
    if (pass) *pass = e.pass ? 1 : 0;
    if (margin) *margin = e.margin;
  });
}

tinsum_status tinsum_certify_full_rank(const tinsum_channel* ch, const tinsum_report* rep,
                                     tinsum_certificate** out) {
  return guarded([&] {
    if (!ch || !rep || !out) fail(Errc::invalid_input, "null pointer argument");
    auto r = std::make_unique<tinsum_certificate>();
    r->r = certify_full_rank_optimum(ch->ch, rep->rep);
    r->verdict_name = certificate_verdict_name(r->r.verdict);
    *out = r.release();
  });
}

void tinsum_certificate_free(tinsum_certificate* r) { delete r; }

const char* tinsum_certificate_verdict(const tinsum_certificate* r) { return r ? r->verdict_name.c_str() : "?"; }
const char* tinsum_certificate_note(const tinsum_certificate* r) { return r ? r->r.note.c_str() : ""; }
double tinsum_certificate_diff_rate(const tinsum_certificate* r) { return r ? r->r.diff : 0.0; }
double tinsum_certificate_smartness_residual(const tinsum_certificate* r) { return r ? r->r.smartness_res : 0.0; }
double tinsum_certificate_usefulness_margin(const tinsum_certificate* r) { return r ? r->r.usefulness_mgn : 0.0; }

tinsum_status tinsum_selftest(uint64_t seed, int* passed, int* failed, tinsum_selftest_callback cb,
                              void* user) {
  return guarded([&] {
    const SelftestResult r = run_selftest(seed);
    if (passed) *passed = r.passed;
    if (failed) *failed = r.failed;
    if (cb)
      for (const auto& c : r.checks) cb(c.name.c_str(), c.pass ? 1 : 0, c.detail.c_str(), user);
  });
}

} // extern "C"
