/* SPDX-License-Identifier: Apache-2.0
 * Copyright (c) tinsum contributors
 *
 * C API for the tinsum library: treating-interference-as-noise (TIN) sum
 * rates, covariance optimization, genie certificates, and low-interference
 * regime classification for two-user Gaussian interference channels.
 *
 * Conventions:
 *  - all matrices are row-major double arrays;
 *  - rates are in bits per channel use;
 *  - every function returning tinsum_status leaves a human-readable message
 *    in tinsum_last_error() on failure;
 *  - objects returned through out-parameters are owned by the caller and
 *    released with the matching _free function.
 */

#ifndef TINSUM_H
#define TINSUM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TINSUM_API __declspec(dllexport)
#else
#define TINSUM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tinsum_status {
  TINSUM_OK = 0,
  TINSUM_ERR_INVALID_INPUT = 1,
  TINSUM_ERR_NOT_POSITIVE_DEFINITE = 2,
  TINSUM_ERR_PRECONDITION = 3,
  TINSUM_ERR_INVALID_GENIE = 4,
  TINSUM_ERR_NO_VALID_GENIE = 5,
  TINSUM_ERR_UNSUPPORTED = 6,
  TINSUM_ERR_INTERNAL = 7
} tinsum_status;

TINSUM_API const char* tinsum_status_name(tinsum_status s);

/* Thread-local message describing the most recent failure in this thread. */
TINSUM_API const char* tinsum_last_error(void);

TINSUM_API const char* tinsum_version(void);

/* ---- channels ---------------------------------------------------------- */

typedef struct tinsum_channel tinsum_channel;

/* General MIMO channel. hij is rx_i x tx_j, row-major. */
TINSUM_API tinsum_status tinsum_channel_create_mimo(const double* h11, const double* h12,
                                                    const double* h21, const double* h22,
                                                    int rx1, int rx2, int tx1, int tx2,
                                                    double p1, double p2, tinsum_channel** out);

/* Symmetric vector channel in canonical coordinates. kind: 0 = MISO, 1 = SIMO. */
TINSUM_API tinsum_status tinsum_channel_create_vector(int kind, double theta, double h, double p,
                                                      tinsum_channel** out);

TINSUM_API void tinsum_channel_free(tinsum_channel* ch);

TINSUM_API void tinsum_channel_dims(const tinsum_channel* ch, int* rx1, int* rx2, int* tx1, int* tx2);
TINSUM_API int tinsum_channel_is_vector(const tinsum_channel* ch); /* 1 = MISO, 2 = SIMO, 0 = general */

/* ---- rates -------------------------------------------------------------- */

/* q1 is tx1 x tx1 and q2 is tx2 x tx2, row-major symmetric. */
TINSUM_API tinsum_status tinsum_tin_sum_rate(const tinsum_channel* ch, const double* q1,
                                             const double* q2, double* rate);

/* Genie-aided rate. a1 is rx1 x rx2, sigma1 is rx2 x rx2; a2 is rx2 x rx1,
 * sigma2 is rx1 x rx1 (the side information S_i carries the other receiver's
 * spatial dimension). */
TINSUM_API tinsum_status tinsum_ga_sum_rate(const tinsum_channel* ch, const double* q1,
                                            const double* q2, const double* a1, const double* a2,
                                            const double* sigma1, const double* sigma2, double* rate);

/* ---- covariance optimization -------------------------------------------- */

typedef struct tinsum_report tinsum_report;

typedef struct tinsum_optimize_options {
  int restarts;       /* default 8 */
  double step;        /* initial backtracking step, default 1.0 */
  double tol;         /* projected-gradient convergence norm, default 1e-8 */
  int max_iters;      /* default 5000 */
  uint64_t seed;      /* default 42 */
} tinsum_optimize_options;

TINSUM_API void tinsum_optimize_options_init(tinsum_optimize_options* opts);

TINSUM_API tinsum_status tinsum_optimize(const tinsum_channel* ch,
                                         const tinsum_optimize_options* opts, tinsum_report** out);
TINSUM_API void tinsum_report_free(tinsum_report* rep);

TINSUM_API double tinsum_report_rate(const tinsum_report* rep);
TINSUM_API double tinsum_report_kkt_residual(const tinsum_report* rep);
TINSUM_API int tinsum_report_converged(const tinsum_report* rep);
TINSUM_API int tinsum_report_restarts_used(const tinsum_report* rep);
TINSUM_API int tinsum_report_local_optima_count(const tinsum_report* rep);
/* user is 1 or 2; q must hold tx_user * tx_user doubles. */
TINSUM_API tinsum_status tinsum_report_covariance(const tinsum_report* rep, int user, double* q);
/* rank_class: "full_rank", "unit_rank" or "indeterminate". */
TINSUM_API tinsum_status tinsum_report_rank(const tinsum_report* rep, int user, int* full_rank,
                                            double* min_eig_ratio, const char** rank_class);

TINSUM_API tinsum_status tinsum_kkt_residual(const tinsum_channel* ch, const double* q1,
                                             const double* q2, double* residual);

/* ---- thresholds ---------------------------------------------------------- */

TINSUM_API tinsum_status tinsum_threshold_h0(double theta, double p, double* h0);
TINSUM_API tinsum_status tinsum_siso_threshold(double p, double* h0);

/* h0_out must hold n_theta * n_p doubles, written theta-major. */
TINSUM_API tinsum_status tinsum_sweep_threshold(const double* thetas, int n_theta,
                                                const double* ps, int n_p, double* h0_out);

/* Canonical sweep serialization: header theta,P,h0,sin_theta and
 * 17-significant-digit values, theta-major. Free with tinsum_string_free. */
TINSUM_API tinsum_status tinsum_sweep_threshold_csv(const double* thetas, int n_theta,
                                                    const double* ps, int n_p, char** out_csv);
TINSUM_API void tinsum_string_free(char* s);

/* ---- regime classification ----------------------------------------------- */

typedef struct tinsum_verdict tinsum_verdict;

/* Requires a vector channel; dispatches to the MISO or SIMO chain. */
TINSUM_API tinsum_status tinsum_classify(const tinsum_channel* ch, uint64_t seed,
                                         int trace_samples, tinsum_verdict** out);
TINSUM_API void tinsum_verdict_free(tinsum_verdict* v);

TINSUM_API int tinsum_verdict_certified(const tinsum_verdict* v);
TINSUM_API double tinsum_verdict_h0(const tinsum_verdict* v);
TINSUM_API int tinsum_verdict_evidence_count(const tinsum_verdict* v);
TINSUM_API tinsum_status tinsum_verdict_evidence(const tinsum_verdict* v, int index,
                                                 const char** name, int* pass, double* margin);

/* ---- full-rank certification ---------------------------------------------- */

typedef struct tinsum_certificate tinsum_certificate;

TINSUM_API tinsum_status tinsum_certify_full_rank(const tinsum_channel* ch, const tinsum_report* rep,
                                                tinsum_certificate** out);
TINSUM_API void tinsum_certificate_free(tinsum_certificate* r);

/* "certified", "not_full_rank", "no_genie_found" or "invalid". */
TINSUM_API const char* tinsum_certificate_verdict(const tinsum_certificate* r);
TINSUM_API const char* tinsum_certificate_note(const tinsum_certificate* r);
TINSUM_API double tinsum_certificate_diff_rate(const tinsum_certificate* r);
TINSUM_API double tinsum_certificate_smartness_residual(const tinsum_certificate* r);
TINSUM_API double tinsum_certificate_usefulness_margin(const tinsum_certificate* r);

/* ---- selftest ------------------------------------------------------------ */

typedef void (*tinsum_selftest_callback)(const char* name, int pass, const char* detail, void* user);

TINSUM_API tinsum_status tinsum_selftest(uint64_t seed, int* passed, int* failed,
                                         tinsum_selftest_callback cb, void* user);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TINSUM_H */
