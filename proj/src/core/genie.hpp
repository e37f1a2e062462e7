// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include <optional>
#include <string>

#include "core/covopt.hpp"
#include "core/types.hpp"

namespace tinsum {

/// Scalar genie for the symmetric MISO channel: a = E[W_i Z_i],
/// sigma = E[W_i^2] = 0.5 + 0.5 sqrt(1 - 4a^2), and the MMSE combiner
/// weight mu used in the trace-inequality step.
struct MisoGenie {
  double a = 0.0;
  double sigma = 1.0;
  double mu = 0.0;
};

/// Structured SIMO genie: A = k v c^T, Sigma = eta I with unit v.
struct SimoGenie {
  double k = 0.0;
  double eta = 1.0;
  Vec v;
};

/// Usefulness LMIs: Sigma_1 <= I - A_2 Sigma_2^-1 A_2^T and the swap, each
/// tested with the relative PSD tolerance.
bool usefulness_check(const GenieParams& g);

/// Signed margin of the usefulness LMIs (min eigenvalue over both
/// conditions); usefulness_check == (margin >= -psd_tol).
double usefulness_margin(const GenieParams& g);

/// Relaxed usefulness for cross matrices of the form h*c (not full column
/// rank): (c^T Sigma^-1 c)^-1 <= (c^T (I - A Sigma^-1 A^T)^-1 c)^-1, which
/// for the structured genie reduces to
/// eta <= (eta - k^2)/(eta - k^2 (1 - (c^T v)^2)).
bool simo_usefulness_check(const SimoGenie& g, const Vec& c);
double simo_usefulness_margin(const SimoGenie& g, const Vec& c);

/// Frobenius norm of (A_1^T (H12 Q2 H12^T + I)^-1 H11 - H21) Q1 plus the
/// symmetric term; zero iff the genie is smart w.r.t. (Q1, Q2).
double smartness_residual(const ChannelMatrices& ch, const CovariancePair& q, const GenieParams& g);

/// Closed-form MISO genie. Throws NoValidGenie when a > 0.5 (no real sigma
/// solves the usefulness quadratic); cross-validates the closed forms against
/// the definitional beam-based expressions.
MisoGenie miso_genie(const SymmetricVectorChannel& sch);

/// Constructive SIMO genie search: picks v from the sign of
/// cos(theta)/(1+h^2 P) - h, k from the smartness equation, and eta at the
/// vertex of the usefulness quadratic. Empty iff k (1 + |c^T v|) > 1, which
/// happens exactly above the threshold.
std::optional<SimoGenie> simo_genie_search(const SymmetricVectorChannel& sch);

/// Embeds the scalar/structured genies as full GenieParams blocks (same genie
/// for both users; the constructions are symmetric).
GenieParams miso_genie_params(const MisoGenie& g);
GenieParams simo_genie_params(const SimoGenie& g);

enum class CertificateVerdict { certified, not_full_rank, no_genie_found, invalid };

const char* certificate_verdict_name(CertificateVerdict v);

struct FullRankCertificate {
  CertificateVerdict verdict = CertificateVerdict::invalid;
  std::optional<GenieParams> genie;
  double smartness_res = 0.0;   // at q_star, for the solved A blocks
  double usefulness_mgn = 0.0;  // min-eigenvalue margin of the accepted pair
  double diff = 0.0;            // ga - tin at q_star under the found genie
  std::string note;
};

/// Full-rank KKT certification: requires a stationary report
/// (kkt_residual <= 1e-6), both covariances full rank, an exact linear solve
/// of the smartness equations for A_i, and a grid search over the family
/// Sigma_i = s I + (1-s) * normalized(A_i^T A_i) until a pair passes the
/// usefulness LMIs. The Sigma family is a search heuristic; no_genie_found
/// means this search failed, not that no genie exists.
FullRankCertificate certify_full_rank_optimum(const ChannelMatrices& ch,
                                              const OptimizationReport& report);

} // namespace tinsum
