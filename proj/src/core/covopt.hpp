// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace tinsum {

enum class RankClass { full_rank, unit_rank, indeterminate };

struct RankFlags {
  bool full_rank = false;
  double min_eig_ratio = 0.0;  // lambda_min / lambda_max
  RankClass rank_class = RankClass::indeterminate;
};

const char* rank_class_name(RankClass c);

struct LocalOptimum {
  CovariancePair q;
  double rate = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct OptimizeOptions {
  int restarts = 8;
  double step = 1.0;       // initial backtracking step
  double tol = 1e-8;       // projected-gradient norm at convergence
  int max_iters = 5000;
  std::uint64_t seed = 42;
  // observer for accepted iterates (restart index, iterate, rate)
  std::function<void(int, const CovariancePair&, double)> on_iterate;
};

struct OptimizationReport {
  CovariancePair q_star;
  double rate = 0.0;
  double kkt_residual = 0.0;
  RankFlags rank1, rank2;
  int restarts_used = 0;
  bool converged = false;
  std::vector<LocalOptimum> local_optima;  // distinct stationary points found
};

/// Analytic gradient of the TIN sum rate w.r.t. (Q1, Q2), in bits. Satisfies
/// dR = tr(G1 dQ1) + tr(G2 dQ2) for symmetric perturbations.
std::pair<SymMatrix, SymMatrix> tin_gradient(const ChannelMatrices& ch, const CovariancePair& q);

/// Frobenius-nearest point of {X >= 0, tr X <= budget}: eigenvalue clamp at
/// zero, then a uniform shift-and-clamp when the trace still exceeds the
/// budget. Exactly feasible inputs pass through unchanged.
SymMatrix psd_trace_project(const SymMatrix& s, double budget);

/// Fits multipliers lambda_i >= 0, M_i >= 0 for grad R = lambda I - M with
/// complementary slackness and returns the aggregate violation norm; zero at
/// exact KKT points of the trace-constrained problem.
double kkt_residual(const ChannelMatrices& ch, const CovariancePair& q);

/// Projected-gradient ascent with Armijo backtracking from multiple starts
/// (isotropic plus seeded random PSD draws). Ties across restarts break by
/// highest rate, then lowest KKT residual, then lexicographic vec(Q1).
OptimizationReport optimize_tin(const ChannelMatrices& ch, const OptimizeOptions& opts = {});

struct GridSpec {
  int beam_angles = 720;
  std::vector<double> power_fracs{0.25, 0.5, 0.75, 1.0};
  int diag_steps = 6;  // simplex resolution for full-rank diagonal mixtures
};

struct BruteForceResult {
  CovariancePair q;
  double rate = 0.0;
};

/// Exhaustive lower-bound oracle over unit-rank beams crossed with power
/// levels plus diagonal mixtures. Only supports up to two transmit antennas
/// per user.
BruteForceResult brute_force_best(const ChannelMatrices& ch, const GridSpec& grid = {});

} // namespace tinsum
