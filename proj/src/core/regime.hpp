// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace tinsum {

struct ThresholdQuery {
  double theta = 0.0;  // [0, pi/2]
  double P = 0.0;      // > 0 (0 allowed for the SISO reduction)
};

/// Positive solution of h^2 - sin^2(theta) = ((cos(theta)/(1+h^2 P) - h)_+)^2
/// by bisection on [sin(theta) (1 - 1e-15), 1]; the left end has residual
/// <= 0 because the right-hand side is nonnegative, and g(1) = cos^2(theta)
/// >= 0. Absolute tolerance 1e-10.
double threshold_h0(const ThresholdQuery& q);

/// Positive root of h (1 + h^2 P) = 0.5; equals threshold_h0(0, P).
double siso_threshold(double P);

/// g(h) from the implicit threshold equation; the root-validity residual.
double threshold_residual(double h, double theta, double P);

struct EvidenceItem {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // positive means the check held with room to spare
};

enum class Classification { certified_low_interference, uncertified };

const char* classification_name(Classification c);

struct RegimeVerdict {
  double h0 = 0.0;
  Classification classification = Classification::uncertified;
  std::vector<EvidenceItem> evidence;  // evaluated in order; stops at the first failure
};

struct CertifyOptions {
  std::uint64_t seed = 42;
  int trace_samples = 500;
};

/// Full certification chain for the symmetric MISO channel: threshold, genie
/// existence (a < 0.5), combiner bound (mu h < cos theta), top-eigenvector
/// property of M, sampled trace inequality, and the useful+smart genie checks
/// at Q* = P b b^T. Certified iff every check passes.
RegimeVerdict certify_miso(const SymmetricVectorChannel& sch, const CertifyOptions& opts = {});

/// SIMO chain: threshold, constructive genie existence, relaxed usefulness,
/// and the smartness equation residual.
RegimeVerdict certify_simo(const SymmetricVectorChannel& sch, const CertifyOptions& opts = {});

struct SweepRow {
  double theta = 0.0, P = 0.0, h0 = 0.0, sin_theta = 0.0;
};

/// Threshold table in theta-major order.
std::vector<SweepRow> sweep_threshold(const std::vector<double>& thetas, const std::vector<double>& Ps);

/// CSV with header theta,P,h0,sin_theta and 17-significant-digit values.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

} // namespace tinsum
