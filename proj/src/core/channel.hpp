// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include "core/types.hpp"

namespace tinsum {

struct Canonicalization {
  double theta;  // angle between the normalized directions, in [0, pi/2]
  Mat basis;     // M x 2, columns (c, c_perp)
};

/// Reduces an M-antenna direction pair to the canonical two-antenna frame:
/// the angle between d and c plus the orthonormal basis (c, c_perp) with
/// c_perp = (d - cos(theta) c)/sin(theta). For theta = 0 the completion picks
/// the smallest-index coordinate direction; for M = 1 the second column is
/// zero (there is no orthogonal direction to span).
Canonicalization canonicalize(const Vec& d_raw, const Vec& c_raw);

/// Gaussian TIN sum rate in bits per channel use:
/// sum_i 1/2 log2 det(I + H_ii Q_i H_ii^T (I + H_ij Q_j H_ij^T)^-1).
double tin_sum_rate(const ChannelMatrices& ch, const CovariancePair& q);

/// Genie-aided TIN sum rate sum_i I(X_i; Y_i, S_i) with side information
/// S_i = H_ji X_i + W_i, evaluated from the joint Gaussian covariance of
/// (Y_i, S_i); the differential-entropy constants cancel in the mutual
/// information.
double ga_sum_rate(const ChannelMatrices& ch, const CovariancePair& q, const GenieParams& g);

/// ga_sum_rate - tin_sum_rate; nonnegative for any valid genie.
double diff_rate(const ChannelMatrices& ch, const CovariancePair& q, const GenieParams& g);

/// SINR-optimal beam (I + h^2 P c c^T)^-1 d / ||.||, shared by the transmit
/// (MISO) and receive (SIMO) sides.
Vec optimal_beam(const SymmetricVectorChannel& sch);

/// P cos^2(theta)/(1 + h^2 P) + P sin^2(theta).
double sinr_closed_form(const SymmetricVectorChannel& sch);

/// log2(1 + SINR): the symmetric-beamforming TIN sum rate.
double beamforming_sum_rate(const SymmetricVectorChannel& sch);

/// Validates covariances against the channel: matching dimensions, PSD within
/// psd_tol, trace within budget (+1e-9 slack). Throws InvalidInput otherwise.
void validate_covariances(const ChannelMatrices& ch, const CovariancePair& q);

} // namespace tinsum
