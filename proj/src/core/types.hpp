// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include "core/matkit.hpp"

namespace tinsum {

/// Two-user channel: receiver i sees H_i1 X_1 + H_i2 X_2 + Z_i with unit
/// noise, and transmitter i has trace budget p_i.
struct ChannelMatrices {
  Mat h11, h12, h21, h22;
  double p1 = 0.0, p2 = 0.0;

  void validate() const;
  int rx1() const { return h11.rows(); }
  int rx2() const { return h22.rows(); }
  int tx1() const { return h11.cols(); }
  int tx2() const { return h22.cols(); }
};

enum class VectorKind { miso, simo };

/// Symmetric MISO/SIMO channel in canonical two-antenna coordinates:
/// direct direction d = (cos theta, sin theta), cross direction c = (1, 0),
/// cross gain h >= 0 (the sign is irrelevant to capacity and removed).
struct SymmetricVectorChannel {
  double theta = 0.0;
  double h = 0.0;
  double P = 0.0;
  VectorKind kind = VectorKind::miso;

  ChannelMatrices to_matrices() const;
};

SymmetricVectorChannel make_vector_channel(VectorKind kind, double theta, double h, double P);

struct CovariancePair {
  SymMatrix q1, q2;
};

/// Genie noise parameters: A_i = E[Z_i W_i^T] cross-covariance between the
/// receiver noise and the side-information noise, Sigma_i = Cov(W_i) > 0.
struct GenieParams {
  Mat a1, a2;
  SymMatrix sigma1, sigma2;
};

} // namespace tinsum
