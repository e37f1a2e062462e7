// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace tinsum {

using Vec = std::vector<double>;

/// Small dense row-major matrix. Everything in this library is tiny
/// (dimensions <= 8 or so), so the kernel favors robustness and determinism
/// over speed.
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols);                       // zero-filled
  Mat(std::initializer_list<std::initializer_list<double>> rows);
  static Mat identity(int n);

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat transpose(const Mat& a);
Vec operator*(const Mat& a, const Vec& x);
Mat outer(const Vec& x, const Vec& y);
double trace(const Mat& a);
double fro_norm(const Mat& a);
bool all_finite(const Mat& a);
Mat block2x2(const Mat& a, const Mat& b, const Mat& c, const Mat& d);

double dot(const Vec& x, const Vec& y);
double norm(const Vec& x);

/// Symmetric matrix with exactly mirrored storage.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(int dim);                   // zero-filled
  /// Copies the upper triangle into both halves (upper authoritative).
  static SymMatrix from_upper(const Mat& m);
  /// Stores (m + m^T)/2; used when assembling products that are symmetric up
  /// to roundoff.
  static SymMatrix symmetrized(const Mat& m);
  static SymMatrix identity(int n);
  static SymMatrix diag(const Vec& d);

  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  void set(int i, int j, double v);              // writes both (i,j) and (j,i)
  int dim() const { return dim_; }
  Mat dense() const;
  double trace() const;
  double fro_norm() const;

private:
  int dim_ = 0;
  std::vector<double> a_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

struct EigenDecomp {
  Vec values;   // sorted descending
  Mat vectors;  // orthonormal columns; column k pairs with values[k]
};

/// Cyclic Jacobi diagonalization with a fixed sweep order. Converges when the
/// off-diagonal Frobenius mass drops below 1e-14 * ||S||_F. Eigenvector signs
/// are fixed so each column's largest-magnitude component is positive.
EigenDecomp sym_eigen(const SymMatrix& s);

/// Relative PSD tolerance: 1e-10 * max(1, max |eigenvalue|).
double psd_tol(const Vec& eigenvalues);

/// log2 det of a positive definite matrix; NotPositiveDefinite if any
/// eigenvalue is at or below psd_tol.
double logdet_psd(const SymMatrix& s);

struct GenEig {
  double value;
  Vec vector;
};

/// Largest generalized eigenpair S v = lambda T v with T positive definite.
/// The eigenvector is unit norm with its first nonzero component positive.
GenEig gen_eig_max(const SymMatrix& s, const SymMatrix& t);

/// True iff I - A Sigma^-1 A^T >= 0, which for Sigma > 0 is equivalent to the
/// block matrix [[I, A], [A^T, Sigma]] being PSD.
bool schur_psd_check(const Mat& a, const SymMatrix& sigma);

/// (I + h2p c c^T)^-1 x for unit-norm c, via the rank-one inversion identity.
Vec rank_one_inv_apply(double h2p, const Vec& c, const Vec& x);

/// For M = x1 x1^T + x2 x2^T with x1^T x2 > 0 and x an eigenvector of M:
/// true iff x belongs to the largest eigenvalue, decided by the sign of
/// (x^T x1)(x^T x2).
bool top_eig_rank2_predicate(const Vec& x1, const Vec& x2, const Vec& x);

// Shared helpers built on the eigensolver.
Mat sym_inverse(const SymMatrix& s);             // PD inverse
double min_eigenvalue(const SymMatrix& s);
bool is_psd(const SymMatrix& s);                 // eigenvalues >= -psd_tol

} // namespace tinsum
