// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#include "core/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace tinsum {

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0) fail(Errc::invalid_input, "matrix dimensions must be nonnegative");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  a_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) fail(Errc::invalid_input, "ragged initializer");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

void check_same_shape(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(Errc::invalid_input, "matrix shape mismatch");
}

} // namespace

Mat operator+(const Mat& a, const Mat& b) {
  check_same_shape(a, b);
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

Mat operator-(const Mat& a, const Mat& b) {
  check_same_shape(a, b);
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) fail(Errc::invalid_input, "matrix product shape mismatch");
  Mat r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Mat operator*(double s, const Mat& a) {
  Mat r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

Mat transpose(const Mat& a) {
  Mat r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

Vec operator*(const Mat& a, const Vec& x) {
  if (a.cols() != static_cast<int>(x.size())) fail(Errc::invalid_input, "matrix-vector shape mismatch");
  Vec r(static_cast<std::size_t>(a.rows()), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

Mat outer(const Vec& x, const Vec& y) {
  Mat r(static_cast<int>(x.size()), static_cast<int>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = x[i] * y[j];
  return r;
}

double trace(const Mat& a) {
  double t = 0.0;
  const int n = std::min(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) t += a(i, i);
  return t;
}

double fro_norm(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

bool all_finite(const Mat& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j))) return false;
  return true;
}

Mat block2x2(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols())
    fail(Errc::invalid_input, "incompatible block shapes");
  Mat r(a.rows() + c.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (int j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
  }
  for (int i = 0; i < c.rows(); ++i) {
    for (int j = 0; j < c.cols(); ++j) r(a.rows() + i, j) = c(i, j);
    for (int j = 0; j < d.cols(); ++j) r(a.rows() + i, a.cols() + j) = d(i, j);
  }
  return r;
}

double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) fail(Errc::invalid_input, "vector length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

SymMatrix::SymMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
  if (dim < 1) fail(Errc::invalid_input, "SymMatrix dimension must be >= 1");
}

SymMatrix SymMatrix::from_upper(const Mat& m) {
  if (m.rows() != m.cols()) fail(Errc::invalid_input, "SymMatrix requires a square matrix");
  SymMatrix s(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) s.set(i, j, m(i, j));
  return s;
}

SymMatrix SymMatrix::symmetrized(const Mat& m) {
  if (m.rows() != m.cols()) fail(Errc::invalid_input, "SymMatrix requires a square matrix");
  SymMatrix s(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diag(const Vec& d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) s.set(static_cast<int>(i), static_cast<int>(i), d[i]);
  return s;
}

void SymMatrix::set(int i, int j, double v) {
  a_[static_cast<std::size_t>(i) * dim_ + j] = v;
  a_[static_cast<std::size_t>(j) * dim_ + i] = v;
}

Mat SymMatrix::dense() const {
  Mat m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::fro_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) fail(Errc::invalid_input, "SymMatrix shape mismatch");
  SymMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j) r.set(i, j, a(i, j) + b(i, j));
  return r;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) fail(Errc::invalid_input, "SymMatrix shape mismatch");
  SymMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j) r.set(i, j, a(i, j) - b(i, j));
  return r;
}

SymMatrix operator*(double s, const SymMatrix& a) {
  SymMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j) r.set(i, j, s * a(i, j));
  return r;
}

EigenDecomp sym_eigen(const SymMatrix& s) {
  const int n = s.dim();
  if (!all_finite(s.dense())) fail(Errc::invalid_input, "sym_eigen: non-finite entries");

  Mat a = s.dense();
  Mat v = Mat::identity(n);
  const double fro = s.fro_norm();
  const double off_target = 1e-14 * fro;

  auto off_norm = [&]() {
    double t = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) t += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(t);
  };

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > off_target; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p), arq = a(r, q);
            a(r, p) = a(p, r) = arp - sn * (arq + tau * arp);
            a(r, q) = a(q, r) = arq + sn * (arp - tau * arq);
          }
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - sn * (vrq + tau * vrp);
          v(r, q) = vrq + sn * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

  EigenDecomp d;
  d.values.resize(n);
  d.vectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    d.values[k] = a(src, src);
    // sign convention: largest-magnitude component positive
    int imax = 0;
    for (int r = 1; r < n; ++r)
      if (std::fabs(v(r, src)) > std::fabs(v(imax, src))) imax = r;
    const double flip = v(imax, src) < 0.0 ? -1.0 : 1.0;
    for (int r = 0; r < n; ++r) d.vectors(r, k) = flip * v(r, src);
  }
  return d;
}

double psd_tol(const Vec& eigenvalues) {
  double m = 0.0;
  for (double x : eigenvalues) m = std::max(m, std::fabs(x));
  return 1e-10 * std::max(1.0, m);
}

double logdet_psd(const SymMatrix& s) {
  const EigenDecomp d = sym_eigen(s);
  const double tol = psd_tol(d.values);
  double r = 0.0;
  for (double x : d.values) {
    if (x <= tol) fail(Errc::not_positive_definite, "logdet_psd: matrix is not positive definite");
    r += std::log2(x);
  }
  return r;
}

namespace {

// T^(-1/2) via the eigendecomposition; throws if T is not PD.
Mat inv_sqrt_pd(const SymMatrix& t, const char* who) {
  const EigenDecomp d = sym_eigen(t);
  const double tol = psd_tol(d.values);
  Mat w(t.dim(), t.dim());
  for (int k = 0; k < t.dim(); ++k) {
    if (d.values[k] <= tol) fail(Errc::not_positive_definite, std::string(who) + ": matrix is not positive definite");
  }
  // V diag(1/sqrt(l)) V^T
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) {
      double s = 0.0;
      for (int k = 0; k < t.dim(); ++k) s += d.vectors(i, k) * d.vectors(j, k) / std::sqrt(d.values[k]);
      w(i, j) = s;
    }
  return w;
}

void fix_sign_first_nonzero(Vec& v) {
  for (double x : v) {
    if (std::fabs(x) > 1e-12) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

} // namespace

GenEig gen_eig_max(const SymMatrix& s, const SymMatrix& t) {
  if (s.dim() != t.dim()) fail(Errc::invalid_input, "gen_eig_max: dimension mismatch");
  const Mat w = inv_sqrt_pd(t, "gen_eig_max");
  const SymMatrix c = SymMatrix::symmetrized(w * s.dense() * w);
  const EigenDecomp d = sym_eigen(c);
  Vec top(s.dim());
  for (int i = 0; i < s.dim(); ++i) top[i] = d.vectors(i, 0);
  Vec v = w * top;
  const double nv = norm(v);
  for (double& x : v) x /= nv;
  fix_sign_first_nonzero(v);
  return {d.values[0], v};
}

bool schur_psd_check(const Mat& a, const SymMatrix& sigma) {
  if (a.cols() != sigma.dim()) fail(Errc::invalid_input, "schur_psd_check: shape mismatch");
  const Mat sig_inv = sym_inverse(sigma);
  const Mat m = Mat::identity(a.rows()) - a * sig_inv * transpose(a);
  return is_psd(SymMatrix::symmetrized(m));
}

Vec rank_one_inv_apply(double h2p, const Vec& c, const Vec& x) {
  if (h2p < 0.0) fail(Errc::invalid_input, "rank_one_inv_apply: h2p must be nonnegative");
  if (c.size() != x.size()) fail(Errc::invalid_input, "rank_one_inv_apply: length mismatch");
  const double scale = (h2p / (1.0 + h2p)) * dot(c, x);
  Vec r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= scale * c[i];
  return r;
}

bool top_eig_rank2_predicate(const Vec& x1, const Vec& x2, const Vec& x) {
  if (dot(x1, x2) <= 0.0) fail(Errc::precondition_violated, "top_eig_rank2_predicate: x1^T x2 must be positive");
  const Mat m = outer(x1, x1) + outer(x2, x2);
  const double nx = norm(x);
  if (nx == 0.0) fail(Errc::precondition_violated, "top_eig_rank2_predicate: x must be nonzero");
  Vec xh = x;
  for (double& v : xh) v /= nx;
  const Vec mx = m * xh;
  const double lam = dot(xh, mx);
  Vec resid = mx;
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= lam * xh[i];
  if (norm(resid) > 1e-8 * std::max(1.0, fro_norm(m)))
    fail(Errc::precondition_violated, "top_eig_rank2_predicate: x is not an eigenvector");
  return dot(x, x1) * dot(x, x2) > 0.0;
}

Mat sym_inverse(const SymMatrix& s) {
  const EigenDecomp d = sym_eigen(s);
  const double tol = psd_tol(d.values);
  for (double x : d.values)
    if (x <= tol) fail(Errc::not_positive_definite, "sym_inverse: matrix is not positive definite");
  Mat r(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < s.dim(); ++k) acc += d.vectors(i, k) * d.vectors(j, k) / d.values[k];
      r(i, j) = acc;
    }
  return r;
}

double min_eigenvalue(const SymMatrix& s) {
  const EigenDecomp d = sym_eigen(s);
  return d.values.back();
}

bool is_psd(const SymMatrix& s) {
  const EigenDecomp d = sym_eigen(s);
  return d.values.back() >= -psd_tol(d.values);
}

} // namespace tinsum
