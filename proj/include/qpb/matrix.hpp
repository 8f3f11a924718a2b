#pragma once

#include <algorithm>
#include <cassert>
#include <initializer_list>
#include <vector>

#include "qpb/scalar.hpp"

namespace qpb {

// Dense row-major matrix over Complex (floating path) or GaussRat (exact path).
// The two instantiations never mix inside one object; conversion is explicit.
template <class T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols)
      : rows_(rows), cols_(cols), data_(size_t(rows) * cols, ScalarTraits<T>::zero()) {
    if (rows < 0 || cols < 0) throw Error("Mat: negative dimension");
  }
  Mat(int rows, int cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != size_t(rows) * cols) throw Error("Mat: data size mismatch");
  }
  Mat(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = int(rows.size());
    cols_ = rows_ ? int(rows.begin()->size()) : 0;
    data_.reserve(size_t(rows_) * cols_);
    for (auto& r : rows) {
      if (int(r.size()) != cols_) throw Error("Mat: ragged initializer");
      for (auto& v : r) data_.push_back(v);
    }
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = ScalarTraits<T>::one();
    return m;
  }
  static Mat zero(int rows, int cols) { return Mat(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& at(int i, int j) {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[size_t(i) * cols_ + j];
  }
  const T& at(int i, int j) const {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[size_t(i) * cols_ + j];
  }
  const std::vector<T>& data() const { return data_; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw Error("Mat: shape mismatch in product");
    Mat c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a.at(i, k);
        if (ScalarTraits<T>::is_zero(aik)) continue;
        for (int j = 0; j < b.cols_; ++j) c.at(i, j) += aik * b.at(k, j);
      }
    return c;
  }
  friend Mat operator+(const Mat& a, const Mat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("Mat: shape mismatch in sum");
    Mat c = a;
    for (size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }
  friend Mat operator-(const Mat& a, const Mat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("Mat: shape mismatch in difference");
    Mat c = a;
    for (size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }
  friend Mat operator-(const Mat& a) {
    Mat c = a;
    for (auto& v : c.data_) v = -v;
    return c;
  }
  friend Mat operator*(const T& s, const Mat& a) {
    Mat c = a;
    for (auto& v : c.data_) v = s * v;
    return c;
  }

  Mat transpose() const {
    Mat c(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) c.at(j, i) = at(i, j);
    return c;
  }
  Mat conj() const {
    Mat c = *this;
    for (auto& v : c.data_) v = ScalarTraits<T>::conj(v);
    return c;
  }
  Mat adjoint() const { return conj().transpose(); }

  T trace() const {
    if (rows_ != cols_) throw Error("Mat: trace of non-square matrix");
    T t = ScalarTraits<T>::zero();
    for (int i = 0; i < rows_; ++i) t += at(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0;
    for (auto& v : data_) m = std::max(m, ScalarTraits<T>::abs(v));
    return m;
  }

  Mat col(int j) const {
    Mat c(rows_, 1);
    for (int i = 0; i < rows_; ++i) c.at(i, 0) = at(i, j);
    return c;
  }
  Mat block(int i0, int j0, int r, int c) const {
    Mat b(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) b.at(i, j) = at(i0 + i, j0 + j);
    return b;
  }
  void set_block(int i0, int j0, const Mat& b) {
    for (int i = 0; i < b.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) at(i0 + i, j0 + j) = b.at(i, j);
  }

  bool exactly_equal(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  int rows_, cols_;
  std::vector<T> data_;
};

using MatC = Mat<Complex>;
using MatQ = Mat<GaussRat>;

template <class T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i1 = 0; i1 < a.rows(); ++i1)
    for (int j1 = 0; j1 < a.cols(); ++j1) {
      const T& v = a.at(i1, j1);
      if (ScalarTraits<T>::is_zero(v)) continue;
      for (int i2 = 0; i2 < b.rows(); ++i2)
        for (int j2 = 0; j2 < b.cols(); ++j2)
          c.at(i1 * b.rows() + i2, j1 * b.cols() + j2) = v * b.at(i2, j2);
    }
  return c;
}

template <class T>
Mat<T> direct_sum(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c(a.rows() + b.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(a.rows(), a.cols(), b);
  return c;
}

// Permutation matrix sending tensor index (i,j) of C^{d1} (x) C^{d2} to (j,i).
template <class T>
Mat<T> tensor_flip(int d1, int d2) {
  Mat<T> p(d1 * d2, d1 * d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) p.at(j * d1 + i, i * d2 + j) = ScalarTraits<T>::one();
  return p;
}

template <class T>
Mat<T> hstack(const Mat<T>& a, const Mat<T>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.rows() != b.rows()) throw Error("hstack: row mismatch");
  Mat<T> c(a.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(0, a.cols(), b);
  return c;
}

double residual(const MatC& a, const MatC& b);
bool mat_close(const MatC& a, const MatC& b, const Tol& tol);

MatC to_complex(const MatQ& m);

// Orthonormal basis of the kernel, columns of the returned n x k matrix.
// Column-pivoted elimination; pivots below rank_tol * max|entry| are treated as zero.
// Deterministic: columns processed left to right, Gram-Schmidt in construction order.
MatC nullspace(const MatC& m, const Tol& tol);

// Exact kernel basis in reduced echelon normal form (free coordinate set to 1).
MatQ nullspace(const MatQ& m);

MatC inverse(const MatC& m, const Tol& tol);
MatQ inverse(const MatQ& m);

// Least-squares solution of A x = b via normal equations (small well-conditioned systems).
MatC lstsq(const MatC& a, const MatC& b, const Tol& tol);

// Particular solution of A x = b (single right-hand column) recovered from the
// kernel of the augmented matrix.  Works for rank-deficient A; returns an
// empty matrix when the system looks inconsistent.  Callers should verify the
// residual of whatever comes back.
MatC solve_particular(const MatC& a, const MatC& b, const Tol& tol);

// Gram-Schmidt orthonormalization of the columns of m (assumed independent).
MatC orthonormalize(const MatC& m, const Tol& tol);

// True if m is hermitian positive definite (tested via pivoted Cholesky).
bool is_positive_definite(const MatC& m, const Tol& tol);

}  // namespace qpb
