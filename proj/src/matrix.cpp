#include "qpb/matrix.hpp"

#include <cmath>

namespace qpb {

double residual(const MatC& a, const MatC& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("residual: shape mismatch");
  return (a - b).max_abs();
}

bool mat_close(const MatC& a, const MatC& b, const Tol& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return residual(a, b) <= tol.abs_tol + tol.rel_tol * std::max(a.max_abs(), b.max_abs());
}

MatC to_complex(const MatQ& m) {
  MatC c(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) c.at(i, j) = m.at(i, j).to_complex();
  return c;
}

namespace {

// Reduced row echelon form in place. Returns pivot columns (row i of the
// reduced matrix has its leading 1 in pivot_cols[i]). For Complex a pivot is
// accepted when its magnitude exceeds thresh; for GaussRat thresh is ignored
// and the first nonzero candidate wins.
std::vector<int> rref(MatC& a, double thresh, int pivot_limit = -1) {
  std::vector<int> pivot_cols;
  if (pivot_limit < 0) pivot_limit = a.cols();
  int r = 0;
  for (int j = 0; j < pivot_limit && r < a.rows(); ++j) {
    int best = -1;
    double best_abs = thresh;
    for (int i = r; i < a.rows(); ++i) {
      double v = std::abs(a.at(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (best < 0) continue;
    if (best != r)
      for (int k = 0; k < a.cols(); ++k) std::swap(a.at(r, k), a.at(best, k));
    Complex inv = 1.0 / a.at(r, j);
    for (int k = j; k < a.cols(); ++k) a.at(r, k) *= inv;
    a.at(r, j) = 1;
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r) continue;
      Complex f = a.at(i, j);
      if (f == Complex(0)) continue;
      for (int k = j; k < a.cols(); ++k) a.at(i, k) -= f * a.at(r, k);
      a.at(i, j) = 0;
    }
    pivot_cols.push_back(j);
    ++r;
  }
  return pivot_cols;
}

std::vector<int> rref(MatQ& a, int pivot_limit = -1) {
  std::vector<int> pivot_cols;
  if (pivot_limit < 0) pivot_limit = a.cols();
  int r = 0;
  for (int j = 0; j < pivot_limit && r < a.rows(); ++j) {
    int best = -1;
    for (int i = r; i < a.rows(); ++i)
      if (!a.at(i, j).is_zero()) {
        best = i;
        break;
      }
    if (best < 0) continue;
    if (best != r)
      for (int k = 0; k < a.cols(); ++k) std::swap(a.at(r, k), a.at(best, k));
    GaussRat inv = GaussRat(1) / a.at(r, j);
    for (int k = j; k < a.cols(); ++k) a.at(r, k) = inv * a.at(r, k);
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r) continue;
      GaussRat f = a.at(i, j);
      if (f.is_zero()) continue;
      for (int k = j; k < a.cols(); ++k) a.at(i, k) = a.at(i, k) - f * a.at(r, k);
    }
    pivot_cols.push_back(j);
    ++r;
  }
  return pivot_cols;
}

template <class T, class M>
M kernel_from_rref(const M& a, const std::vector<int>& pivot_cols) {
  int n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (int j : pivot_cols) is_pivot[j] = true;
  std::vector<int> free_cols;
  for (int j = 0; j < n; ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  M ker(n, int(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    int f = free_cols[k];
    ker.at(f, int(k)) = ScalarTraits<T>::one();
    for (size_t p = 0; p < pivot_cols.size(); ++p)
      ker.at(pivot_cols[p], int(k)) = -a.at(int(p), f);
  }
  return ker;
}

}  // namespace

MatC orthonormalize(const MatC& m, const Tol& tol) {
  MatC q = m;
  double scale = std::max(m.max_abs(), 1.0);
  for (int j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (int p = 0; p < j; ++p) {
        Complex dot = 0;
        for (int i = 0; i < q.rows(); ++i) dot += std::conj(q.at(i, p)) * q.at(i, j);
        for (int i = 0; i < q.rows(); ++i) q.at(i, j) -= dot * q.at(i, p);
      }
    double nrm = 0;
    for (int i = 0; i < q.rows(); ++i) nrm += std::norm(q.at(i, j));
    nrm = std::sqrt(nrm);
    if (nrm <= tol.rank_tol * scale) throw Error("orthonormalize: dependent columns");
    for (int i = 0; i < q.rows(); ++i) q.at(i, j) /= nrm;
  }
  return q;
}

MatC nullspace(const MatC& m, const Tol& tol) {
  MatC a = m;
  double thresh = tol.rank_tol * a.max_abs();
  auto pivots = rref(a, thresh);
  MatC ker = kernel_from_rref<Complex, MatC>(a, pivots);
  if (ker.cols() == 0) return ker;
  return orthonormalize(ker, tol);
}

MatQ nullspace(const MatQ& m) {
  MatQ a = m;
  auto pivots = rref(a);
  return kernel_from_rref<GaussRat, MatQ>(a, pivots);
}

MatC inverse(const MatC& m, const Tol& tol) {
  if (m.rows() != m.cols()) throw Error("inverse: non-square matrix");
  int n = m.rows();
  MatC a = hstack(m, MatC::identity(n));
  double thresh = tol.rank_tol * std::max(m.max_abs(), 1e-300);
  auto pivots = rref(a, thresh, n);
  if (int(pivots.size()) != n) throw Error("inverse: singular matrix");
  return a.block(0, n, n, n);
}

MatQ inverse(const MatQ& m) {
  if (m.rows() != m.cols()) throw Error("inverse: non-square matrix");
  int n = m.rows();
  MatQ a = hstack(m, MatQ::identity(n));
  auto pivots = rref(a, n);
  if (int(pivots.size()) != n) throw Error("inverse: singular matrix");
  return a.block(0, n, n, n);
}

MatC lstsq(const MatC& a, const MatC& b, const Tol& tol) {
  MatC ah = a.adjoint();
  return inverse(ah * a, tol) * (ah * b);
}

MatC solve_particular(const MatC& a, const MatC& b, const Tol& tol) {
  if (b.cols() != 1 || a.rows() != b.rows())
    throw Error("solve_particular: shape mismatch");
  MatC ker = nullspace(hstack(a, Complex(-1) * b), tol);
  int best = -1;
  double bt = 0;
  for (int k = 0; k < ker.cols(); ++k) {
    double t = std::abs(ker.at(a.cols(), k));
    if (t > bt) {
      bt = t;
      best = k;
    }
  }
  if (best < 0 || bt < tol.rank_tol) return MatC();
  MatC x(a.cols(), 1);
  Complex t = ker.at(a.cols(), best);
  for (int i = 0; i < a.cols(); ++i) x.at(i, 0) = ker.at(i, best) / t;
  return x;
}

bool is_positive_definite(const MatC& m, const Tol& tol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(m.max_abs(), 1.0);
  if (residual(m, m.adjoint()) > tol.abs_tol * scale) return false;
  int n = m.rows();
  MatC l(n, n);
  for (int k = 0; k < n; ++k) {
    Complex d = m.at(k, k);
    for (int i = 0; i < k; ++i) d -= l.at(k, i) * std::conj(l.at(k, i));
    if (d.real() <= tol.rank_tol * scale) return false;
    double dk = std::sqrt(d.real());
    l.at(k, k) = dk;
    for (int r = k + 1; r < n; ++r) {
      Complex v = m.at(r, k);
      for (int i = 0; i < k; ++i) v -= l.at(r, i) * std::conj(l.at(k, i));
      l.at(r, k) = v / dk;
    }
  }
  return true;
}

}  // namespace qpb
