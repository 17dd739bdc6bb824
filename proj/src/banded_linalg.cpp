#include "lyapfun/banded_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lyapfun/errors.hpp"

namespace lyapfun {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix a(n);
  for (int i = 0; i < n; ++i) a(i, i) = 1.0;
  return a;
}

void DenseMatrix::set_zero() { std::fill(a_.begin(), a_.end(), 0.0); }

void DenseMatrix::symmetrize() {
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = m;
      (*this)(j, i) = m;
    }
  }
}

void DenseMatrix::transpose_in_place() {
  constexpr int kBlock = 32;
  for (int ib = 0; ib < n_; ib += kBlock)
    for (int jb = ib; jb < n_; jb += kBlock) {
      const int imax = std::min(ib + kBlock, n_);
      const int jmax = std::min(jb + kBlock, n_);
      for (int i = ib; i < imax; ++i)
        for (int j = std::max(jb, i + 1); j < jmax; ++j)
          std::swap((*this)(i, j), (*this)(j, i));
    }
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::max_asymmetry() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
  return m;
}

void DenseMatrix::add_scaled(const DenseMatrix& b, double s) {
  if (b.n() != n_) throw std::invalid_argument("add_scaled: dimension mismatch");
  const double* q = b.data();
  double* p = a_.data();
  const size_t m = a_.size();
  for (size_t k = 0; k < m; ++k) p[k] += s * q[k];
}

void tridiag_mul_to(const TriDiag& t, std::span<const double> x, std::span<double> out) {
  const int n = t.n();
  if (static_cast<int>(x.size()) != n || static_cast<int>(out.size()) != n)
    throw std::invalid_argument("tridiag_mul: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    double s = t.diag[i] * x[i];
    if (i > 0) s += t.off[i - 1] * x[i - 1];
    if (i + 1 < n) s += t.off[i] * x[i + 1];
    out[i] = s;
  }
}

std::vector<double> tridiag_mul(const TriDiag& t, std::span<const double> x) {
  std::vector<double> out(x.size());
  tridiag_mul_to(t, x, out);
  return out;
}

void tridiag_left_mul_to(const TriDiag& t, const DenseMatrix& x, DenseMatrix& out) {
  const int n = t.n();
  if (x.n() != n || out.n() != n)
    throw std::invalid_argument("tridiag_left_mul: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    const double di = t.diag[i];
    const double cm = i > 0 ? t.off[i - 1] : 0.0;
    const double cp = i + 1 < n ? t.off[i] : 0.0;
    const double* xi = x.row(i);
    const double* xm = i > 0 ? x.row(i - 1) : xi;
    const double* xp = i + 1 < n ? x.row(i + 1) : xi;
    double* oi = out.row(i);
    for (int j = 0; j < n; ++j) oi[j] = di * xi[j] + cm * xm[j] + cp * xp[j];
  }
}

DenseMatrix tridiag_left_mul(const TriDiag& t, const DenseMatrix& x) {
  DenseMatrix out(x.n());
  tridiag_left_mul_to(t, x, out);
  return out;
}

void tridiag_right_mul_to(const DenseMatrix& x, const TriDiag& t, DenseMatrix& out) {
  const int n = t.n();
  if (x.n() != n || out.n() != n)
    throw std::invalid_argument("tridiag_right_mul: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    double* oi = out.row(i);
    for (int j = 0; j < n; ++j) {
      double s = t.diag[j] * xi[j];
      if (j > 0) s += t.off[j - 1] * xi[j - 1];
      if (j + 1 < n) s += t.off[j] * xi[j + 1];
      oi[j] = s;
    }
  }
}

DenseMatrix tridiag_right_mul(const DenseMatrix& x, const TriDiag& t) {
  DenseMatrix out(x.n());
  tridiag_right_mul_to(x, t, out);
  return out;
}

DenseMatrix to_dense(const TriDiag& t) {
  const int n = t.n();
  DenseMatrix a(n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = t.diag[i];
    if (i + 1 < n) {
      a(i, i + 1) = t.off[i];
      a(i + 1, i) = t.off[i];
    }
  }
  return a;
}

double quadratic_form(const DenseMatrix& a, std::span<const double> x,
                      std::span<const double> y) {
  const int n = a.n();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* ai = a.row(i);
    double r = 0.0;
    for (int j = 0; j < n; ++j) r += ai[j] * y[j];
    s += x[i] * r;
  }
  return s;
}

double quadratic_form(const TriDiag& t, std::span<const double> x,
                      std::span<const double> y) {
  const int n = t.n();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = t.diag[i] * y[i];
    if (i > 0) r += t.off[i - 1] * y[i - 1];
    if (i + 1 < n) r += t.off[i] * y[i + 1];
    s += x[i] * r;
  }
  return s;
}

std::vector<double> mat_vec(const DenseMatrix& a, std::span<const double> x) {
  const int n = a.n();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("mat_vec: dimension mismatch");
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += ai[j] * x[j];
    out[i] = s;
  }
  return out;
}

DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b) {
  const int n = a.n();
  if (b.n() != n) throw std::invalid_argument("mat_mul: dimension mismatch");
  DenseMatrix out(n);
  for (int i = 0; i < n; ++i) {
    double* oi = out.row(i);
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (int j = 0; j < n; ++j) oi[j] += aik * bk[j];
    }
  }
  return out;
}

TriDiagFactor::TriDiagFactor(const TriDiag& t) {
  const int n = t.n();
  if (n == 0) throw std::invalid_argument("TriDiagFactor: empty matrix");
  d_.resize(n);
  l_.resize(n - 1);
  d_[0] = t.diag[0];
  if (d_[0] <= 0.0) throw NotSpdError("TriDiagFactor: nonpositive pivot at row 0");
  for (int i = 1; i < n; ++i) {
    l_[i - 1] = t.off[i - 1] / d_[i - 1];
    d_[i] = t.diag[i] - l_[i - 1] * t.off[i - 1];
    if (d_[i] <= 0.0)
      throw NotSpdError("TriDiagFactor: nonpositive pivot at row " + std::to_string(i));
  }
}

void TriDiagFactor::solve_in_place(std::span<double> rhs) const {
  const int n = this->n();
  if (static_cast<int>(rhs.size()) != n)
    throw std::invalid_argument("TriDiagFactor::solve: dimension mismatch");
  for (int i = 1; i < n; ++i) rhs[i] -= l_[i - 1] * rhs[i - 1];
  for (int i = 0; i < n; ++i) rhs[i] /= d_[i];
  for (int i = n - 2; i >= 0; --i) rhs[i] -= l_[i] * rhs[i + 1];
}

std::vector<double> TriDiagFactor::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

void TriDiagFactor::solve_columns_in_place(DenseMatrix& z) const {
  const int n = this->n();
  if (z.n() != n)
    throw std::invalid_argument("TriDiagFactor::solve_columns: dimension mismatch");
  // Forward elimination fused with the diagonal scaling: with
  // off_i = l_i d_i, z_i = (b_i - off_{i-1} z_{i-1}) / d_i.
  {
    const double inv0 = 1.0 / d_[0];
    double* first = z.row(0);
    for (int j = 0; j < n; ++j) first[j] *= inv0;
  }
  for (int i = 1; i < n; ++i) {
    const double off = l_[i - 1] * d_[i - 1];
    const double inv = 1.0 / d_[i];
    const double* prev = z.row(i - 1);
    double* cur = z.row(i);
    for (int j = 0; j < n; ++j) cur[j] = (cur[j] - off * prev[j]) * inv;
  }
  for (int i = n - 2; i >= 0; --i) {
    const double c = l_[i];
    const double* next = z.row(i + 1);
    double* cur = z.row(i);
    for (int j = 0; j < n; ++j) cur[j] -= c * next[j];
  }
}

DenseMatrix cholesky_psd(const DenseMatrix& c, double rel_tol) {
  const int n = c.n();
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += std::abs(c(i, i));
  const double clamp = rel_tol * std::max(trace, 1.0);

  DenseMatrix f(n);
  for (int j = 0; j < n; ++j) {
    double p = c(j, j);
    for (int k = 0; k < j; ++k) p -= f(j, k) * f(j, k);
    if (p < -clamp)
      throw NotPsdError("cholesky_psd: indefinite at column " + std::to_string(j) +
                        " (pivot " + std::to_string(p) + ")");
    if (p <= clamp) {
      // Semidefinite direction: the whole column must vanish too, or
      // the matrix is indefinite despite the zero pivot.
      f(j, j) = 0.0;
      const double col_tol = std::sqrt(clamp) * std::max(1.0, std::sqrt(trace));
      for (int i = j + 1; i < n; ++i) {
        double s = c(i, j);
        for (int k = 0; k < j; ++k) s -= f(i, k) * f(j, k);
        if (std::abs(s) > col_tol)
          throw NotPsdError("cholesky_psd: indefinite at column " + std::to_string(j) +
                            " (zero pivot with residual " + std::to_string(s) + ")");
      }
      continue;
    }
    const double fjj = std::sqrt(p);
    f(j, j) = fjj;
    for (int i = j + 1; i < n; ++i) {
      double s = c(i, j);
      for (int k = 0; k < j; ++k) s -= f(i, k) * f(j, k);
      f(i, j) = s / fjj;
    }
  }
  return f;
}

std::vector<double> sym_eigenvalues(DenseMatrix a) {
  const int n = a.n();
  std::vector<double> eig(n);
  if (n == 0) return eig;
  if (n == 1) {
    eig[0] = a(0, 0);
    return eig;
  }

  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return s;
  };
  double fro = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
  const double tol = 1e-30 * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cc = 1.0 / std::sqrt(t * t + 1.0);
        const double ss = t * cc;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = cc * akp - ss * akq;
          a(k, q) = ss * akp + cc * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = cc * apk - ss * aqk;
          a(q, k) = ss * apk + cc * aqk;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace lyapfun
