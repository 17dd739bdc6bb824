#pragma once

#include <span>
#include <vector>

namespace lyapfun {

/// Symmetric tridiagonal matrix; only the diagonal and one off-diagonal
/// are stored.
struct TriDiag {
  std::vector<double> diag;
  std::vector<double> off;  // size n-1

  TriDiag() = default;
  explicit TriDiag(int n) : diag(n, 0.0), off(n > 0 ? n - 1 : 0, 0.0) {}

  int n() const { return static_cast<int>(diag.size()); }
};

/// Dense square matrix, row-major. Used both for general operands and
/// for logically symmetric ones; symmetry is restored explicitly with
/// symmetrize() after operations that may introduce rounding drift.
class DenseMatrix {
 public:
  DenseMatrix() : n_(0) {}
  explicit DenseMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}

  static DenseMatrix identity(int n);

  int n() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* row(int i) { return a_.data() + static_cast<size_t>(i) * n_; }
  const double* row(int i) const { return a_.data() + static_cast<size_t>(i) * n_; }

  void set_zero();
  void symmetrize();          // a <- (a + a^T)/2
  void transpose_in_place();
  double max_abs() const;
  double max_asymmetry() const;  // max |a_ij - a_ji|

  /// a <- a + s*b
  void add_scaled(const DenseMatrix& b, double s);

  bool operator==(const DenseMatrix&) const = default;

 private:
  int n_;
  std::vector<double> a_;
};

std::vector<double> tridiag_mul(const TriDiag& t, std::span<const double> x);

/// out = t * x, writing into out (which may not alias x).
void tridiag_mul_to(const TriDiag& t, std::span<const double> x, std::span<double> out);

/// T * X for dense X.
void tridiag_left_mul_to(const TriDiag& t, const DenseMatrix& x, DenseMatrix& out);
DenseMatrix tridiag_left_mul(const TriDiag& t, const DenseMatrix& x);

/// X * T for dense X.
void tridiag_right_mul_to(const DenseMatrix& x, const TriDiag& t, DenseMatrix& out);
DenseMatrix tridiag_right_mul(const DenseMatrix& x, const TriDiag& t);

DenseMatrix to_dense(const TriDiag& t);

/// x^T a y
double quadratic_form(const DenseMatrix& a, std::span<const double> x,
                      std::span<const double> y);
/// x^T t y for tridiagonal t
double quadratic_form(const TriDiag& t, std::span<const double> x,
                      std::span<const double> y);

std::vector<double> mat_vec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b);

/// LDL^T factorization of a symmetric positive definite tridiagonal
/// matrix. Factor once, then solve in O(n) per right-hand side.
/// Throws NotSpdError on a nonpositive pivot.
class TriDiagFactor {
 public:
  explicit TriDiagFactor(const TriDiag& t);

  int n() const { return static_cast<int>(d_.size()); }

  void solve_in_place(std::span<double> rhs) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  /// Z <- K^{-1} Z, every column of Z treated as a right-hand side.
  /// Implemented as row operations so the inner loops run over
  /// contiguous storage.
  void solve_columns_in_place(DenseMatrix& z) const;

 private:
  std::vector<double> d_;  // pivots
  std::vector<double> l_;  // subdiagonal multipliers, size n-1
};

/// Cholesky factorization of a symmetric positive semidefinite matrix.
/// Pivots in [-rel_tol*trace, 0] are clamped to zero with the column
/// zeroed, so exactly semidefinite inputs (rank-deficient covariances)
/// factor cleanly. Pivots below the clamping band throw NotPsdError.
/// Returns the lower-triangular factor F with F F^T = c.
DenseMatrix cholesky_psd(const DenseMatrix& c, double rel_tol = 1e-12);

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method,
/// returned in ascending order. Intended for small matrices (checks
/// and tests), not large-scale work.
std::vector<double> sym_eigenvalues(DenseMatrix a);

}  // namespace lyapfun
