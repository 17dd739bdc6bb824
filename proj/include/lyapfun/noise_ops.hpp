#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lyapfun/banded_linalg.hpp"
#include "lyapfun/mesh_fem.hpp"
#include "lyapfun/rng.hpp"

namespace lyapfun {

/// Multiplicative pointwise noise operator at the discrete level.
/// WhiteNoise drives the equation by space-time white noise; KernelQ by
/// a Q-Wiener process with a continuous symmetric PSD covariance kernel.
/// b_scale multiplies the noise operator, so it enters every covariance
/// entry quadratically.
struct NoiseModel {
  enum class Kind { WhiteNoise, KernelQ };
  Kind kind = Kind::WhiteNoise;
  std::function<double(double, double)> kernel;  // KernelQ only
  double b_scale = 1.0;

  static NoiseModel white(double b_scale = 1.0) {
    return NoiseModel{Kind::WhiteNoise, nullptr, b_scale};
  }
  static NoiseModel kernel_q(std::function<double(double, double)> q,
                             double b_scale = 1.0) {
    return NoiseModel{Kind::KernelQ, std::move(q), b_scale};
  }
};

/// The Gaussian kernel used as the stand-in test kernel for KernelQ.
double gaussian_kernel(double chi, double sigma_dist, double corr_len = 0.1);

/// Covariance of the symmetric noise increment matrices, normalized per
/// unit time step. Because the basis functions only overlap between
/// neighbours, the increment matrix is tridiagonal and the covariance
/// lives on the 2n-1 unordered index pairs (i,i) and (i,i+1). The PSD
/// factor for sampling is computed once at build time.
class IncrementCovariance {
 public:
  int n() const { return n_; }
  int n_pairs() const { return pair_cov_.n(); }

  /// True when increments at well-separated locations are uncorrelated
  /// (white noise), in which case the quadratic action below maps onto
  /// a tridiagonal result.
  bool local() const { return local_; }

  /// E[dW_ab dW_cd] / tau; zero unless |a-b| <= 1 and |c-d| <= 1.
  double entry(int a, int b, int c, int d) const {
    if (a < 0 || b < 0 || c < 0 || d < 0 || a >= n_ || b >= n_ || c >= n_ || d >= n_)
      return 0.0;
    const int p = pair_id(a, b);
    const int q = pair_id(c, d);
    if (p < 0 || q < 0) return 0.0;
    return pair_cov_(p, q);
  }

  const DenseMatrix& pair_cov() const { return pair_cov_; }
  const DenseMatrix& factor() const { return factor_; }
  int factor_bandwidth() const { return factor_bandwidth_; }

  /// Pair index: 2i for (i,i), 2i+1 for (i,i+1); -1 for non-neighbours.
  int pair_id(int a, int b) const {
    if (a > b) std::swap(a, b);
    if (a == b) return 2 * a;
    if (b == a + 1 && b < n_) return 2 * a + 1;
    return -1;
  }

  friend IncrementCovariance build_increment_covariance(const Mesh1D&,
                                                        const QuarticTable&,
                                                        const NoiseModel&);

 private:
  int n_ = 0;
  bool local_ = true;
  DenseMatrix pair_cov_;
  DenseMatrix factor_;
  int factor_bandwidth_ = 0;
};

/// Assembles the increment covariance for the given noise model. White
/// noise entries come straight from the quartic overlap table; kernel
/// entries are computed by tensorized Gauss-Legendre quadrature per
/// element pair, cross-checked against a refined rule (AccuracyError on
/// disagreement).
IncrementCovariance build_increment_covariance(const Mesh1D& mesh,
                                               const QuarticTable& quartic,
                                               const NoiseModel& model);

/// Draws one symmetric noise increment matrix with covariance
/// tau * (pair covariance). tau = 0 gives the zero matrix.
TriDiag sample_increment(const IncrementCovariance& cov, double tau,
                         RngStream& rng);

/// The expected quadratic action of the noise on a coefficient matrix:
/// out_ij = sum_{k,l} L_kl E[dW_il dW_jk]/tau. This is the noise term
/// of the Lyapunov recursion; for white noise the result is supported
/// on |i-j| <= 1 and costs O(n).
void noise_action_to(const IncrementCovariance& cov, const DenseMatrix& l_mat,
                     DenseMatrix& out);
DenseMatrix noise_action(const IncrementCovariance& cov, const DenseMatrix& l_mat);

/// Applies the second-moment noise operator to a column-stacked matrix:
/// returns tau * vec(noise_action(unvec(v))^T) without ever forming the
/// n^2 x n^2 operator. Throws std::invalid_argument when v is not the
/// vec of a square matrix of the covariance's dimension.
std::vector<double> noise_tensor_apply(const IncrementCovariance& cov,
                                       std::span<const double> v, double tau);

}  // namespace lyapfun
