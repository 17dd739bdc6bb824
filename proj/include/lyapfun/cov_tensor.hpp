#pragma once

#include <span>
#include <vector>

#include "lyapfun/lyap_step.hpp"
#include "lyapfun/mesh_fem.hpp"
#include "lyapfun/noise_ops.hpp"

namespace lyapfun {

/// Second moment of the path coefficients, stored as the column-stacked
/// vec of the (symmetric PSD) moment matrix.
struct MomentState {
  long step = 0;
  std::vector<double> v;
};

std::vector<double> vec_of(const DenseMatrix& c);
DenseMatrix unvec(std::span<const double> v);

/// Propagates the second moment: with C = unvec(v),
///   C' = (M + tau A)^{-1} (M C M + tau * noise_action(C)^T) (M + tau A)^{-1},
/// re-symmetrized. The n^2 x n^2 one-step operator is never formed; the
/// noise term goes through the vec identity behind noise_tensor_apply.
/// The transpose on the noise term is applied literally, so asymmetric
/// states propagate through the exact linear map before the final
/// re-symmetrization.
class MomentStepper {
 public:
  MomentStepper(const FemMatrices& fem, const IncrementCovariance& cov, double tau);

  /// In-place advance of the moment matrix, assumed (and kept)
  /// symmetric. This is the loop kernel.
  void advance_sym(DenseMatrix& c);

  /// The exact linear one-step map without re-symmetrization; valid for
  /// asymmetric operands.
  DenseMatrix apply_linear(const DenseMatrix& c);

  const TriDiagFactor& factor() const { return k_factor_; }

 private:
  const FemMatrices& fem_;
  const IncrementCovariance& cov_;
  double tau_;
  TriDiagFactor k_factor_;
  DenseMatrix work_;
  DenseMatrix rhs_;
};

/// One-shot contract-level step on the vec state.
MomentState cov_step(const MomentState& state, const FemMatrices& fem,
                     const IncrementCovariance& cov, double tau);

/// The discrete quadratic functional computed by exact covariance
/// propagation: starting from vec(x0 x0^T), accumulates the running
/// functional before every step and evaluates the terminal one after
/// the last.
double cov_functional(std::span<const double> x0, const RunConfig& config,
                      const FemMatrices& fem, const IncrementCovariance& cov);

/// Power of the one-step moment operator applied to the identity,
/// i.e. the n^2 x n^2 matrix propagating the second moment of every
/// initial value at once. Each step applies the one-step map to all n^2
/// columns, which is what makes the all-initial-value computation
/// expensive; cov_functional above is the cheap single-vector form.
DenseMatrix moment_operator_power(const FemMatrices& fem,
                                  const IncrementCovariance& cov, double tau,
                                  long n_steps);

}  // namespace lyapfun
