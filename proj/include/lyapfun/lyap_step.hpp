#pragma once

#include <span>

#include "lyapfun/banded_linalg.hpp"
#include "lyapfun/mesh_fem.hpp"
#include "lyapfun/noise_ops.hpp"

namespace lyapfun {

/// Iterate of the fully discrete Lyapunov recursion: the symmetric
/// coefficient matrix of the operator in the hat-function expansion.
struct LyapState {
  long step = 0;
  DenseMatrix coeff;
};

/// Uniform time grid for a run. tau * n_steps reproduces t_final
/// exactly for the dyadic step sizes used throughout; the constructor
/// rejects (t_final, tau) pairs without an integer step count.
struct RunConfig {
  double t_final = 1.0;
  double tau = 0.0;
  long n_steps = 0;
  double coupling_c = 1.0;
};

RunConfig make_run_config(double t_final, double tau, double coupling_c = 1.0);

/// Whether tau <= c * h^2. The recursion is well defined either way;
/// callers emit a warning, not an error, when this fails.
bool coupling_satisfied(const RunConfig& config, const Mesh1D& mesh);

/// Initial iterate M^{-1} G M^{-1}, computed with two banded solves.
LyapState lyap_init(const FemMatrices& fem);

/// Advances the recursion
///   (M + tau A) L' (M + tau A) = M L M + tau R + tau * noise_action(L)
/// with the backward-Euler factor built once and reused; each step does
/// 2n banded solves plus an explicit re-symmetrization.
class LyapStepper {
 public:
  LyapStepper(const FemMatrices& fem, const IncrementCovariance& cov, double tau);

  void advance(LyapState& state);

  const TriDiagFactor& factor() const { return k_factor_; }

 private:
  const FemMatrices& fem_;
  const IncrementCovariance& cov_;
  double tau_;
  TriDiagFactor k_factor_;  // M + tau*A
  DenseMatrix work_;
  DenseMatrix rhs_;
};

/// One-shot step (factors the backward-Euler matrix on every call);
/// the stepper above is the loop form.
LyapState lyap_step(const LyapState& state, const FemMatrices& fem,
                    const IncrementCovariance& cov, double tau);

/// Full run: n_steps advances from the initial iterate.
LyapState run_lyapunov(const FemMatrices& fem, const IncrementCovariance& cov,
                       const RunConfig& config);

/// The quadratic functional x^T M L M x of a terminal iterate.
double lyap_functional(const LyapState& state, const FemMatrices& fem,
                       std::span<const double> x);

}  // namespace lyapfun
