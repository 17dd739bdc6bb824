#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lyapfun/lyap_step.hpp"
#include "lyapfun/mesh_fem.hpp"
#include "lyapfun/noise_ops.hpp"
#include "lyapfun/rng.hpp"

namespace lyapfun {

/// State of one semi-implicit Euler-Maruyama path: the coefficient
/// vector of the solution in the hat-function basis.
struct PathState {
  long step = 0;
  std::vector<double> x;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

/// One path step: (M + tau A) x' = (M + dW) x with a freshly sampled
/// increment. Shares the backward-Euler factor across steps.
class EmStepper {
 public:
  EmStepper(const FemMatrices& fem, const IncrementCovariance& cov, double tau);

  /// Throws BlowUpError (with the step index) when the new state is
  /// non-finite.
  void advance(PathState& state, RngStream& rng) const;

  const TriDiagFactor& factor() const { return k_factor_; }

 private:
  const FemMatrices& fem_;
  const IncrementCovariance& cov_;
  double tau_;
  TriDiagFactor k_factor_;
};

/// One-shot step; the stepper above is the loop form.
PathState em_step(const PathState& state, const FemMatrices& fem,
                  const IncrementCovariance& cov, double tau, RngStream& rng);

struct PathResult {
  std::vector<double> x;      // terminal coefficients
  double running_sum = 0.0;   // tau * sum_n x_n^T R x_n over n = 0..N-1
};

/// Runs a full path. When accumulate_running is set, the quadratic form
/// of the running functional is accumulated before every step.
PathResult run_path(std::span<const double> x0, const RunConfig& config,
                    const FemMatrices& fem, const IncrementCovariance& cov,
                    RngStream& rng, bool accumulate_running);

/// Monte Carlo estimate of the discrete quadratic functional over
/// n_samples independent paths. Each sample draws its increments from a
/// counter-based substream of the seed, so the estimate is reproducible
/// and samples could be evaluated in any order; the mean is reduced by
/// pairwise summation in sample-index order. Requires n_samples >= 2.
McEstimate mc_functional(std::span<const double> x0, const RunConfig& config,
                         const FemMatrices& fem, const IncrementCovariance& cov,
                         long n_samples, std::uint64_t seed);

}  // namespace lyapfun
