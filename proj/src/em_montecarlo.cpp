#include "lyapfun/em_montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "lyapfun/errors.hpp"

namespace lyapfun {

namespace {

TriDiag backward_euler_matrix(const FemMatrices& fem, double tau) {
  TriDiag k(fem.mass.n());
  for (int i = 0; i < k.n(); ++i)
    k.diag[i] = fem.mass.diag[i] + tau * fem.stiffness.diag[i];
  for (int i = 0; i + 1 < k.n(); ++i)
    k.off[i] = fem.mass.off[i] + tau * fem.stiffness.off[i];
  return k;
}

double functional_quadratic_form(const FemMatrices& fem, FunctionalKind kind,
                                 const DenseMatrix& dense,
                                 std::span<const double> x) {
  switch (kind) {
    case FunctionalKind::Zero:
      return 0.0;
    case FunctionalKind::Identity:
      return quadratic_form(fem.mass, x, x);
  }
  return quadratic_form(dense, x, x);
}

// Pairwise sum over values[lo, hi) in index order.
double pairwise_sum(std::span<const double> values, size_t lo, size_t hi) {
  const size_t n = hi - lo;
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += values[i];
    return s;
  }
  const size_t mid = lo + n / 2;
  return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

}  // namespace

EmStepper::EmStepper(const FemMatrices& fem, const IncrementCovariance& cov,
                     double tau)
    : fem_(fem), cov_(cov), tau_(tau), k_factor_(backward_euler_matrix(fem, tau)) {
  if (cov.n() != fem.mass.n())
    throw std::invalid_argument("EmStepper: covariance/mesh dimension mismatch");
}

void EmStepper::advance(PathState& state, RngStream& rng) const {
  const int n = fem_.mass.n();
  if (static_cast<int>(state.x.size()) != n)
    throw std::invalid_argument("EmStepper: state dimension mismatch");
  const TriDiag dw = sample_increment(cov_, tau_, rng);
  std::vector<double> rhs = tridiag_mul(fem_.mass, state.x);
  for (int i = 0; i < n; ++i) {
    double s = dw.diag[i] * state.x[i];
    if (i > 0) s += dw.off[i - 1] * state.x[i - 1];
    if (i + 1 < n) s += dw.off[i] * state.x[i + 1];
    rhs[i] += s;
  }
  k_factor_.solve_in_place(rhs);
  ++state.step;
  state.x = std::move(rhs);
  for (double v : state.x)
    if (!std::isfinite(v))
      throw BlowUpError("em path blew up at step " + std::to_string(state.step),
                        state.step);
}

PathState em_step(const PathState& state, const FemMatrices& fem,
                  const IncrementCovariance& cov, double tau, RngStream& rng) {
  EmStepper stepper(fem, cov, tau);
  PathState next = state;
  stepper.advance(next, rng);
  return next;
}

PathResult run_path(std::span<const double> x0, const RunConfig& config,
                    const FemMatrices& fem, const IncrementCovariance& cov,
                    RngStream& rng, bool accumulate_running) {
  EmStepper stepper(fem, cov, config.tau);
  PathState state;
  state.x.assign(x0.begin(), x0.end());
  PathResult result;
  for (long n = 0; n < config.n_steps; ++n) {
    if (accumulate_running && fem.r_kind != FunctionalKind::Zero)
      result.running_sum +=
          config.tau * functional_quadratic_form(fem, fem.r_kind, fem.r_mat, state.x);
    stepper.advance(state, rng);
  }
  result.x = std::move(state.x);
  return result;
}

McEstimate mc_functional(std::span<const double> x0, const RunConfig& config,
                         const FemMatrices& fem, const IncrementCovariance& cov,
                         long n_samples, std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("mc_functional: need at least 2 samples");

  std::vector<double> values(n_samples);
  for (long j = 0; j < n_samples; ++j) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(j));
    PathResult path;
    try {
      path = run_path(x0, config, fem, cov, rng, true);
    } catch (const BlowUpError& e) {
      throw BlowUpError("mc_functional: sample " + std::to_string(j) + ": " + e.what(),
                        e.step());
    }
    values[j] = functional_quadratic_form(fem, fem.g_kind, fem.g_mat, path.x) +
                path.running_sum;
  }

  McEstimate est;
  est.n_samples = n_samples;
  est.seed = seed;
  est.mean = pairwise_sum(values, 0, values.size()) / static_cast<double>(n_samples);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - est.mean;
    ss += d * d;
  }
  const double sample_var = ss / static_cast<double>(n_samples - 1);
  est.std_error = std::sqrt(sample_var / static_cast<double>(n_samples));
  return est;
}

}  // namespace lyapfun
