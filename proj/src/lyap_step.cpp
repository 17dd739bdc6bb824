#include "lyapfun/lyap_step.hpp"

#include <cmath>
#include <stdexcept>

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

}  // namespace

RunConfig make_run_config(double t_final, double tau, double coupling_c) {
  if (t_final <= 0.0 || tau <= 0.0)
    throw std::invalid_argument("make_run_config: t_final and tau must be positive");
  const double ratio = t_final / tau;
  const long n_steps = std::llround(ratio);
  if (n_steps < 1 || std::abs(ratio - static_cast<double>(n_steps)) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("make_run_config: t_final/tau is not an integer");
  return RunConfig{t_final, tau, n_steps, coupling_c};
}

bool coupling_satisfied(const RunConfig& config, const Mesh1D& mesh) {
  return config.tau <= config.coupling_c * mesh.h * mesh.h;
}

LyapState lyap_init(const FemMatrices& fem) {
  const TriDiagFactor mass(fem.mass);
  DenseMatrix l = fem.g_mat;
  mass.solve_columns_in_place(l);  // M^{-1} G
  l.transpose_in_place();          // G M^{-1}
  mass.solve_columns_in_place(l);  // M^{-1} G M^{-1}
  l.symmetrize();
  return LyapState{0, std::move(l)};
}

LyapStepper::LyapStepper(const FemMatrices& fem, const IncrementCovariance& cov,
                         double tau)
    : fem_(fem),
      cov_(cov),
      tau_(tau),
      k_factor_(backward_euler_matrix(fem, tau)),
      work_(fem.mass.n()),
      rhs_(fem.mass.n()) {
  if (cov.n() != fem.mass.n())
    throw std::invalid_argument("LyapStepper: covariance/mesh dimension mismatch");
}

void LyapStepper::advance(LyapState& state) {
  DenseMatrix& l = state.coeff;
  tridiag_left_mul_to(fem_.mass, l, work_);
  tridiag_right_mul_to(work_, fem_.mass, rhs_);  // M L M
  if (fem_.r_kind != FunctionalKind::Zero) rhs_.add_scaled(fem_.r_mat, tau_);
  noise_action_to(cov_, l, work_);
  rhs_.add_scaled(work_, tau_);
  // Two-sided solve: with Z symmetric, K^{-1}(K^{-1}Z)^T = K^{-1}Z K^{-1}
  // up to rounding, which the final re-symmetrization absorbs.
  k_factor_.solve_columns_in_place(rhs_);
  rhs_.transpose_in_place();
  k_factor_.solve_columns_in_place(rhs_);
  rhs_.symmetrize();
  std::swap(l, rhs_);
  ++state.step;
}

LyapState lyap_step(const LyapState& state, const FemMatrices& fem,
                    const IncrementCovariance& cov, double tau) {
  LyapStepper stepper(fem, cov, tau);
  LyapState next = state;
  stepper.advance(next);
  return next;
}

LyapState run_lyapunov(const FemMatrices& fem, const IncrementCovariance& cov,
                       const RunConfig& config) {
  LyapStepper stepper(fem, cov, config.tau);
  LyapState state = lyap_init(fem);
  for (long n = 0; n < config.n_steps; ++n) stepper.advance(state);
  return state;
}

double lyap_functional(const LyapState& state, const FemMatrices& fem,
                       std::span<const double> x) {
  if (static_cast<int>(x.size()) != fem.mass.n())
    throw std::invalid_argument("lyap_functional: dimension mismatch");
  const std::vector<double> mx = tridiag_mul(fem.mass, x);
  return quadratic_form(state.coeff, mx, mx);
}

}  // namespace lyapfun
