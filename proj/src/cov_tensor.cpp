#include "lyapfun/cov_tensor.hpp"

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

std::vector<double> vec_of(const DenseMatrix& c) {
  const int n = c.n();
  std::vector<double> v(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(j) * n + i] = c(i, j);
  return v;
}

DenseMatrix unvec(std::span<const double> v) {
  const int n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (static_cast<size_t>(n) * n != v.size())
    throw std::invalid_argument("unvec: length is not a perfect square");
  DenseMatrix c(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) c(i, j) = v[static_cast<size_t>(j) * n + i];
  return c;
}

MomentStepper::MomentStepper(const FemMatrices& fem, const IncrementCovariance& cov,
                             double tau)
    : fem_(fem),
      cov_(cov),
      tau_(tau),
      k_factor_(backward_euler_matrix(fem, tau)),
      work_(fem.mass.n()),
      rhs_(fem.mass.n()) {
  if (cov.n() != fem.mass.n())
    throw std::invalid_argument("MomentStepper: covariance/mesh dimension mismatch");
}

void MomentStepper::advance_sym(DenseMatrix& c) {
  tridiag_left_mul_to(fem_.mass, c, work_);
  tridiag_right_mul_to(work_, fem_.mass, rhs_);  // M C M
  noise_action_to(cov_, c, work_);
  // noise_action of a symmetric operand is symmetric, so the transpose
  // in the tensor identity is a no-op here.
  rhs_.add_scaled(work_, tau_);
  k_factor_.solve_columns_in_place(rhs_);
  rhs_.transpose_in_place();
  k_factor_.solve_columns_in_place(rhs_);
  rhs_.symmetrize();
  std::swap(c, rhs_);
}

DenseMatrix MomentStepper::apply_linear(const DenseMatrix& c) {
  DenseMatrix mw = tridiag_left_mul(fem_.mass, c);
  DenseMatrix z = tridiag_right_mul(mw, fem_.mass);
  DenseMatrix nt = noise_action(cov_, c);
  nt.transpose_in_place();
  z.add_scaled(nt, tau_);
  k_factor_.solve_columns_in_place(z);
  z.transpose_in_place();
  k_factor_.solve_columns_in_place(z);
  z.transpose_in_place();
  return z;
}

MomentState cov_step(const MomentState& state, const FemMatrices& fem,
                     const IncrementCovariance& cov, double tau) {
  MomentStepper stepper(fem, cov, tau);
  DenseMatrix c = unvec(state.v);
  if (c.n() != fem.mass.n())
    throw std::invalid_argument("cov_step: state/mesh dimension mismatch");
  DenseMatrix next = stepper.apply_linear(c);
  next.symmetrize();
  return MomentState{state.step + 1, vec_of(next)};
}

double cov_functional(std::span<const double> x0, const RunConfig& config,
                      const FemMatrices& fem, const IncrementCovariance& cov) {
  const int n = fem.mass.n();
  if (static_cast<int>(x0.size()) != n)
    throw std::invalid_argument("cov_functional: dimension mismatch");

  DenseMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c(i, j) = x0[i] * x0[j];

  MomentStepper stepper(fem, cov, config.tau);
  const bool has_running = fem.r_kind != FunctionalKind::Zero;
  double running = 0.0;
  auto dot_with = [n](const DenseMatrix& a, const DenseMatrix& b) {
    const double* p = a.data();
    const double* q = b.data();
    double s = 0.0;
    const size_t m = static_cast<size_t>(n) * n;
    for (size_t k = 0; k < m; ++k) s += p[k] * q[k];
    return s;
  };
  for (long step = 0; step < config.n_steps; ++step) {
    if (has_running) running += config.tau * dot_with(fem.r_mat, c);
    stepper.advance_sym(c);
  }
  return running + dot_with(fem.g_mat, c);
}

DenseMatrix moment_operator_power(const FemMatrices& fem,
                                  const IncrementCovariance& cov, double tau,
                                  long n_steps) {
  const int n = fem.mass.n();
  const size_t n2 = static_cast<size_t>(n) * n;
  if (n2 * n2 > (size_t{1} << 27))
    throw std::invalid_argument(
        "moment_operator_power: operator would exceed 1 GiB; use a coarser mesh");

  MomentStepper stepper(fem, cov, tau);
  // One moment matrix per operator column, each stepped independently.
  std::vector<DenseMatrix> cols(n2, DenseMatrix(n));
  for (size_t c = 0; c < n2; ++c) {
    const int i = static_cast<int>(c % n);
    const int j = static_cast<int>(c / n);
    cols[c](i, j) = 1.0;
  }
  for (long step = 0; step < n_steps; ++step)
    for (size_t c = 0; c < n2; ++c) cols[c] = stepper.apply_linear(cols[c]);

  DenseMatrix op(static_cast<int>(n2));
  for (size_t c = 0; c < n2; ++c) {
    const DenseMatrix& m = cols[c];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        op(static_cast<int>(static_cast<size_t>(j) * n + i), static_cast<int>(c)) =
            m(i, j);
  }
  return op;
}

}  // namespace lyapfun
