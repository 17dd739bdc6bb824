// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Runs the full desk-scale study, so expect minutes, not
// seconds.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lyapfun/experiment.hpp"
#include "oracles.hpp"

using namespace lyapfun;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void guarded(int id, const std::string& name,
             const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(id, name, pass, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ExperimentConfig default_desk_config() {
  ExperimentConfig config;  // t=1, a=0.05, b=0.65, white, r=zero, g=identity
  config.h_ladder = {0x1p-2, 0x1p-3, 0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7};
  config.reference_h = 0x1p-9;
  config.mc_samples = 0;
  return config;
}

struct Setup {
  Mesh1D mesh;
  FemMatrices fem;
  IncrementCovariance cov;
  std::vector<double> x0;
};

Setup make_setup(int n, double a_scale, double b_scale, FunctionalKind r_kind,
                 FunctionalKind g_kind) {
  Setup s;
  s.mesh = build_mesh(n);
  s.fem = assemble(s.mesh, a_scale, r_kind, g_kind);
  s.cov = build_increment_covariance(s.mesh, quartic_overlaps(s.mesh),
                                     NoiseModel::white(b_scale));
  s.x0 = interpolate(s.mesh, hat_initial_value);
  return s;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

}  // namespace

int main() {
  ConvergenceResult study;
  bool have_study = false;

  // Criterion 1: first-order convergence of both deterministic methods
  // against the fine covariance reference.
  guarded(1, "convergence rate of the deterministic methods", [&]() {
    const double t0 = now_seconds();
    study = run_convergence(default_desk_config());
    have_study = true;
    const double elapsed = now_seconds() - t0;
    const double slope_lyap = study.slopes.at("lyap");
    const double slope_cov = study.slopes.at("cov");
    const bool pass = slope_lyap >= 0.7 && slope_lyap <= 1.2 && slope_cov >= 0.7 &&
                      slope_cov <= 1.2;
    return std::make_pair(
        pass, fmt("slope lyap %.3f, cov %.3f, target [0.7,1.2]; phi_ref %.12g; %.1f s",
                  slope_lyap, slope_cov, study.phi_ref, elapsed));
  });

  // Criterion 2: the two deterministic methods agree to within a few
  // reference gaps on every ladder row.
  guarded(2, "cross-agreement of Lyapunov and covariance values", [&]() {
    if (!have_study) return std::make_pair(false, std::string("no study available"));
    double worst_ratio = 0.0;
    bool pass = true;
    for (size_t i = 0; i + 1 < study.rows.size(); i += 2) {
      const ConvergenceRow& lyap_row = study.rows[i];
      const ConvergenceRow& cov_row = study.rows[i + 1];
      const double gap = std::abs(lyap_row.phi - cov_row.phi);
      const double allowed = std::max(5.0 * cov_row.error, 1e-10);
      worst_ratio = std::max(worst_ratio, gap / allowed);
      if (gap > allowed) pass = false;
    }
    return std::make_pair(pass, fmt("max |phi_L - phi_cov| / allowance = %.3f over %zu widths",
                                    worst_ratio, study.rows.size() / 2));
  });

  // Criterion 3: with the noise switched off, both methods equal the
  // deterministic backward-Euler energy to near machine precision.
  guarded(3, "zero-noise exactness", []() {
    double worst = 0.0;
    for (int n : {1, 3, 7, 15, 31, 63}) {
      const Setup s = make_setup(n, 0.05, 0.0, FunctionalKind::Zero,
                                 FunctionalKind::Identity);
      const RunConfig config = make_run_config(1.0, s.mesh.h * s.mesh.h);
      const std::vector<double> xT =
          oracles::backward_euler_path(s.fem, config.tau, config.n_steps, s.x0);
      const double exact = quadratic_form(s.fem.mass, xT, xT);
      const LyapState terminal = run_lyapunov(s.fem, s.cov, config);
      const double by_lyap = lyap_functional(terminal, s.fem, s.x0);
      const double by_cov = cov_functional(s.x0, config, s.fem, s.cov);
      worst = std::max(worst, std::abs(by_lyap - exact) / exact);
      worst = std::max(worst, std::abs(by_cov - exact) / exact);
    }
    return std::make_pair(worst <= 1e-12, fmt("max relative gap %.3g, target 1e-12", worst));
  });

  // Criterion 4a: one Lyapunov step against the dense-inverse oracle.
  guarded(4, "small-instance oracle: Lyapunov step", []() {
    RngStream rng(271828);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const int n = 1 + static_cast<int>(rng.next_u64() % 6);
      const Setup s = make_setup(n, 0.05 + 0.3 * std::abs(rng.next_normal()), 0.65,
                                 FunctionalKind::Identity, FunctionalKind::Identity);
      const double tau = 0.01 + 0.05 * std::abs(rng.next_normal());
      const LyapState state{0, oracles::random_psd(n, rng)};
      const LyapState next = lyap_step(state, s.fem, s.cov, tau);

      DenseMatrix k = to_dense(s.fem.mass);
      k.add_scaled(to_dense(s.fem.stiffness), tau);
      const DenseMatrix kinv = oracles::dense_inverse(k);
      DenseMatrix z = mat_mul(to_dense(s.fem.mass),
                              mat_mul(state.coeff, to_dense(s.fem.mass)));
      z.add_scaled(s.fem.r_mat, tau);
      z.add_scaled(noise_action(s.cov, state.coeff), tau);
      const DenseMatrix expect = mat_mul(kinv, mat_mul(z, kinv));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, std::abs(next.coeff(i, j) - expect(i, j)) /
                                      std::max(1.0, expect.max_abs()));
    }
    return std::make_pair(worst <= 1e-12,
                          fmt("max deviation %.3g over 100 instances, target 1e-12", worst));
  });

  guarded(4, "small-instance oracle: moment step vs Kronecker matrix", []() {
    double worst = 0.0;
    for (int n : {2, 3, 4}) {
      const Setup s = make_setup(n, 0.05, 0.65, FunctionalKind::Zero,
                                 FunctionalKind::Identity);
      const double tau = 0.02;
      DenseMatrix k = to_dense(s.fem.mass);
      k.add_scaled(to_dense(s.fem.stiffness), tau);
      const DenseMatrix kinv = oracles::dense_inverse(k);
      const DenseMatrix mm = oracles::kron(to_dense(s.fem.mass), to_dense(s.fem.mass));
      DenseMatrix noise(n * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              noise(i + a * n, j + b * n) = tau * s.cov.entry(a, b, i, j);
      DenseMatrix inner = mm;
      inner.add_scaled(noise, 1.0);
      const DenseMatrix f = mat_mul(oracles::kron(kinv, kinv), inner);

      RngStream rng(1000 + n);
      std::vector<double> v(n * n);
      for (double& x : v) x = rng.next_normal();
      const MomentState next = cov_step(MomentState{0, v}, s.fem, s.cov, tau);
      DenseMatrix expect = unvec(mat_vec(f, v));
      expect.symmetrize();  // the contract-level step re-symmetrizes
      const DenseMatrix got = unvec(next.v);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, std::abs(got(i, j) - expect(i, j)));
    }
    return std::make_pair(worst <= 1e-10, fmt("max deviation %.3g, target 1e-10", worst));
  });

  guarded(4, "small-instance oracle: noise action vs sampling", []() {
    const int n = 5;
    const Setup s = make_setup(n, 0.05, 0.65, FunctionalKind::Zero,
                               FunctionalKind::Identity);
    RngStream rng(31415);
    const DenseMatrix l = oracles::random_psd(n, rng);
    const double tau = 0.25;
    const long samples = 100000;
    RngStream noise_rng(653589);
    DenseMatrix mean(n), second(n);
    for (long rep = 0; rep < samples; ++rep) {
      const TriDiag dw = sample_increment(s.cov, tau, noise_rng);
      const DenseMatrix dwd = to_dense(dw);
      const DenseMatrix prod = mat_mul(dwd, mat_mul(l, dwd));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          mean(i, j) += prod(i, j);
          second(i, j) += prod(i, j) * prod(i, j);
        }
    }
    const DenseMatrix expect = noise_action(s.cov, l);
    double worst_z = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double emp = mean(i, j) / samples / tau;
        const double avg = mean(i, j) / samples;
        const double var = second(i, j) / samples - avg * avg;
        const double std_err = std::sqrt(std::max(var, 0.0) / samples) / tau;
        const double z = std::abs(emp - expect(i, j)) / std::max(std_err, 1e-12);
        worst_z = std::max(worst_z, z);
      }
    return std::make_pair(worst_z <= 3.0,
                          fmt("max |z| = %.2f at 1e5 samples, target 3", worst_z));
  });

  // Criterion 5: the Monte Carlo estimator is unbiased for the exactly
  // propagated discrete functional.
  guarded(5, "Monte Carlo unbiasedness at the discrete level", []() {
    const Setup s = make_setup(15, 0.05, 0.65, FunctionalKind::Zero,
                               FunctionalKind::Identity);  // h = 2^-4
    const RunConfig config = make_run_config(1.0, s.mesh.h * s.mesh.h);
    const double exact = cov_functional(s.x0, config, s.fem, s.cov);
    double worst_z = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const McEstimate est = mc_functional(s.x0, config, s.fem, s.cov, 10000, seed);
      worst_z = std::max(worst_z, std::abs(est.mean - exact) / est.std_error);
    }
    return std::make_pair(worst_z <= 4.0,
                          fmt("max |z| = %.2f over 20 seeds at M=1e4, target 4", worst_z));
  });

  // Criterion 6: both iterates stay positive semidefinite along full
  // default runs.
  guarded(6, "positive semidefiniteness along full runs", []() {
    double worst = 0.0;
    for (int n : {1, 3, 7, 15}) {
      const Setup s = make_setup(n, 0.05, 0.65, FunctionalKind::Zero,
                                 FunctionalKind::Identity);
      const RunConfig config = make_run_config(1.0, s.mesh.h * s.mesh.h);
      LyapStepper lyap_stepper(s.fem, s.cov, config.tau);
      LyapState state = lyap_init(s.fem);
      MomentStepper moment_stepper(s.fem, s.cov, config.tau);
      DenseMatrix c(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = s.x0[i] * s.x0[j];
      for (long step = 0; step < config.n_steps; ++step) {
        lyap_stepper.advance(state);
        moment_stepper.advance_sym(c);
        for (const DenseMatrix* m : {&state.coeff, &c}) {
          const std::vector<double> eig = sym_eigenvalues(*m);
          const double scale = std::max(std::abs(eig.back()), 1e-300);
          worst = std::max(worst, -eig.front() / scale);
        }
      }
    }
    return std::make_pair(worst <= 1e-10,
                          fmt("worst normalized negative eigenvalue %.3g, target 1e-10", worst));
  });

  // Criterion 7: the normalized semigroup gap shows no upward trend.
  guarded(7, "rational semigroup bound stays flat in n", []() {
    const double t0 = now_seconds();
    bool pass = true;
    std::string detail;
    for (const auto& [r, rho] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {0.5, 1.0}, {1.0, 2.0}}) {
      const RationalBoundReport report = verify_semigroup_bound(r, rho, 10000, 400);
      const double slope = trend_slope(report.n_values, report.sup_values);
      if (slope > 0.05) pass = false;
      detail += fmt("(r=%.1f,rho=%.1f): slope %.4f const %.3g; ", r, rho, slope,
                    report.observed_constant);
    }
    detail += fmt("%.1f s", now_seconds() - t0);
    return std::make_pair(pass, detail);
  });

  // Criterion 8: measured cost exponents reproduce the complexity
  // table for the all-initial-value computations.
  guarded(8, "complexity exponents", []() {
    const ExperimentConfig config;  // defaults; ladders set explicitly
    const std::map<std::string, std::vector<double>> ladders = {
        {"lyap", {0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7}},
        {"cov", {0x1p-3, 0x1p-4, 0x1p-5}}};
    const double t0 = now_seconds();
    const ComplexityResult result = run_complexity(config, 3, ladders);
    const double lyap_exp = result.exponents.at("lyap");
    const double cov_exp = result.exponents.at("cov");
    const bool pass = lyap_exp >= -5.0 && lyap_exp <= -3.2 && cov_exp >= -7.2 &&
                      cov_exp <= -5.0;
    return std::make_pair(
        pass, fmt("lyap %.2f target [-5.0,-3.2]; cov %.2f target [-7.2,-5.0]; %.1f s",
                  lyap_exp, cov_exp, now_seconds() - t0));
  });

  if (g_failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return g_failures;
}
