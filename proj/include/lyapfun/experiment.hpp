#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lyapfun/cov_tensor.hpp"
#include "lyapfun/em_montecarlo.hpp"
#include "lyapfun/lyap_step.hpp"
#include "lyapfun/semigroup_checks.hpp"

namespace lyapfun {

/// Settings of the convergence/complexity experiments. The defaults
/// reproduce the full-scale study (heat equation on (0,1) with rescaled
/// elliptic and noise operators, white noise, terminal identity
/// functional, hat initial value, tau = h^2); the acceptance and unit
/// suites override the ladder and reference to desk scale.
struct ExperimentConfig {
  double t_final = 1.0;
  double a_scale = 0.05;
  double b_scale = 0.65;
  std::string noise = "white";  // "white" or "gauss:<corr_len>"
  std::string r_kind = "zero";
  std::string g_kind = "identity";
  std::vector<double> h_ladder = {0x1p-1, 0x1p-2, 0x1p-3, 0x1p-4,
                                  0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8};
  double reference_h = 0x1p-10;
  long mc_samples = 0;
  std::uint64_t seed = 2024;
  std::string out;
};

/// Parses a line-oriented `key = value` file. Keys are exactly the
/// ExperimentConfig field names; unknown keys are errors. Blank lines
/// and lines starting with '#' are skipped. Mesh widths accept either
/// decimals or the exact form "2^-k".
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin);

/// Applies the LYAPFUN_SEED environment variable, when set, on top of
/// the configured seed.
void apply_env_overrides(ExperimentConfig& config);

double parse_mesh_width(const std::string& token);

/// The hat-shaped initial value chi on (0,1/2), 1-chi on [1/2,1).
double hat_initial_value(double chi);

NoiseModel noise_model_from(const ExperimentConfig& config);
FunctionalKind functional_kind_from(const std::string& name);

/// One-off computations of the functional at mesh width h with
/// tau = h^2, used by the CLI subcommands and the runners below.
double compute_phi_lyap(const ExperimentConfig& config, double h);
double compute_phi_cov(const ExperimentConfig& config, double h);
McEstimate compute_phi_mc(const ExperimentConfig& config, double h);

struct ConvergenceRow {
  double h = 0.0;
  double tau = 0.0;
  int n_h = 0;
  long n_tau = 0;
  std::string method;  // lyap | cov | mc
  double phi = 0.0;
  double error = 0.0;    // |phi - phi_ref|
  double seconds = 0.0;  // wall clock
};

struct ConvergenceResult {
  double phi_ref = 0.0;
  double reference_h = 0.0;
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(error) vs log(h) per method; absent
  /// when fewer than two usable rows exist.
  std::map<std::string, double> slopes;
};

/// Reference value with the covariance method at reference_h, then one
/// row per ladder width for the Lyapunov and covariance methods (and
/// Monte Carlo when mc_samples > 0).
ConvergenceResult run_convergence(const ExperimentConfig& config);

struct ComplexityRow {
  std::string method;
  double h = 0.0;
  int n_h = 0;
  long n_tau = 0;
  double seconds = 0.0;  // median over repeats
};

struct ComplexityResult {
  std::vector<ComplexityRow> rows;
  /// Fitted exponent of seconds vs h over the finest half of each
  /// method's ladder.
  std::map<std::string, double> exponents;
};

/// Times the all-initial-value computations: the Lyapunov recursion as
/// is, and for the covariance method the propagation of the full moment
/// operator (one column per initial dyad), which is what makes it the
/// expensive method. "mc" times the sampling estimator when requested.
/// Ladders may be set per method; repeat >= 3 runs per point, median
/// reported. Runs are single-threaded by design so the fitted exponents
/// mean something.
ComplexityResult run_complexity(const ExperimentConfig& config, int repeat,
                                const std::map<std::string, std::vector<double>>&
                                    method_ladders);

/// Default per-method complexity ladders (the covariance operator
/// propagation is memory-bound far earlier than the Lyapunov one).
std::map<std::string, std::vector<double>> default_complexity_ladders();

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result);
void write_complexity_csv(std::ostream& out, const ComplexityResult& result);
void write_semigroup_csv(std::ostream& out, const RationalBoundReport& report);

std::string format_real(double v);  // 17 significant digits

}  // namespace lyapfun
