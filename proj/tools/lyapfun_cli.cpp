// Command-line driver for the quadratic-functional solvers: convergence
// and complexity studies, single-width functional evaluations, and the
// scalar semigroup bound scan.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lyapfun/experiment.hpp"

namespace {

using lyapfun::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string h_token;
  std::string ladder_tokens;
  std::string reference_token;
  long mc_samples = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double t_final = -1.0;
  double a_scale = -1.0;
  double b_scale = -1.0;
  std::string noise;
  std::string r_kind;
  std::string g_kind;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_ladder) {
  cmd->add_option("--config", flags.config_path, "key = value config file");
  cmd->add_option("--out", flags.out, "CSV output path");
  cmd->add_option("--t-final", flags.t_final, "final time");
  cmd->add_option("--a-scale", flags.a_scale, "elliptic operator rescaling");
  cmd->add_option("--b-scale", flags.b_scale, "noise operator rescaling");
  cmd->add_option("--noise", flags.noise, "white | gauss:<corr_len>");
  cmd->add_option("--r-kind", flags.r_kind, "zero | identity");
  cmd->add_option("--g-kind", flags.g_kind, "zero | identity");
  cmd->add_option("--seed", flags.seed, "RNG master seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  if (with_ladder) {
    cmd->add_option("--h-ladder", flags.ladder_tokens,
                    "comma-separated mesh widths (decimal or 2^-k)");
    cmd->add_option("--reference-h", flags.reference_token,
                    "reference mesh width (decimal or 2^-k)");
  }
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) config = lyapfun::load_config(flags.config_path);
  if (flags.t_final > 0.0) config.t_final = flags.t_final;
  if (flags.a_scale > 0.0) config.a_scale = flags.a_scale;
  if (flags.b_scale >= 0.0) config.b_scale = flags.b_scale;
  if (!flags.noise.empty()) config.noise = flags.noise;
  if (!flags.r_kind.empty()) config.r_kind = flags.r_kind;
  if (!flags.g_kind.empty()) config.g_kind = flags.g_kind;
  if (flags.seed_set) config.seed = flags.seed;
  if (flags.mc_samples >= 0) config.mc_samples = flags.mc_samples;
  if (!flags.ladder_tokens.empty()) {
    config.h_ladder.clear();
    std::stringstream ss(flags.ladder_tokens);
    std::string tok;
    while (std::getline(ss, tok, ','))
      config.h_ladder.push_back(lyapfun::parse_mesh_width(tok));
  }
  if (!flags.reference_token.empty())
    config.reference_h = lyapfun::parse_mesh_width(flags.reference_token);
  if (!flags.out.empty()) config.out = flags.out;
  // The environment variable, when set, beats both the file and flags.
  lyapfun::apply_env_overrides(config);
  return config;
}

void write_csv_if_requested(const std::string& path,
                            const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  writer(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic functionals of the stochastic heat equation: "
               "Lyapunov, Monte Carlo, and covariance solvers"};
  // Long-form help only, so the mesh width can be spelled --h.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  CommonFlags conv_flags, comp_flags, lyap_flags, mc_flags, cov_flags;

  CLI::App* conv = app.add_subcommand(
      "convergence", "mesh ladder study of the functional against a fine reference");
  add_common_flags(conv, conv_flags, true);
  conv->add_option("--mc-samples", conv_flags.mc_samples,
                   "also run the Monte Carlo method with this many samples");

  CLI::App* comp = app.add_subcommand(
      "complexity", "wall-clock scaling of the all-initial-value computations");
  add_common_flags(comp, comp_flags, true);
  int repeat = 3;
  std::string methods = "lyap,cov";
  comp->add_option("--repeat", repeat, "timed repeats per point (median reported)");
  comp->add_option("--methods", methods, "comma-separated subset of lyap,cov,mc");

  CLI::App* lyap = app.add_subcommand("lyap", "functional via the Lyapunov recursion");
  add_common_flags(lyap, lyap_flags, false);
  lyap->add_option("--h", lyap_flags.h_token, "mesh width (decimal or 2^-k)")->required();

  CLI::App* mc = app.add_subcommand("mc", "functional via the Monte Carlo estimator");
  add_common_flags(mc, mc_flags, false);
  mc->add_option("--h", mc_flags.h_token, "mesh width (decimal or 2^-k)")->required();
  mc->add_option("--samples", mc_flags.mc_samples, "sample count (at least 2)");

  CLI::App* cov = app.add_subcommand("cov", "functional via covariance propagation");
  add_common_flags(cov, cov_flags, false);
  cov->add_option("--h", cov_flags.h_token, "mesh width (decimal or 2^-k)")->required();

  CLI::App* appendix = app.add_subcommand(
      "appendix-check", "normalized sup of the rational semigroup gap over n");
  double r = 0.0, rho = 0.0;
  long n_max = 10000;
  int points_per_decade = 400;
  std::string appendix_out;
  appendix->add_option("--r", r, "fractional power weight, in [0,1]")->required();
  appendix->add_option("--rho", rho, "rate parameter, in [0,2]")->required();
  appendix->add_option("--n-max", n_max, "largest step count");
  appendix->add_option("--points-per-decade", points_per_decade, "lambda grid density");
  appendix->add_option("--out", appendix_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      const ExperimentConfig config = resolve_config(conv_flags);
      const lyapfun::ConvergenceResult result = lyapfun::run_convergence(config);
      write_csv_if_requested(config.out, [&result](std::ostream& out) {
        lyapfun::write_convergence_csv(out, result);
      });
      std::printf("convergence: %zu rows, phi_ref=%s", result.rows.size(),
                  lyapfun::format_real(result.phi_ref).c_str());
      for (const auto& [method, slope] : result.slopes)
        std::printf(", slope[%s]=%.3f", method.c_str(), slope);
      if (result.slopes.empty()) std::printf(", slope=n/a");
      std::printf("\n");
    } else if (comp->parsed()) {
      const ExperimentConfig config = resolve_config(comp_flags);
      auto ladders = lyapfun::default_complexity_ladders();
      std::map<std::string, std::vector<double>> selected;
      std::stringstream ss(methods);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!ladders.count(tok)) throw std::invalid_argument("unknown method: " + tok);
        selected[tok] = comp_flags.ladder_tokens.empty() ? ladders[tok] : config.h_ladder;
      }
      const lyapfun::ComplexityResult result =
          lyapfun::run_complexity(config, repeat, selected);
      write_csv_if_requested(config.out, [&result](std::ostream& out) {
        lyapfun::write_complexity_csv(out, result);
      });
      std::printf("complexity: %zu points", result.rows.size());
      for (const auto& [method, exponent] : result.exponents)
        std::printf(", exponent[%s]=%.2f", method.c_str(), exponent);
      std::printf("\n");
    } else if (lyap->parsed()) {
      const ExperimentConfig config = resolve_config(lyap_flags);
      const double h = lyapfun::parse_mesh_width(lyap_flags.h_token);
      std::printf("phi_lyap(h=%s) = %s\n", lyapfun::format_real(h).c_str(),
                  lyapfun::format_real(lyapfun::compute_phi_lyap(config, h)).c_str());
    } else if (mc->parsed()) {
      ExperimentConfig config = resolve_config(mc_flags);
      const double h = lyapfun::parse_mesh_width(mc_flags.h_token);
      const lyapfun::McEstimate est = lyapfun::compute_phi_mc(config, h);
      std::printf("phi_mc(h=%s) = %s (std_error %s, %ld samples, seed %llu)\n",
                  lyapfun::format_real(h).c_str(),
                  lyapfun::format_real(est.mean).c_str(),
                  lyapfun::format_real(est.std_error).c_str(), est.n_samples,
                  static_cast<unsigned long long>(est.seed));
    } else if (cov->parsed()) {
      const ExperimentConfig config = resolve_config(cov_flags);
      const double h = lyapfun::parse_mesh_width(cov_flags.h_token);
      std::printf("phi_cov(h=%s) = %s\n", lyapfun::format_real(h).c_str(),
                  lyapfun::format_real(lyapfun::compute_phi_cov(config, h)).c_str());
    } else if (appendix->parsed()) {
      const lyapfun::RationalBoundReport report =
          lyapfun::verify_semigroup_bound(r, rho, n_max, points_per_decade);
      write_csv_if_requested(appendix_out, [&report](std::ostream& out) {
        lyapfun::write_semigroup_csv(out, report);
      });
      std::printf("appendix-check: r=%g rho=%g n_max=%ld observed_constant=%s trend_slope=%.4f\n",
                  r, rho, n_max, lyapfun::format_real(report.observed_constant).c_str(),
                  lyapfun::trend_slope(report.n_values, report.sup_values));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
