#include "lyapfun/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace lyapfun {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& value, const std::string& key) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  }
  if (pos != value.size())
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  return v;
}

long parse_long(const std::string& value, const std::string& key) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  }
  if (pos != value.size())
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  return v;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Discretization {
  Mesh1D mesh;
  FemMatrices fem;
  QuarticTable quartic;
  IncrementCovariance cov;
  RunConfig run;
  std::vector<double> x0;
};

int interior_nodes_for(double h) {
  const double inv = 1.0 / h;
  if (!(inv < 1e8))
    throw std::invalid_argument("mesh width " + std::to_string(h) + " is too fine");
  const int n = static_cast<int>(std::llround(inv)) - 1;
  if (n < 1 || std::abs(inv - std::llround(inv)) > 1e-9)
    throw std::invalid_argument("mesh width " + std::to_string(h) +
                                " does not induce an integer node count");
  return n;
}

Discretization discretize(const ExperimentConfig& config, double h) {
  Discretization d;
  d.mesh = build_mesh(interior_nodes_for(h));
  d.fem = assemble(d.mesh, config.a_scale, functional_kind_from(config.r_kind),
                   functional_kind_from(config.g_kind));
  d.quartic = quartic_overlaps(d.mesh);
  d.cov = build_increment_covariance(d.mesh, d.quartic, noise_model_from(config));
  d.run = make_run_config(config.t_final, h * h);
  if (!coupling_satisfied(d.run, d.mesh))
    std::cerr << "warning: tau = " << d.run.tau << " exceeds c*h^2 = "
              << d.run.coupling_c * d.mesh.h * d.mesh.h << "\n";
  d.x0 = interpolate(d.mesh, hat_initial_value);
  return d;
}

double fit_slope(const std::vector<double>& log_x, const std::vector<double>& log_y) {
  const size_t m = log_x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sx += log_x[i];
    sy += log_y[i];
    sxx += log_x[i] * log_x[i];
    sxy += log_x[i] * log_y[i];
  }
  const double denom = m * sxx - sx * sx;
  return (m * sxy - sx * sy) / denom;
}

}  // namespace

double parse_mesh_width(const std::string& token) {
  const std::string t = trim(token);
  if (t.rfind("2^-", 0) == 0) {
    const long k = parse_long(t.substr(3), "mesh width");
    if (k < 1 || k > 60) throw std::invalid_argument("mesh width exponent out of range: " + t);
    return std::ldexp(1.0, static_cast<int>(-k));
  }
  const double h = parse_double(t, "mesh width");
  if (!(h > 0.0 && h < 1.0))
    throw std::invalid_argument("mesh width must lie in (0,1): " + t);
  return h;
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key == "t_final") {
      config.t_final = parse_double(value, key);
    } else if (key == "a_scale") {
      config.a_scale = parse_double(value, key);
    } else if (key == "b_scale") {
      config.b_scale = parse_double(value, key);
    } else if (key == "noise") {
      config.noise = value;
    } else if (key == "r_kind") {
      config.r_kind = value;
    } else if (key == "g_kind") {
      config.g_kind = value;
    } else if (key == "h_ladder") {
      config.h_ladder.clear();
      for (const std::string& tok : split(value, ','))
        config.h_ladder.push_back(parse_mesh_width(tok));
    } else if (key == "reference_h") {
      config.reference_h = parse_mesh_width(value);
    } else if (key == "mc_samples") {
      config.mc_samples = parse_long(value, key);
      if (config.mc_samples < 0)
        throw std::invalid_argument("config: mc_samples must be nonnegative");
    } else if (key == "seed") {
      size_t pos = 0;
      try {
        config.seed = static_cast<std::uint64_t>(std::stoull(value, &pos));
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != value.size())
        throw std::invalid_argument("config: bad seed value: " + value);
    } else if (key == "out") {
      config.out = value;
    } else {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in, path);
}

void apply_env_overrides(ExperimentConfig& config) {
  const char* env = std::getenv("LYAPFUN_SEED");
  if (env == nullptr || *env == '\0') return;
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(env, &pos);
    if (pos != std::string(env).size()) throw std::invalid_argument("trailing junk");
    config.seed = static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("LYAPFUN_SEED is not a valid seed: ") + env);
  }
}

double hat_initial_value(double chi) { return chi < 0.5 ? chi : 1.0 - chi; }

NoiseModel noise_model_from(const ExperimentConfig& config) {
  if (config.noise == "white") return NoiseModel::white(config.b_scale);
  if (config.noise.rfind("gauss:", 0) == 0) {
    const double len = parse_double(config.noise.substr(6), "noise");
    if (len <= 0.0) throw std::invalid_argument("noise: correlation length must be positive");
    return NoiseModel::kernel_q(
        [len](double chi, double sigma) { return gaussian_kernel(chi, sigma, len); },
        config.b_scale);
  }
  throw std::invalid_argument("unknown noise model: " + config.noise);
}

FunctionalKind functional_kind_from(const std::string& name) {
  if (name == "zero") return FunctionalKind::Zero;
  if (name == "identity") return FunctionalKind::Identity;
  throw std::invalid_argument("unknown functional kind: " + name);
}

double compute_phi_lyap(const ExperimentConfig& config, double h) {
  const Discretization d = discretize(config, h);
  const LyapState terminal = run_lyapunov(d.fem, d.cov, d.run);
  return lyap_functional(terminal, d.fem, d.x0);
}

double compute_phi_cov(const ExperimentConfig& config, double h) {
  const Discretization d = discretize(config, h);
  return cov_functional(d.x0, d.run, d.fem, d.cov);
}

McEstimate compute_phi_mc(const ExperimentConfig& config, double h) {
  if (config.mc_samples < 2)
    throw std::invalid_argument("mc method requires mc_samples >= 2");
  const Discretization d = discretize(config, h);
  return mc_functional(d.x0, d.run, d.fem, d.cov, config.mc_samples, config.seed);
}

ConvergenceResult run_convergence(const ExperimentConfig& config) {
  if (config.h_ladder.empty())
    throw std::invalid_argument("run_convergence: empty mesh ladder");
  for (double h : config.h_ladder)
    if (config.reference_h >= h)
      throw std::invalid_argument(
          "run_convergence: reference_h must be finer than every ladder width");

  ConvergenceResult result;
  result.reference_h = config.reference_h;
  try {
    result.phi_ref = compute_phi_cov(config, config.reference_h);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("run_convergence: reference computation at h=") +
                             format_real(config.reference_h) + " failed: " + e.what());
  }

  auto add_row = [&result](const std::string& method, double h, int n_h, long n_tau,
                           double phi, double seconds) {
    ConvergenceRow row;
    row.h = h;
    row.tau = h * h;
    row.n_h = n_h;
    row.n_tau = n_tau;
    row.method = method;
    row.phi = phi;
    row.error = std::abs(phi - result.phi_ref);
    row.seconds = std::max(seconds, 1e-9);
    result.rows.push_back(row);
  };

  for (double h : config.h_ladder) {
    const int n_h = interior_nodes_for(h);
    const long n_tau = make_run_config(config.t_final, h * h).n_steps;

    double t0 = now_seconds();
    const double phi_l = compute_phi_lyap(config, h);
    add_row("lyap", h, n_h, n_tau, phi_l, now_seconds() - t0);

    t0 = now_seconds();
    const double phi_c = compute_phi_cov(config, h);
    add_row("cov", h, n_h, n_tau, phi_c, now_seconds() - t0);

    if (config.mc_samples > 0) {
      t0 = now_seconds();
      const McEstimate est = compute_phi_mc(config, h);
      add_row("mc", h, n_h, n_tau, est.mean, now_seconds() - t0);
    }
  }

  for (const char* method : {"lyap", "cov", "mc"}) {
    std::vector<double> lx, ly;
    for (const ConvergenceRow& row : result.rows)
      if (row.method == method && row.error > 0.0) {
        lx.push_back(std::log(row.h));
        ly.push_back(std::log(row.error));
      }
    if (lx.size() >= 2) result.slopes[method] = fit_slope(lx, ly);
  }
  return result;
}

std::map<std::string, std::vector<double>> default_complexity_ladders() {
  return {{"lyap", {0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7}},
          {"cov", {0x1p-3, 0x1p-4, 0x1p-5}},
          {"mc", {0x1p-3, 0x1p-4, 0x1p-5}}};
}

ComplexityResult run_complexity(const ExperimentConfig& config, int repeat,
                                const std::map<std::string, std::vector<double>>&
                                    method_ladders) {
  if (repeat < 3)
    throw std::invalid_argument("run_complexity: repeat must be at least 3");

  ComplexityResult result;
  for (const auto& [method, ladder] : method_ladders) {
    for (double h : ladder) {
      const Discretization d = discretize(config, h);
      std::vector<double> times;
      times.reserve(repeat);
      for (int rep = 0; rep < repeat; ++rep) {
        const double t0 = now_seconds();
        if (method == "lyap") {
          const LyapState terminal = run_lyapunov(d.fem, d.cov, d.run);
          volatile double sink = lyap_functional(terminal, d.fem, d.x0);
          (void)sink;
        } else if (method == "cov") {
          const DenseMatrix op =
              moment_operator_power(d.fem, d.cov, d.run.tau, d.run.n_steps);
          volatile double sink = op(0, 0);
          (void)sink;
        } else if (method == "mc") {
          const long samples = std::max<long>(config.mc_samples, 2);
          const McEstimate est =
              mc_functional(d.x0, d.run, d.fem, d.cov, samples, config.seed);
          volatile double sink = est.mean;
          (void)sink;
        } else {
          throw std::invalid_argument("run_complexity: unknown method '" + method + "'");
        }
        times.push_back(std::max(now_seconds() - t0, 1e-9));
      }
      std::sort(times.begin(), times.end());
      ComplexityRow row;
      row.method = method;
      row.h = h;
      row.n_h = d.mesh.n_interior;
      row.n_tau = d.run.n_steps;
      row.seconds = times[times.size() / 2];
      result.rows.push_back(row);
    }

    // Exponent fitted on the finest half of this method's ladder.
    std::vector<std::pair<double, double>> points;
    for (const ComplexityRow& row : result.rows)
      if (row.method == method) points.emplace_back(row.h, row.seconds);
    std::sort(points.begin(), points.end());  // ascending h = finest first
    const size_t keep = (points.size() + 1) / 2;
    if (keep >= 2) {
      std::vector<double> lx, ly;
      for (size_t i = 0; i < keep; ++i) {
        lx.push_back(std::log(points[i].first));
        ly.push_back(std::log(points[i].second));
      }
      result.exponents[method] = fit_slope(lx, ly);
    }
  }
  return result;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result) {
  out << "h,tau,n_h,n_tau,method,phi,error,seconds\n";
  for (const ConvergenceRow& row : result.rows)
    out << format_real(row.h) << ',' << format_real(row.tau) << ',' << row.n_h << ','
        << row.n_tau << ',' << row.method << ',' << format_real(row.phi) << ','
        << format_real(row.error) << ',' << format_real(row.seconds) << '\n';
}

void write_complexity_csv(std::ostream& out, const ComplexityResult& result) {
  out << "method,h,n_h,n_tau,seconds\n";
  for (const ComplexityRow& row : result.rows)
    out << row.method << ',' << format_real(row.h) << ',' << row.n_h << ','
        << row.n_tau << ',' << format_real(row.seconds) << '\n';
}

void write_semigroup_csv(std::ostream& out, const RationalBoundReport& report) {
  out << "r,rho,n,sup_value\n";
  for (size_t i = 0; i < report.n_values.size(); ++i)
    out << format_real(report.r) << ',' << format_real(report.rho) << ','
        << report.n_values[i] << ',' << format_real(report.sup_values[i]) << '\n';
}

}  // namespace lyapfun
