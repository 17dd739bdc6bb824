#include "lyapfun/semigroup_checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lyapfun {

namespace {

// lambda - log1p(lambda), by series for small lambda where the direct
// subtraction cancels.
double log_gap(double lambda) {
  if (lambda > 0.25) return lambda - std::log1p(lambda);
  // sum_{k>=2} (-1)^k lambda^k / k
  double power = lambda * lambda;
  double sum = power / 2.0;
  double sign = -1.0;
  for (int k = 3; k < 60; ++k) {
    power *= lambda;
    const double contrib = sign * power / k;
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * sum) break;
    sign = -sign;
  }
  return sum;
}

}  // namespace

double semigroup_gap(double lambda, long n) {
  if (lambda < 0.0) throw std::invalid_argument("semigroup_gap: negative lambda");
  if (n < 1) throw std::invalid_argument("semigroup_gap: n must be at least 1");
  if (lambda == 0.0) return 0.0;
  const double dn = static_cast<double>(n);
  const double gap = dn * log_gap(lambda);
  if (gap <= 1.0) {
    // (1+l)^{-n} and e^{-nl} nearly cancel; factor the difference.
    return std::exp(-dn * lambda) * std::expm1(gap);
  }
  return std::exp(-dn * std::log1p(lambda)) - std::exp(-dn * lambda);
}

RationalBoundReport verify_semigroup_bound(double r, double rho, long n_max,
                                           int points_per_decade,
                                           double lambda_min, double lambda_max) {
  if (r < 0.0 || r > 1.0) throw std::invalid_argument("verify_semigroup_bound: r in [0,1]");
  if (rho < 0.0 || rho > 2.0)
    throw std::invalid_argument("verify_semigroup_bound: rho in [0,2]");
  if (n_max < 1 || points_per_decade < 1 || lambda_min <= 0.0 || lambda_max <= lambda_min)
    throw std::invalid_argument("verify_semigroup_bound: bad grid");

  std::vector<double> grid;
  const double decades = std::log10(lambda_max / lambda_min);
  const long n_points = std::lround(decades * points_per_decade);
  grid.reserve(n_points + 1);
  for (long k = 0; k <= n_points; ++k)
    grid.push_back(lambda_min *
                   std::pow(10.0, decades * static_cast<double>(k) / n_points));

  RationalBoundReport report;
  report.r = r;
  report.rho = rho;

  // All step counts up to 100, then geometrically spaced; the supremum
  // location migrates like 1/n so small n need dense coverage.
  std::vector<long> ns;
  for (long n = 1; n <= std::min<long>(n_max, 100); ++n) ns.push_back(n);
  long n = ns.back();
  while (n < n_max) {
    n = std::max(n + 1, static_cast<long>(n * 1.02));
    ns.push_back(std::min(n, n_max));
  }

  const double exponent = 0.5 * (rho + r);
  for (long nv : ns) {
    double sup = 0.0;
    auto consider = [&](double lambda) {
      if (lambda <= 0.0) return;
      const double value =
          std::pow(lambda, 0.5 * r) * std::abs(semigroup_gap(lambda, nv));
      sup = std::max(sup, value);
    };
    for (double lambda : grid) consider(lambda);
    // Near-maximizer candidates around lambda ~ const/n.
    const double dn = static_cast<double>(nv);
    consider(0.5 / dn);
    consider(1.0 / dn);
    consider(2.0 / dn);
    consider(4.0 / dn);
    consider((0.5 * r + 2.0) / dn);
    report.n_values.push_back(nv);
    report.sup_values.push_back(sup * std::pow(dn, exponent));
  }
  report.observed_constant =
      *std::max_element(report.sup_values.begin(), report.sup_values.end());
  return report;
}

double trend_slope(const std::vector<long>& n_values,
                   const std::vector<double>& sup_values) {
  if (n_values.size() != sup_values.size() || n_values.size() < 2)
    throw std::invalid_argument("trend_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long m = 0;
  for (size_t i = 0; i < n_values.size(); ++i) {
    if (sup_values[i] <= 0.0) continue;  // log undefined; exact zeros carry no trend
    const double x = std::log(static_cast<double>(n_values[i]));
    const double y = std::log(sup_values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("trend_slope: fewer than two usable points");
  const double denom = m * sxx - sx * sx;
  return (m * sxy - sx * sy) / denom;
}

}  // namespace lyapfun
