#pragma once

#include <vector>

namespace lyapfun {

/// Gap between the backward-Euler rational power and the exponential:
/// (1+lambda)^{-n} - e^{-n*lambda}, for lambda >= 0, n >= 1. Evaluated
/// through expm1/log1p so the near-cancellation at small lambda keeps
/// full relative accuracy, and through plain exponentials (computed in
/// log space) once the two terms are well separated.
double semigroup_gap(double lambda, long n);

/// Scan of the normalized gap sup_lambda lambda^{r/2} |gap(lambda,n)|
/// * n^{(rho+r)/2} over a lambda grid, for a set of step counts up to
/// n_max. The smoothing bound asserts these sups stay bounded in n; the
/// report carries the observed values, not an asserted constant.
struct RationalBoundReport {
  double r = 0.0;
  double rho = 0.0;
  std::vector<long> n_values;
  std::vector<double> sup_values;
  double observed_constant = 0.0;
};

RationalBoundReport verify_semigroup_bound(double r, double rho, long n_max,
                                           int points_per_decade = 400,
                                           double lambda_min = 1e-6,
                                           double lambda_max = 1e6);

/// Least-squares slope of log(sup) against log(n); the boundedness
/// check is "no upward trend".
double trend_slope(const std::vector<long>& n_values,
                   const std::vector<double>& sup_values);

}  // namespace lyapfun
