#pragma once

#include <span>

namespace ospe::stats {

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-tailed P(|T| >= |t|).
double student_t_two_tailed(double t, double dof);

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// Product-moment correlation with a two-tailed t-test on n-2 degrees of
/// freedom. Requires equal lengths, n >= 3 and non-constant series; throws
/// std::invalid_argument otherwise.
CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace ospe::stats
