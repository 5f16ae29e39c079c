#pragma once

namespace vsxc {

// Distribution functions built on the regularized incomplete beta and gamma
// functions (continued-fraction evaluation). Degrees of freedom must be >= 1.

[[nodiscard]] double normal_cdf(double x);
/// Regularized lower incomplete gamma P(a, x).
[[nodiscard]] double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly.
[[nodiscard]] double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
[[nodiscard]] double beta_inc(double a, double b, double x);

[[nodiscard]] double t_cdf(double x, double df);
[[nodiscard]] double f_cdf(double x, double d1, double d2);
/// Upper tail of F; accurate when the CDF is close to 1.
[[nodiscard]] double f_sf(double x, double d1, double d2);
[[nodiscard]] double chi2_cdf(double x, double df);
[[nodiscard]] double chi2_sf(double x, double df);

/// Inverse of t_cdf for p in (0, 1).
[[nodiscard]] double t_quantile(double p, double df);

}  // namespace vsxc
