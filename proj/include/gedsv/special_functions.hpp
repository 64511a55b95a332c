#pragma once

namespace gedsv {

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// ln B(x, y) = ln Γ(x) + ln Γ(y) - ln Γ(x + y), without cancellation when either argument is large.
double log_beta(double x, double y);

/// ψ(x) = d/dx ln Γ(x), x > 0. Upward recurrence into an asymptotic series.
double digamma(double x);

/// ψ'(x), x > 0.
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly.
double gamma_q(double a, double x);

/// Quantile of Gamma(shape, rate): the x with P(shape, rate * x) = p.
double gamma_quantile(double shape, double rate, double p);

/// Standard normal CDF.
double normal_cdf(double z);

/// log Φ(z), accurate far into the lower tail.
double log_normal_cdf(double z);

/// Standard normal quantile, Φ^{-1}(p) for p in (0, 1).
double normal_quantile(double p);

}  // namespace gedsv
