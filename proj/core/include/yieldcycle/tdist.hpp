#pragma once

// Student t distribution via the regularized incomplete beta function.

namespace yieldcycle {

/// I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// P(T <= t) for T ~ t(df), df > 0.
double t_cdf(double t, double df);

/// Inverse of t_cdf; p in (0, 1). Accurate to about 1e-12 in t.
double t_quantile(double p, double df);

} // namespace yieldcycle
