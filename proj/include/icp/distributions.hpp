#pragma once

namespace icp {

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately keeps precision when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);

double normal_cdf(double x);
double normal_quantile(double p);

/// Student-t with real df > 0.
double t_cdf(double t, double df);
double t_sf(double t, double df);
double t_quantile(double p, double df);

/// Fisher F(d1, d2), real d1, d2 > 0.
double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);

/// P(K > lambda) for the Kolmogorov limit distribution.
double kolmogorov_sf(double lambda);

}  // namespace icp
