#pragma once

namespace hallufault::stats {

// Upper-tail probabilities and the incomplete-beta/gamma machinery behind
// them. Absolute error target 1e-12 on the tested domains.

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x).
double upper_gamma_q(double a, double x);

double normal_sf(double x);
double chisq_sf(double x, double k);
double f_sf(double x, double d1, double d2);
double student_t_sf(double t, double df);

// CDF of the noncentral F distribution with noncentrality lambda.
double noncentral_f_cdf(double x, double d1, double d2, double lambda);

}  // namespace hallufault::stats
