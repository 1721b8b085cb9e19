#pragma once

namespace dimv {

// Lower regularized incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// a > 0, x >= 0. Series expansion for x < a + 1, Lentz continued fraction
// otherwise.
double regularized_gamma_p(double a, double x);

// CDF of the chi-square distribution with dof degrees of freedom.
double chi_square_cdf(double x, double dof);

// x such that chi_square_cdf(x, dof) = prob, prob in (0, 1). Numeric
// inversion (safeguarded Newton) to |cdf(x) - prob| <= 1e-10.
double chi_square_quantile(double prob, double dof);

// Upper quantile: the x with tail probability sig_level above it,
// i.e. chi_square_quantile(1 - sig_level, dof).
double chi_square_upper_quantile(double sig_level, double dof);

}  // namespace dimv
