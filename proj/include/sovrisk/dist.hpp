#pragma once

#include <cmath>

namespace sovrisk {

double norm_pdf(double z);
double norm_cdf(double z);
double norm_quantile(double p);

// phi(z)/Phi(z), stable in the deep left tail via the asymptotic expansion.
double inverse_mills(double z);

// Two-sided p-values.
double pvalue_normal(double stat);
double pvalue_t(double stat, double df);
// Upper-tail chi-squared p-value.
double pvalue_chisq(double stat, double df);

// Log-density of a unit-variance Student-t innovation (nu > 2), evaluated at
// standardized residual z; the 1/sigma Jacobian is the caller's business.
double std_t_logpdf(double z, double nu);

// Unit-variance generalized error distribution, shape > 0.
double ged_lambda(double shape);
double std_ged_logpdf(double z, double shape);

// Significance stars: *** p<0.01, ** p<0.05, * p<0.10.
const char* stars(double pvalue);

} // namespace sovrisk
