#pragma once

namespace wfsel {

// log of the binomial coefficient C(n, k); n and k need not be integers
// as long as n >= k >= 0.
double log_choose(double n, double k);

// log of the Euler beta function B(a, b), a > 0, b > 0.
double log_beta(double a, double b);

// log density of Beta(a, b) at x in (0, 1).
double beta_log_pdf(double x, double a, double b);

// Regularized incomplete gamma functions.  P(a, x) is the lower tail,
// Q(a, x) = 1 - P(a, x) the upper tail.  Series for x < a+1, continued
// fraction otherwise (relative error below 1e-12 for the a used here).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-squared distribution with dof degrees of freedom.
double chi2_survival(double x, double dof);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace wfsel
