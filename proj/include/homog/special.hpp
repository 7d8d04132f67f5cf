#pragma once

namespace homog {

// regularized lower incomplete gamma P(a,x); series for x < a+1, continued
// fraction for the complement otherwise
double regularized_gamma_p(double a, double x);

// CDF of the noncentral chi-square with k degrees of freedom and
// noncentrality lambda, as a Poisson-weighted mixture of central chi-square
// CDFs summed outward from the Poisson mode
double noncentral_chisq_cdf(double x, double k, double lambda);

}  // namespace homog
