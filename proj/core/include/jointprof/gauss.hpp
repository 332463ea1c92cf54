#ifndef JOINTPROF_GAUSS_HPP
#define JOINTPROF_GAUSS_HPP

namespace jointprof {

// Standard normal density.
double normal_pdf(double z);

// Standard normal CDF via erfc; absolute error well under 1e-12.
double normal_cdf(double z);

// Inverse standard normal CDF. Rational initial guess refined by Newton
// steps against normal_cdf; relative accuracy near machine precision all
// the way into the tails. p must be in (0, 1).
double normal_quantile(double p);

}  // namespace jointprof

#endif  // JOINTPROF_GAUSS_HPP
