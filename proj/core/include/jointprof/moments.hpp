#ifndef JOINTPROF_MOMENTS_HPP
#define JOINTPROF_MOMENTS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "jointprof/network.hpp"

namespace jointprof {

// Moments of ln p_i when p_i is a uniformly drawn CPT entry of one variable:
// mean, variance, and third absolute central moment E|ln p_i - mu|^3.
struct LogMoments {
  double mu = 0.0;
  double sigma2 = 0.0;
  double omega3 = 0.0;
};

// Normal model of ln p: either the per-variable sums or a fit. Support is
// truncated to ln p <= 0 wherever the model is evaluated as a density.
struct NormalModel {
  double xi = 0.0;
  double phi2 = 0.0;
  bool truncated_at_zero = true;
};

// The finite-n value of the CLT precondition ratio
// sum(omega3) / sum(sigma2)^(3/2), with its per-variable inputs.
struct LiapounovReport {
  std::vector<double> sigma2s;
  std::vector<double> omega3s;
  double ratio = 0.0;
  // The closed-form justification of the precondition covers two-outcome
  // variables only; the ratio is still reported for larger k, flagged.
  bool multi_valued_advisory = false;
};

// Closed forms for a parentless two-outcome variable (q, 1-q):
//   mu     = 1/2 ln(q(1-q))
//   sigma2 = 1/4 ln^2(q/(1-q))
//   omega3 = 1/8 |ln(q/(1-q))|^3
// sigma^3 == omega3 holds exactly. Throws DegenerateError for q in {0, 1}.
LogMoments binary_log_moments(double q);

// Moments of ln(entry) under the uniform distribution over all CPT cells of
// variable i (uniform parent configuration x uniform outcome). Throws
// DegenerateError naming the cell if any entry is 0.
LogMoments variable_log_moments(const Network& net, std::size_t i);

// Ratio at finite n. Throws DegenerateError when sum(sigma2) == 0 (all
// variables symmetric or deterministic).
LiapounovReport liapounov_ratio(std::span<const LogMoments> moments);
LiapounovReport liapounov_report(const Network& net);

// (xi, phi2) = (sum of mu_i, sum of sigma2_i), truncated at ln p = 0.
NormalModel theoretical_normal(const Network& net);

// Density of ln p: normal(xi, phi2) renormalized on (-inf, 0].
// Requires phi2 > 0 and lnp <= 0.
double density_log(const NormalModel& nm, double lnp);

// Expected share of total mass carried by states at ln p: the same normal
// shifted up by phi2, renormalized on (-inf, 0].
double contribution_log(const NormalModel& nm, double lnp);

// CDFs of the two truncated densities above, used by threshold solving.
double density_log_cdf(const NormalModel& nm, double lnp);
double contribution_log_cdf(const NormalModel& nm, double lnp);

// Skewness coefficient of the (untruncated) lognormal of p:
// (e^phi2 + 2) sqrt(e^phi2 - 1).
double skewness(const NormalModel& nm);

}  // namespace jointprof

#endif  // JOINTPROF_MOMENTS_HPP
