#ifndef JOINTPROF_LOGNORMAL_FIT_HPP
#define JOINTPROF_LOGNORMAL_FIT_HPP

#include <cstdint>
#include <span>

#include "jointprof/moments.hpp"

namespace jointprof {

// Moment fit of a NormalModel to observed ln p values: xi = weighted mean,
// phi2 = weighted variance. Empty weights mean uniform. Non-finite values
// are ignored; at least 2 finite values must remain (else Error). All-equal
// input comes back with phi2 == 0, the degenerate marker.
NormalModel fit_normal(std::span<const double> lnp_values,
                       std::span<const double> weights = {});

// Solution of the threshold equation: states less likely than t jointly
// carry mass fraction f under the truncated contribution model.
struct ThresholdResult {
  double f = 0.0;
  double ln_t = 0.0;
  double t = 0.0;
  double l = 0.0;              // fraction of states below t, truncated normal
  double l_untruncated = 0.0;  // same with the plain normal CDF, for comparison
  int iterations = 0;          // quantile + polish steps
  double residual = 0.0;       // |contribution CDF(ln_t) - f|
};

// Solves contribution_log_cdf(nm, ln t) = f via the Gaussian quantile,
// then polishes with Newton until the residual is at machine level.
// Requires 0 < f < 1 and nm.phi2 > 0.
ThresholdResult mass_threshold(const NormalModel& nm, double f);

// Estimated number of states that must be enumerated to cover mass
// 1 - epsilon: (1 - l(t(epsilon))) * state_count.
double epsilon_rank_estimate(const NormalModel& nm, double epsilon,
                             std::uint64_t state_count);

// Kolmogorov-Smirnov statistic of a sample of ln p against the truncated
// reference normal. Tied values are treated as one atom and the empirical
// CDF is evaluated at the midpoint of its jump (the standard discrete-data
// continuity correction); for an atom-free sample this differs from the
// plain two-sided statistic by at most 1/(2m).
double ks_statistic(std::span<const double> lnp_sorted_ascending,
                    const NormalModel& reference);

}  // namespace jointprof

#endif  // JOINTPROF_LOGNORMAL_FIT_HPP
