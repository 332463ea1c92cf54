#include "jointprof/lognormal_fit.hpp"

#include <cmath>
#include <string>

#include "jointprof/gauss.hpp"
#include "jointprof/summation.hpp"

namespace jointprof {

NormalModel fit_normal(std::span<const double> lnp_values,
                       std::span<const double> weights) {
  const bool weighted = !weights.empty();
  if (weighted && weights.size() != lnp_values.size()) {
    throw ValidationError("fit_normal: weights must match values one to one");
  }

  Accumulator wsum, wx;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < lnp_values.size(); ++i) {
    const double x = lnp_values[i];
    if (!std::isfinite(x)) continue;
    const double w = weighted ? weights[i] : 1.0;
    if (w < 0.0) throw ValidationError("fit_normal: weights must be nonnegative");
    if (w == 0.0) continue;
    ++finite;
    wsum.add(w);
    wx.add(w * x);
  }
  if (finite < 2) {
    throw Error("fit_normal: need at least 2 finite, positively weighted values");
  }
  if (!(wsum.value() > 0.0)) {
    throw ValidationError("fit_normal: weights must not all be zero");
  }

  NormalModel nm;
  nm.xi = wx.value() / wsum.value();
  Accumulator wd2;
  for (std::size_t i = 0; i < lnp_values.size(); ++i) {
    const double x = lnp_values[i];
    if (!std::isfinite(x)) continue;
    const double w = weighted ? weights[i] : 1.0;
    if (w == 0.0) continue;
    const double d = x - nm.xi;
    wd2.add(w * d * d);
  }
  nm.phi2 = std::max(0.0, wd2.value() / wsum.value());
  nm.truncated_at_zero = true;
  return nm;
}

ThresholdResult mass_threshold(const NormalModel& nm, double f) {
  if (!(f > 0.0 && f < 1.0)) {
    throw ValidationError("mass_threshold: f must lie in (0, 1)");
  }
  if (!(nm.phi2 > 0.0)) {
    throw DegenerateError("mass_threshold: phi2 = 0 makes ln p a point mass");
  }
  const double phi = std::sqrt(nm.phi2);
  const double mode = nm.xi + nm.phi2;  // mean of the contribution normal

  // Closed-form inversion of the truncated Gaussian CDF, then a Newton
  // polish against the same CDF the caller will use for round-trips.
  const double trunc = normal_cdf((0.0 - mode) / phi);
  double ln_t = mode + phi * normal_quantile(f * trunc);

  ThresholdResult r;
  r.f = f;
  r.iterations = 1;
  for (int i = 0; i < 8; ++i) {
    const double err = contribution_log_cdf(nm, ln_t) - f;
    const double dens = contribution_log(nm, ln_t);
    if (dens <= 0.0) break;
    const double step = err / dens;
    ln_t -= step;
    ++r.iterations;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(ln_t))) break;
  }
  if (ln_t > 0.0) ln_t = 0.0;

  r.ln_t = ln_t;
  r.t = std::exp(ln_t);
  r.l = density_log_cdf(nm, ln_t);
  r.l_untruncated = normal_cdf((ln_t - nm.xi) / phi);
  r.residual = std::abs(contribution_log_cdf(nm, ln_t) - f);
  return r;
}

double epsilon_rank_estimate(const NormalModel& nm, double epsilon,
                             std::uint64_t state_count) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon_rank_estimate: epsilon must lie in (0, 1)");
  }
  const ThresholdResult r = mass_threshold(nm, epsilon);
  return (1.0 - r.l) * static_cast<double>(state_count);
}

double ks_statistic(std::span<const double> lnp_sorted_ascending,
                    const NormalModel& reference) {
  if (lnp_sorted_ascending.empty()) {
    throw ValidationError("ks_statistic: empty sample");
  }
  if (!(reference.phi2 > 0.0)) {
    throw DegenerateError("ks_statistic: reference is a point mass");
  }
  // Values within this gap count as one atom: states of equal probability
  // accumulate their factor logs in different orders, so a lattice atom
  // arrives as a cloud of ulp-separated values. Genuine distinct atoms of a
  // factored model sit far apart on the ln p axis, and for continuous
  // samples a merge this narrow moves the statistic by under 1/m.
  constexpr double kAtomGap = 1e-9;
  const double n = static_cast<double>(lnp_sorted_ascending.size());
  double d_max = 0.0;
  std::size_t i = 0;
  while (i < lnp_sorted_ascending.size()) {
    std::size_t j = i + 1;
    while (j < lnp_sorted_ascending.size() &&
           lnp_sorted_ascending[j] - lnp_sorted_ascending[j - 1] <= kAtomGap) {
      ++j;
    }
    // Midpoint of the atom's jump vs the reference at the atom.
    const double x = 0.5 * (lnp_sorted_ascending[i] + lnp_sorted_ascending[j - 1]);
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / (2.0 * n);
    const double ref = density_log_cdf(reference, std::min(x, 0.0));
    d_max = std::max(d_max, std::abs(mid - ref));
    i = j;
  }
  return d_max;
}

}  // namespace jointprof
