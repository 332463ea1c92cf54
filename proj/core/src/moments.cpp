#include "jointprof/moments.hpp"

#include <cmath>
#include <string>

#include "jointprof/gauss.hpp"
#include "jointprof/summation.hpp"

namespace jointprof {

LogMoments binary_log_moments(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DegenerateError("binary_log_moments: q = " + std::to_string(q) +
                          " leaves ln p without moments");
  }
  const double logit = std::log(q / (1.0 - q));
  LogMoments m;
  m.mu = 0.5 * std::log(q * (1.0 - q));
  m.sigma2 = 0.25 * logit * logit;
  m.omega3 = 0.125 * std::abs(logit * logit * logit);
  return m;
}

LogMoments variable_log_moments(const Network& net, std::size_t i) {
  const Variable& v = net.variable(i);
  const std::size_t cells = v.cpt.size();
  const std::uint32_t k = v.outcome_count();

  Accumulator sum_log;
  for (std::size_t c = 0; c < cells; ++c) {
    const double q = v.cpt[c];
    if (q == 0.0) {
      throw DegenerateError("variable '" + v.name + "' has a zero CPT entry (column " +
                            std::to_string(c / k) + ", outcome " + std::to_string(c % k) +
                            "); ln p has no moments there");
    }
    sum_log.add(std::log(q));
  }
  LogMoments m;
  m.mu = sum_log.value() / static_cast<double>(cells);

  Accumulator sum_sq, sum_cube;
  for (std::size_t c = 0; c < cells; ++c) {
    const double d = std::log(v.cpt[c]) - m.mu;
    sum_sq.add(d * d);
    sum_cube.add(std::abs(d * d * d));
  }
  m.sigma2 = sum_sq.value() / static_cast<double>(cells);
  m.omega3 = sum_cube.value() / static_cast<double>(cells);
  if (m.sigma2 < 0.0) m.sigma2 = 0.0;
  return m;
}

LiapounovReport liapounov_ratio(std::span<const LogMoments> moments) {
  LiapounovReport report;
  report.sigma2s.reserve(moments.size());
  report.omega3s.reserve(moments.size());
  Accumulator s2, w3;
  for (const LogMoments& m : moments) {
    report.sigma2s.push_back(m.sigma2);
    report.omega3s.push_back(m.omega3);
    s2.add(m.sigma2);
    w3.add(m.omega3);
  }
  const double denom = s2.value();
  if (denom <= 0.0) {
    throw DegenerateError(
        "liapounov_ratio: total variance is zero (all variables symmetric or "
        "deterministic), ratio undefined");
  }
  report.ratio = w3.value() / std::pow(denom, 1.5);
  return report;
}

LiapounovReport liapounov_report(const Network& net) {
  std::vector<LogMoments> ms;
  ms.reserve(net.variable_count());
  bool multi = false;
  for (std::size_t i = 0; i < net.variable_count(); ++i) {
    ms.push_back(variable_log_moments(net, i));
    multi |= net.variable(i).outcome_count() > 2;
  }
  LiapounovReport report = liapounov_ratio(ms);
  report.multi_valued_advisory = multi;
  return report;
}

NormalModel theoretical_normal(const Network& net) {
  Accumulator xi, phi2;
  for (std::size_t i = 0; i < net.variable_count(); ++i) {
    const LogMoments m = variable_log_moments(net, i);
    xi.add(m.mu);
    phi2.add(m.sigma2);
  }
  NormalModel nm;
  nm.xi = xi.value();
  nm.phi2 = phi2.value();
  nm.truncated_at_zero = true;
  return nm;
}

namespace {

void require_spread(const NormalModel& nm, const char* op) {
  if (!(nm.phi2 > 0.0)) {
    throw DegenerateError(std::string(op) + ": phi2 = 0 makes ln p a point mass");
  }
}

double truncated_density(double mean, double phi, double lnp) {
  const double z = (lnp - mean) / phi;
  const double trunc = normal_cdf((0.0 - mean) / phi);
  return normal_pdf(z) / (phi * trunc);
}

double truncated_cdf(double mean, double phi, double lnp) {
  if (lnp >= 0.0) return 1.0;
  const double z = (lnp - mean) / phi;
  const double trunc = normal_cdf((0.0 - mean) / phi);
  return normal_cdf(z) / trunc;
}

}  // namespace

double density_log(const NormalModel& nm, double lnp) {
  require_spread(nm, "density_log");
  if (lnp > 0.0) return 0.0;
  return truncated_density(nm.xi, std::sqrt(nm.phi2), lnp);
}

double contribution_log(const NormalModel& nm, double lnp) {
  require_spread(nm, "contribution_log");
  if (lnp > 0.0) return 0.0;
  return truncated_density(nm.xi + nm.phi2, std::sqrt(nm.phi2), lnp);
}

double density_log_cdf(const NormalModel& nm, double lnp) {
  require_spread(nm, "density_log_cdf");
  return truncated_cdf(nm.xi, std::sqrt(nm.phi2), lnp);
}

double contribution_log_cdf(const NormalModel& nm, double lnp) {
  require_spread(nm, "contribution_log_cdf");
  return truncated_cdf(nm.xi + nm.phi2, std::sqrt(nm.phi2), lnp);
}

double skewness(const NormalModel& nm) {
  require_spread(nm, "skewness");
  const double e = std::exp(nm.phi2);
  return (e + 2.0) * std::sqrt(e - 1.0);
}

}  // namespace jointprof
