#ifndef JOINTPROF_ENUMERATION_HPP
#define JOINTPROF_ENUMERATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "jointprof/network.hpp"

namespace jointprof {

enum class OutOfRangePolicy {
  kRecord,  // count under/overflow separately, keep them out of the bins
  kClamp,   // fold them into the edge bins
};

// Binning of log10 p. Range is auto-fitted to the data when unset.
struct HistogramSpec {
  double bin_width_log10 = 0.5;
  std::optional<double> min_log10;
  std::optional<double> max_log10;
  OutOfRangePolicy out_of_range = OutOfRangePolicy::kRecord;
};

struct HistogramBin {
  double lo_log10 = 0.0;
  double hi_log10 = 0.0;
  std::uint64_t count = 0;
  double mass = 0.0;  // sum of state probabilities in the bin
};

struct Histogram {
  std::vector<HistogramBin> bins;
  std::uint64_t underflow_count = 0;
  std::uint64_t overflow_count = 0;
};

struct CoveragePoint {
  std::uint64_t rank = 0;     // 1-based; the k most probable states
  double state_prob = 0.0;    // probability of the state at this rank
  double cumulative_mass = 0.0;
};

// The full exact profile of one joint distribution. States with a zero
// factor are tallied in zero_state_count and appear nowhere else (their log
// probability is undefined); every derived statistic covers the positive
// states.
struct MassProfile {
  std::uint64_t state_count = 0;
  std::uint64_t zero_state_count = 0;
  double total_mass = 0.0;  // compensated sum over all states; 1 up to rounding
  Histogram histogram;
  std::vector<double> sorted_log_probs;  // natural log, descending
  std::vector<CoveragePoint> coverage;   // selected ranks, dense head then geometric
  double spread_orders = 0.0;            // log10(p_max / p_min>0)
  double lnp_mean = 0.0;                 // over positive states, uniform weight
  double lnp_variance = 0.0;
};

struct EnumerateOptions {
  std::uint64_t max_states = std::uint64_t{1} << 24;
  unsigned threads = 1;  // 0 = hardware concurrency
};

// Visits every state exactly once and builds the profile. Output is
// bit-identical for any thread count: work is split into chunks fixed by
// the network alone and partial results merge in chunk order.
// Throws CapExceededError when state_count > options.max_states.
MassProfile enumerate_profile(const Network& net, const HistogramSpec& spec,
                              const EnumerateOptions& options = {});

// One ranked state. Ranking key everywhere is (log_prob desc, index asc).
struct TopState {
  StateIndex index = 0;
  double log_prob = 0.0;
  double prob = 0.0;
  Assignment assignment;
};

// The k most probable positive-probability states, exactly, by full sweep.
// Fewer than k entries come back when the network has fewer positive states.
std::vector<TopState> top_k_exact(const Network& net, std::uint64_t k,
                                  const EnumerateOptions& options = {});

// Smallest rank k whose cumulative coverage reaches mass fraction f
// (0 < f <= 1); the count of positive states if f exceeds their total.
std::uint64_t coverage_at_mass(const MassProfile& profile, double f);

// Shared binning helper: values are natural-log probabilities sorted
// descending.
Histogram build_histogram(std::span<const double> lnp_sorted_desc,
                          const HistogramSpec& spec);

}  // namespace jointprof

#endif  // JOINTPROF_ENUMERATION_HPP
