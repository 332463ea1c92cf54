#ifndef JOINTPROF_SAMPLING_HPP
#define JOINTPROF_SAMPLING_HPP

#include <cstdint>

#include "jointprof/enumeration.hpp"
#include "jointprof/moments.hpp"
#include "jointprof/network.hpp"
#include "jointprof/rng.hpp"

namespace jointprof {

// One state drawn uniformly from all states: each variable's outcome is an
// independent uniform pick, so every state is selected with probability
// 1 / state_count regardless of its model probability.
Assignment draw_state(const Network& net, Rng& rng);

struct SampleSummary {
  std::uint64_t m = 0;           // requested draws
  std::uint64_t zero_draws = 0;  // draws that hit a zero-probability state
  double mean = 0.0;             // of ln p over the positive draws
  double variance = 0.0;
  Histogram histogram;
  double ks = 0.0;  // vs the truncated reference; see ks_statistic for the convention
  bool reference_degenerate = false;  // reference was a point mass, KS unusable
  std::uint64_t seed = 0;
};

struct SampleOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = hardware concurrency
};

// Draws m states, records ln p of each, and summarizes. Draw blocks have
// seeds fixed by (seed, block) alone, so the outcome is bit-identical for
// any thread count. Throws Error when every draw lands on probability zero.
SampleSummary sample_summary(const Network& net, std::uint64_t m,
                             const HistogramSpec& spec, const NormalModel& reference,
                             const SampleOptions& options);

}  // namespace jointprof

#endif  // JOINTPROF_SAMPLING_HPP
