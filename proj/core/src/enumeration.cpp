#include "jointprof/enumeration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <queue>
#include <thread>

#include "jointprof/summation.hpp"

namespace jointprof {

namespace {

constexpr double kLn10 = 2.302585092994046;
// Subtree size a single chunk may cover; chunk boundaries depend only on
// the network, so results cannot depend on the worker count.
constexpr std::uint64_t kChunkTargetStates = std::uint64_t{1} << 16;
constexpr std::size_t kMaxBins = 1u << 20;

// Walks all completions of the prefix a[0..depth) in lexicographic order.
// on_state(index, lnp) fires for each positive state; on_zeros(count) fires
// once per pruned all-zero subtree. lnp accumulates left to right, one
// std::log per level, so every caller sees identical doubles per state.
template <typename FState, typename FZeros>
void walk_suffix(const Network& net, Assignment& a, std::size_t depth,
                 StateIndex base_index, double lnp_prefix,
                 std::span<const std::uint64_t> suffix_counts, FState&& on_state,
                 FZeros&& on_zeros) {
  if (depth == net.variable_count()) {
    on_state(base_index, lnp_prefix);
    return;
  }
  const Variable& v = net.variable(depth);
  const std::uint64_t config = net.parent_config(depth, a);
  const double* column = v.cpt.data() + config * v.outcome_count();
  const std::uint64_t stride = net.strides()[depth];
  for (std::uint32_t o = 0; o < v.outcome_count(); ++o) {
    const double q = column[o];
    if (q == 0.0) {
      on_zeros(suffix_counts[depth + 1]);
      continue;
    }
    a[depth] = o;
    walk_suffix(net, a, depth + 1, base_index + o * stride, lnp_prefix + std::log(q),
                suffix_counts, on_state, on_zeros);
  }
  a[depth] = 0;
}

// suffix_counts[d] = number of states of variables d..n-1.
std::vector<std::uint64_t> make_suffix_counts(const Network& net) {
  const std::size_t n = net.variable_count();
  std::vector<std::uint64_t> counts(n + 1, 1);
  for (std::size_t i = n; i-- > 0;) {
    counts[i] = counts[i + 1] * net.variable(i).outcome_count();
  }
  return counts;
}

struct ChunkPlan {
  std::size_t split_depth = 0;     // prefix variables enumerated per chunk id
  std::uint64_t chunk_count = 1;   // product of the first split_depth outcome counts
  std::uint64_t chunk_states = 1;  // states covered by one chunk
};

ChunkPlan plan_chunks(const Network& net, std::span<const std::uint64_t> suffix_counts) {
  ChunkPlan plan;
  const std::size_t n = net.variable_count();
  std::size_t d = 0;
  while (d < n && suffix_counts[d] > kChunkTargetStates) ++d;
  plan.split_depth = d;
  plan.chunk_states = suffix_counts[d];
  plan.chunk_count = suffix_counts[0] / suffix_counts[d];
  return plan;
}

struct ChunkPart {
  std::vector<double> lnps;
  std::uint64_t zeros = 0;
  Accumulator mass;
};

// Runs fn(chunk_id) over all chunks on `threads` workers.
void run_chunks(std::uint64_t chunk_count, unsigned threads,
                const std::function<void(std::uint64_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunk_count, 1)));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunk_count; ++c) fn(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
        if (c >= chunk_count) return;
        fn(c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Fills a[0..split_depth) from the chunk id and returns the prefix log
// probability, or nullopt if some prefix factor is zero.
std::optional<double> decode_chunk_prefix(const Network& net, std::uint64_t chunk,
                                          std::size_t split_depth,
                                          std::span<const std::uint64_t> suffix_counts,
                                          Assignment& a, StateIndex& base_index) {
  double lnp = 0.0;
  std::uint64_t rem = chunk;
  base_index = 0;
  for (std::size_t i = 0; i < split_depth; ++i) {
    const std::uint64_t digit_weight = suffix_counts[i + 1] / suffix_counts[split_depth];
    const auto o = static_cast<std::uint32_t>(rem / digit_weight);
    rem %= digit_weight;
    a[i] = o;
    base_index += o * net.strides()[i];
  }
  for (std::size_t i = 0; i < split_depth; ++i) {
    const double q = net.factor(i, a);
    if (q == 0.0) return std::nullopt;
    lnp += std::log(q);
  }
  return lnp;
}

void check_cap(const Network& net, const EnumerateOptions& options, const char* op) {
  if (net.state_count() > options.max_states) {
    throw CapExceededError(std::string(op) + ": network has " +
                               std::to_string(net.state_count()) +
                               " states, above the cap of " +
                               std::to_string(options.max_states) +
                               "; raise the cap to at least the state count",
                           net.state_count());
  }
}

}  // namespace

Histogram build_histogram(std::span<const double> lnp_sorted_desc,
                          const HistogramSpec& spec) {
  if (!(spec.bin_width_log10 > 0.0)) {
    throw ValidationError("histogram bin width must be positive");
  }
  Histogram hist;
  if (lnp_sorted_desc.empty()) return hist;

  const double w = spec.bin_width_log10;
  const double data_max = lnp_sorted_desc.front() / kLn10;
  const double data_min = lnp_sorted_desc.back() / kLn10;
  double lo = spec.min_log10 ? *spec.min_log10 : std::floor(data_min / w) * w;
  double hi = spec.max_log10 ? *spec.max_log10 : std::ceil(data_max / w) * w;
  if (!spec.max_log10 && hi <= data_max) hi += w;  // keep the max strictly inside
  if (!(lo < hi)) {
    throw ValidationError("histogram range is empty (min must be below max)");
  }
  const double span10 = (hi - lo) / w;
  if (span10 > static_cast<double>(kMaxBins)) {
    throw ValidationError("histogram would need more than " +
                          std::to_string(kMaxBins) +
                          " bins; widen the bin width or narrow the range");
  }
  const auto nbins = static_cast<std::size_t>(std::llround(std::ceil(span10 - 1e-9)));
  hist.bins.resize(std::max<std::size_t>(nbins, 1));
  for (std::size_t b = 0; b < hist.bins.size(); ++b) {
    hist.bins[b].lo_log10 = lo + static_cast<double>(b) * w;
    hist.bins[b].hi_log10 = lo + static_cast<double>(b + 1) * w;
  }

  std::vector<Accumulator> masses(hist.bins.size());
  for (const double lnp : lnp_sorted_desc) {
    const double x = lnp / kLn10;
    double pos = std::floor((x - lo) / w);
    if (pos < 0.0 || x < lo) {
      if (spec.out_of_range == OutOfRangePolicy::kRecord) {
        ++hist.underflow_count;
        continue;
      }
      pos = 0.0;
    }
    auto b = static_cast<std::size_t>(pos);
    if (b >= hist.bins.size() || x >= hi) {
      if (spec.out_of_range == OutOfRangePolicy::kRecord && x >= hi) {
        ++hist.overflow_count;
        continue;
      }
      b = hist.bins.size() - 1;
    }
    ++hist.bins[b].count;
    masses[b].add(std::exp(lnp));
  }
  for (std::size_t b = 0; b < hist.bins.size(); ++b) {
    hist.bins[b].mass = masses[b].value();
  }
  return hist;
}

MassProfile enumerate_profile(const Network& net, const HistogramSpec& spec,
                              const EnumerateOptions& options) {
  check_cap(net, options, "enumerate_profile");

  const auto suffix_counts = make_suffix_counts(net);
  const ChunkPlan plan = plan_chunks(net, suffix_counts);

  std::vector<ChunkPart> parts(plan.chunk_count);
  run_chunks(plan.chunk_count, options.threads, [&](std::uint64_t c) {
    ChunkPart& part = parts[c];
    Assignment a(net.variable_count(), 0);
    StateIndex base = 0;
    const auto prefix_lnp =
        decode_chunk_prefix(net, c, plan.split_depth, suffix_counts, a, base);
    if (!prefix_lnp) {
      part.zeros = plan.chunk_states;
      return;
    }
    part.lnps.reserve(plan.chunk_states);
    walk_suffix(
        net, a, plan.split_depth, base, *prefix_lnp, suffix_counts,
        [&](StateIndex, double lnp) {
          part.lnps.push_back(lnp);
          part.mass.add(std::exp(lnp));
        },
        [&](std::uint64_t zeros) { part.zeros += zeros; });
  });

  MassProfile profile;
  profile.state_count = net.state_count();
  Accumulator total;
  std::size_t positive = 0;
  for (const ChunkPart& part : parts) positive += part.lnps.size();
  profile.sorted_log_probs.reserve(positive);
  for (ChunkPart& part : parts) {
    profile.zero_state_count += part.zeros;
    total.merge(part.mass);
    profile.sorted_log_probs.insert(profile.sorted_log_probs.end(), part.lnps.begin(),
                                    part.lnps.end());
    part.lnps = {};
  }
  parts.clear();
  parts.shrink_to_fit();
  profile.total_mass = total.value();
  std::sort(profile.sorted_log_probs.begin(), profile.sorted_log_probs.end(),
            std::greater<>());

  if (!profile.sorted_log_probs.empty()) {
    profile.spread_orders =
        (profile.sorted_log_probs.front() - profile.sorted_log_probs.back()) / kLn10;

    Accumulator mean_acc;
    for (const double x : profile.sorted_log_probs) mean_acc.add(x);
    profile.lnp_mean =
        mean_acc.value() / static_cast<double>(profile.sorted_log_probs.size());
    Accumulator var_acc;
    for (const double x : profile.sorted_log_probs) {
      const double d = x - profile.lnp_mean;
      var_acc.add(d * d);
    }
    profile.lnp_variance =
        var_acc.value() / static_cast<double>(profile.sorted_log_probs.size());

    profile.histogram = build_histogram(profile.sorted_log_probs, spec);

    // Coverage curve: every rank up to 64, then geometric, then the tail rank.
    Accumulator cum;
    std::uint64_t next_rank = 1;
    const std::uint64_t n = profile.sorted_log_probs.size();
    for (std::uint64_t r = 1; r <= n; ++r) {
      const double lnp = profile.sorted_log_probs[r - 1];
      cum.add(std::exp(lnp));
      if (r == next_rank || r == n) {
        profile.coverage.push_back(CoveragePoint{r, std::exp(lnp), cum.value()});
        if (r >= 64) {
          next_rank = std::max(next_rank + 1, (next_rank * 5) / 4);
        } else {
          ++next_rank;
        }
      }
    }
  }
  return profile;
}

std::vector<TopState> top_k_exact(const Network& net, std::uint64_t k,
                                  const EnumerateOptions& options) {
  check_cap(net, options, "top_k_exact");

  struct Entry {
    double lnp;
    StateIndex index;
  };
  // Worst of the kept set on top: lowest lnp, ties with the larger index.
  const auto better = [](const Entry& a, const Entry& b) {
    if (a.lnp != b.lnp) return a.lnp > b.lnp;
    return a.index < b.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(better)> keep(better);

  const auto suffix_counts = make_suffix_counts(net);
  Assignment a(net.variable_count(), 0);
  if (k > 0) {
    walk_suffix(
        net, a, 0, 0, 0.0, suffix_counts,
        [&](StateIndex idx, double lnp) {
          if (keep.size() < k) {
            keep.push(Entry{lnp, idx});
            return;
          }
          const Entry& worst = keep.top();
          if (lnp > worst.lnp || (lnp == worst.lnp && idx < worst.index)) {
            keep.pop();
            keep.push(Entry{lnp, idx});
          }
        },
        [](std::uint64_t) {});
  }

  std::vector<TopState> result(keep.size());
  for (std::size_t i = keep.size(); i-- > 0;) {
    const Entry e = keep.top();
    keep.pop();
    result[i].index = e.index;
    result[i].log_prob = e.lnp;
    result[i].prob = std::exp(e.lnp);
    result[i].assignment = index_to_assignment(net, e.index);
  }
  return result;
}

std::uint64_t coverage_at_mass(const MassProfile& profile, double f) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw ValidationError("coverage_at_mass: f must lie in (0, 1]");
  }
  Accumulator cum;
  std::uint64_t rank = 0;
  for (const double lnp : profile.sorted_log_probs) {
    ++rank;
    cum.add(std::exp(lnp));
    if (cum.value() >= f) return rank;
  }
  return profile.sorted_log_probs.size();
}

}  // namespace jointprof
