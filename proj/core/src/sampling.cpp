#include "jointprof/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "jointprof/lognormal_fit.hpp"
#include "jointprof/summation.hpp"

namespace jointprof {

namespace {
constexpr std::uint64_t kBlockSize = 4096;
}

Assignment draw_state(const Network& net, Rng& rng) {
  Assignment a(net.variable_count());
  for (std::size_t i = 0; i < net.variable_count(); ++i) {
    a[i] = static_cast<std::uint32_t>(rng.uniform_below(net.variable(i).outcome_count()));
  }
  return a;
}

SampleSummary sample_summary(const Network& net, std::uint64_t m,
                             const HistogramSpec& spec, const NormalModel& reference,
                             const SampleOptions& options) {
  if (m < 2) throw ValidationError("sample_summary needs at least 2 draws");

  const std::uint64_t blocks = (m + kBlockSize - 1) / kBlockSize;
  struct Block {
    std::vector<double> lnps;
    std::uint64_t zeros = 0;
  };
  std::vector<Block> parts(blocks);
  const Rng root(options.seed);

  unsigned threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));

  const auto run_block = [&](std::uint64_t b) {
    Rng rng = root.split(b);
    Block& part = parts[b];
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t end = std::min(m, begin + kBlockSize);
    part.lnps.reserve(end - begin);
    Assignment a(net.variable_count());
    for (std::uint64_t j = begin; j < end; ++j) {
      for (std::size_t i = 0; i < net.variable_count(); ++i) {
        a[i] = static_cast<std::uint32_t>(
            rng.uniform_below(net.variable(i).outcome_count()));
      }
      double lnp = 0.0;
      bool zero = false;
      for (std::size_t i = 0; i < net.variable_count(); ++i) {
        const double q = net.factor(i, a);
        if (q == 0.0) {
          zero = true;
          break;
        }
        lnp += std::log(q);
      }
      if (zero) {
        ++part.zeros;
      } else {
        part.lnps.push_back(lnp);
      }
    }
  };

  if (threads <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
          if (b >= blocks) return;
          run_block(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  SampleSummary summary;
  summary.m = m;
  summary.seed = options.seed;
  std::vector<double> values;
  values.reserve(m);
  for (Block& part : parts) {
    summary.zero_draws += part.zeros;
    values.insert(values.end(), part.lnps.begin(), part.lnps.end());
    part.lnps = {};
  }
  if (values.empty()) {
    throw Error("sample_summary: every draw hit a zero-probability state");
  }

  Accumulator mean_acc;
  for (const double x : values) mean_acc.add(x);
  summary.mean = mean_acc.value() / static_cast<double>(values.size());
  Accumulator var_acc;
  for (const double x : values) {
    const double d = x - summary.mean;
    var_acc.add(d * d);
  }
  summary.variance = var_acc.value() / static_cast<double>(values.size());

  std::sort(values.begin(), values.end(), std::greater<>());
  summary.histogram = build_histogram(values, spec);

  if (!(reference.phi2 > 0.0)) {
    summary.reference_degenerate = true;
    summary.ks = 1.0;
  } else {
    std::reverse(values.begin(), values.end());  // ks_statistic wants ascending
    summary.ks = ks_statistic(values, reference);
  }
  return summary;
}

}  // namespace jointprof
