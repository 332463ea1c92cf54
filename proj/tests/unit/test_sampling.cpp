#include <cmath>
#include <map>

#include <doctest.h>

#include "helpers.hpp"
#include "jointprof/enumeration.hpp"
#include "jointprof/moments.hpp"
#include "jointprof/sampling.hpp"

using namespace jointprof;
using namespace jointprof::testing;

TEST_CASE("draw_state is uniform over states") {
  const Network net = coin_pair();
  Rng rng(31337);
  std::map<StateIndex, int> hits;
  const int m = 100000;
  for (int i = 0; i < m; ++i) {
    hits[assignment_to_index(net, draw_state(net, rng))]++;
  }
  REQUIRE(hits.size() == 4);
  const double bound = 3.0 * std::sqrt(0.25 * 0.75 / m);
  for (const auto& [idx, count] : hits) {
    CHECK(std::abs(static_cast<double>(count) / m - 0.25) <= bound);
  }
}

TEST_CASE("chi-square uniformity over a three-variable network") {
  const Network net = Network::build(
      "mix", {make_var("a", {0.2, 0.8}), make_var("b", {0.1, 0.6, 0.3}),
              make_var("c", {0.5, 0.5})});
  REQUIRE(net.state_count() == 12);
  Rng rng(777);
  const int m = 1000000;
  std::vector<int> hits(12, 0);
  for (int i = 0; i < m; ++i) {
    hits[assignment_to_index(net, draw_state(net, rng))]++;
  }
  const double expected = static_cast<double>(m) / 12.0;
  double chi2 = 0.0;
  for (const int h : hits) {
    const double d = h - expected;
    chi2 += d * d / expected;
  }
  // 0.001 critical value for 11 degrees of freedom
  CHECK(chi2 < 31.264133620239994);
}

TEST_CASE("figure-2 sample summary: moments near theory, seeded") {
  const Network net = figure2_model();
  const NormalModel nm = theoretical_normal(net);
  SampleOptions opts;
  opts.seed = 42;
  const std::uint64_t m = 100000;
  const SampleSummary s = sample_summary(net, m, HistogramSpec{}, nm, opts);
  CHECK(s.m == m);
  CHECK(s.zero_draws == 0);
  CHECK(std::abs(s.mean - nm.xi) <= 3.0 * std::sqrt(nm.phi2 / static_cast<double>(m)));
  CHECK(std::abs(s.variance - nm.phi2) <= 0.1 * nm.phi2);
  CHECK(s.ks < 0.02);
  CHECK(s.seed == 42);
}

TEST_CASE("sampling histogram converges to the enumeration histogram") {
  const Network net = figure2_model();
  HistogramSpec spec;
  spec.min_log10 = -11.0;
  spec.max_log10 = 0.0;
  const MassProfile exact = enumerate_profile(net, spec);
  SampleOptions opts;
  opts.seed = 9001;
  const std::uint64_t m = 1000000;
  const SampleSummary s =
      sample_summary(net, m, spec, theoretical_normal(net), opts);

  REQUIRE(exact.histogram.bins.size() == s.histogram.bins.size());
  double tv = 0.0;
  for (std::size_t b = 0; b < exact.histogram.bins.size(); ++b) {
    const double p_exact = static_cast<double>(exact.histogram.bins[b].count) /
                           static_cast<double>(exact.state_count);
    const double p_sample =
        static_cast<double>(s.histogram.bins[b].count) / static_cast<double>(m);
    tv += std::abs(p_exact - p_sample);
  }
  CHECK(tv / 2.0 < 0.05);
}

TEST_CASE("uniform network: zero variance, degenerate reference flagged") {
  const Network net = iid_binary(4, 0.5);
  const NormalModel nm = theoretical_normal(net);  // phi2 == 0
  SampleOptions opts;
  opts.seed = 5;
  const SampleSummary s = sample_summary(net, 1000, HistogramSpec{}, nm, opts);
  CHECK(s.variance == 0.0);
  CHECK(s.reference_degenerate);
}

TEST_CASE("all-zero draws surface a no-data error") {
  // only the all-second-outcome state is possible; every other draw is zero
  const Network net =
      Network::build("z", {make_var("a", {0.0, 1.0}), make_var("b", {0.0, 1.0})});
  NormalModel ref;
  ref.xi = -1.0;
  ref.phi2 = 1.0;
  SampleOptions opts;
  opts.threads = 1;
  bool found_seed = false;
  for (std::uint64_t seed = 0; seed < 64 && !found_seed; ++seed) {
    opts.seed = seed;
    try {
      sample_summary(net, 2, HistogramSpec{}, ref, opts);
    } catch (const Error&) {
      found_seed = true;  // both draws hit zero-probability states
    }
  }
  CHECK(found_seed);
}

TEST_CASE("sample summaries are independent of the worker count") {
  const Network net = figure2_model();
  const NormalModel nm = theoretical_normal(net);
  SampleOptions serial;
  serial.seed = 77;
  serial.threads = 1;
  SampleOptions parallel;
  parallel.seed = 77;
  parallel.threads = 8;
  const SampleSummary a = sample_summary(net, 50000, HistogramSpec{}, nm, serial);
  const SampleSummary b = sample_summary(net, 50000, HistogramSpec{}, nm, parallel);
  CHECK(a.mean == b.mean);
  CHECK(a.variance == b.variance);
  CHECK(a.ks == b.ks);
  REQUIRE(a.histogram.bins.size() == b.histogram.bins.size());
  for (std::size_t i = 0; i < a.histogram.bins.size(); ++i) {
    CHECK(a.histogram.bins[i].count == b.histogram.bins[i].count);
    CHECK(a.histogram.bins[i].mass == b.histogram.bins[i].mass);
  }
}
