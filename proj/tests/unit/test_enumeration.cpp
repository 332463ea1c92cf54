#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "jointprof/enumeration.hpp"
#include "jointprof/moments.hpp"
#include "jointprof/summation.hpp"

using namespace jointprof;
using namespace jointprof::testing;

namespace {

// Binomial closed form for the figure-2 model: a state with j low-probability
// outcomes has probability 0.1^j 0.9^(10-j), with multiplicity C(10, j).
double fig2_cumulative(int states) {
  static const double tier_prob[] = {0.3486784401, 0.0387420489, 0.0043046721};
  static const int tier_size[] = {1, 10, 45};
  double cum = 0.0;
  int left = states;
  for (int t = 0; t < 3 && left > 0; ++t) {
    const int take = std::min(left, tier_size[t]);
    cum += take * tier_prob[t];
    left -= take;
  }
  return cum;
}

}  // namespace

TEST_CASE("two fair coins: one occupied bin, exact coverage") {
  const MassProfile profile = enumerate_profile(coin_pair(), HistogramSpec{});
  CHECK(profile.state_count == 4);
  CHECK(profile.zero_state_count == 0);
  CHECK(std::abs(profile.total_mass - 1.0) <= 1e-12);
  REQUIRE(profile.histogram.bins.size() == 1);
  CHECK(profile.histogram.bins[0].lo_log10 == doctest::Approx(-1.0));
  CHECK(profile.histogram.bins[0].hi_log10 == doctest::Approx(-0.5));
  CHECK(profile.histogram.bins[0].count == 4);
  CHECK(profile.histogram.bins[0].mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(profile.spread_orders == 0.0);

  REQUIRE(profile.coverage.size() == 4);
  CHECK(profile.coverage.front().rank == 1);
  CHECK(profile.coverage.front().cumulative_mass == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(profile.coverage.back().rank == 4);
  CHECK(profile.coverage.back().cumulative_mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("figure-2 model: binomial coverage closed forms") {
  const MassProfile profile = enumerate_profile(figure2_model(), HistogramSpec{});
  CHECK(profile.state_count == 1024);
  CHECK(std::abs(profile.total_mass - 1.0) <= 1e-9);

  Accumulator cum;
  for (int r = 0; r < 56; ++r) cum.add(std::exp(profile.sorted_log_probs[r]));
  CHECK(std::abs(std::exp(profile.sorted_log_probs[0]) - 0.3486784401) <= 1e-9);
  CHECK(std::abs(fig2_cumulative(11) - 0.7360989291) <= 1e-12);
  CHECK(std::abs(fig2_cumulative(56) - 0.9298091736) <= 1e-12);
  CHECK(std::abs(cum.value() - 0.9298091736) <= 1e-9);

  // identities against the moments module
  const NormalModel nm = theoretical_normal(figure2_model());
  CHECK(close_rel(profile.lnp_mean, nm.xi, 1e-9));
  CHECK(close_rel(profile.lnp_variance, nm.phi2, 1e-9));
}

TEST_CASE("coverage_at_mass boundary semantics") {
  const MassProfile fig2 = enumerate_profile(figure2_model(), HistogramSpec{});
  // cumulative after 10 states = 0.697 < 0.7, so 11 are needed
  CHECK(coverage_at_mass(fig2, 0.7) == 11);
  CHECK(coverage_at_mass(fig2, 0.9) == 50);
  CHECK(coverage_at_mass(fig2, 1.0) == 1024);

  const MassProfile coins = enumerate_profile(coin_pair(), HistogramSpec{});
  CHECK(coverage_at_mass(coins, 0.5) == 2);
  CHECK_THROWS_AS(coverage_at_mass(coins, 0.0), ValidationError);
  CHECK_THROWS_AS(coverage_at_mass(coins, 1.5), ValidationError);
}

TEST_CASE("top_k_exact ranks and ties") {
  const auto top1 = top_k_exact(figure2_model(), 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].index == 1023);  // outcome 1 carries 0.9 for every variable
  CHECK(std::abs(top1[0].prob - 0.3486784401) <= 1e-9);
  CHECK(top1[0].assignment == Assignment(10, 1));

  const auto all = top_k_exact(coin_pair(), 4);
  REQUIRE(all.size() == 4);
  double total = 0.0;
  for (const auto& st : all) total += st.prob;
  CHECK(std::abs(total - 1.0) <= 1e-9);
  // uniform ties break by ascending state index
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].index == i);

  // prefix consistency
  const auto five = top_k_exact(figure2_model(), 5);
  const auto nine = top_k_exact(figure2_model(), 9);
  for (std::size_t i = 0; i < five.size(); ++i) {
    CHECK(five[i].index == nine[i].index);
    CHECK(five[i].log_prob == nine[i].log_prob);
  }
}

TEST_CASE("state cap is enforced with the required value") {
  EnumerateOptions opts;
  opts.max_states = 100;
  try {
    enumerate_profile(figure2_model(), HistogramSpec{}, opts);
    FAIL("expected CapExceededError");
  } catch (const CapExceededError& e) {
    CHECK(e.required_cap() == 1024);
  }
  CHECK_THROWS_AS(top_k_exact(figure2_model(), 1, opts), CapExceededError);
}

TEST_CASE("zero-probability states are tallied separately") {
  const Network net = deterministic_chain();  // a=0 forces b=0: 2 zero states
  const MassProfile profile = enumerate_profile(net, HistogramSpec{});
  CHECK(profile.state_count == 8);
  CHECK(profile.zero_state_count == 2);
  CHECK(profile.sorted_log_probs.size() == 6);
  std::uint64_t binned = 0;
  for (const auto& b : profile.histogram.bins) binned += b.count;
  CHECK(binned + profile.histogram.underflow_count + profile.histogram.overflow_count ==
        6);
  CHECK(std::abs(profile.total_mass - 1.0) <= 1e-12);
}

TEST_CASE("explicit ranges record or clamp out-of-range states") {
  HistogramSpec spec;
  spec.min_log10 = -0.4;
  spec.max_log10 = -0.2;
  const MassProfile recorded = enumerate_profile(deterministic_chain(), spec);
  CHECK(recorded.histogram.underflow_count > 0);

  spec.out_of_range = OutOfRangePolicy::kClamp;
  const MassProfile clamped = enumerate_profile(deterministic_chain(), spec);
  CHECK(clamped.histogram.underflow_count == 0);
  std::uint64_t binned = 0;
  for (const auto& b : clamped.histogram.bins) binned += b.count;
  CHECK(binned == 6);
}

TEST_CASE("outcome relabeling leaves the profile bit-identical") {
  const Network net = generate(GenSpec::parse("dirichlet:n=6,k=3,alpha=1,indeg=2,seed=15"));
  const Network relabeled = permute_outcomes(net, 2, {1, 2, 0});
  const MassProfile a = enumerate_profile(net, HistogramSpec{});
  const MassProfile b = enumerate_profile(relabeled, HistogramSpec{});
  CHECK(a.total_mass == b.total_mass);
  CHECK(a.sorted_log_probs == b.sorted_log_probs);
  REQUIRE(a.histogram.bins.size() == b.histogram.bins.size());
  for (std::size_t i = 0; i < a.histogram.bins.size(); ++i) {
    CHECK(a.histogram.bins[i].count == b.histogram.bins[i].count);
    CHECK(a.histogram.bins[i].mass == b.histogram.bins[i].mass);
  }
}

TEST_CASE("variable reordering preserves the profile up to rounding") {
  const Network net = generate(GenSpec::parse("dirichlet:n=6,k=2,alpha=1,seed=19"));
  const Network shuffled = reorder_variables(net, {3, 0, 5, 1, 4, 2});
  const MassProfile a = enumerate_profile(net, HistogramSpec{});
  const MassProfile b = enumerate_profile(shuffled, HistogramSpec{});
  REQUIRE(a.sorted_log_probs.size() == b.sorted_log_probs.size());
  for (std::size_t i = 0; i < a.sorted_log_probs.size(); ++i) {
    CHECK(close_abs(a.sorted_log_probs[i], b.sorted_log_probs[i], 1e-12));
  }
  CHECK(close_abs(a.total_mass, b.total_mass, 1e-12));
}

TEST_CASE("worker count cannot change a single bit") {
  const Network net = generate(GenSpec::parse("dirichlet:n=10,k=3,alpha=0.5,indeg=3,seed=23"));
  EnumerateOptions serial;
  serial.threads = 1;
  EnumerateOptions parallel;
  parallel.threads = 8;
  const MassProfile a = enumerate_profile(net, HistogramSpec{}, serial);
  const MassProfile b = enumerate_profile(net, HistogramSpec{}, parallel);
  CHECK(a.total_mass == b.total_mass);
  CHECK(a.sorted_log_probs == b.sorted_log_probs);
  CHECK(a.lnp_mean == b.lnp_mean);
  CHECK(a.lnp_variance == b.lnp_variance);
  REQUIRE(a.coverage.size() == b.coverage.size());
  for (std::size_t i = 0; i < a.coverage.size(); ++i) {
    CHECK(a.coverage[i].cumulative_mass == b.coverage[i].cumulative_mass);
  }
  REQUIRE(a.histogram.bins.size() == b.histogram.bins.size());
  for (std::size_t i = 0; i < a.histogram.bins.size(); ++i) {
    CHECK(a.histogram.bins[i].mass == b.histogram.bins[i].mass);
  }
}

TEST_CASE("conservation across the generator corpus") {
  for (const auto& entry : corpus(555, 9)) {
    const MassProfile profile = enumerate_profile(entry.network, HistogramSpec{});
    CHECK(std::abs(profile.total_mass - 1.0) <= 1e-9);
  }
}
