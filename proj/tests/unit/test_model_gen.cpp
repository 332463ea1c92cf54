#include <algorithm>

#include <doctest.h>

#include "helpers.hpp"
#include "jointprof/moments.hpp"
#include "jointprof/net_format.hpp"

using namespace jointprof;
using namespace jointprof::testing;

TEST_CASE("equal seeds give bit-identical networks") {
  const GenSpec spec = GenSpec::parse("dirichlet:n=6,k=3,alpha=0.5,indeg=2,seed=77");
  CHECK(write_native(generate(spec)) == write_native(generate(spec)));

  const auto c1 = corpus(404, 5);
  const auto c2 = corpus(404, 5);
  REQUIRE(c1.size() == c2.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(write_native(c1[i].network) == write_native(c2[i].network));
  }
}

TEST_CASE("identical family: every column is an exact permutation of the base") {
  const GenSpec spec = GenSpec::parse("identical:n=6,k=3,p=0.2,0.3,0.5,indeg=3,seed=9");
  const Network net = generate(spec);
  std::vector<double> base = {0.2, 0.3, 0.5};
  std::sort(base.begin(), base.end());
  for (const Variable& v : net.variables()) {
    const std::uint32_t k = v.outcome_count();
    for (std::uint64_t c = 0; c < v.config_count(); ++c) {
      std::vector<double> column(v.cpt.begin() + c * k, v.cpt.begin() + (c + 1) * k);
      std::sort(column.begin(), column.end());
      CHECK(column == base);  // exact doubles, not approximate
    }
  }
  // consequence: every variable has the same cell moments
  const LogMoments first = variable_log_moments(net, 0);
  for (std::size_t i = 1; i < net.variable_count(); ++i) {
    const LogMoments m = variable_log_moments(net, i);
    CHECK(close_rel(m.mu, first.mu, 1e-12));
    CHECK(close_rel(m.sigma2, first.sigma2, 1e-12));
  }
}

TEST_CASE("figure-model specs reproduce the closed-form moments") {
  const Network fig2 = generate(GenSpec::parse("identical:n=10,k=2,p=0.1,0.9,seed=1"));
  const NormalModel nm2 = theoretical_normal(fig2);
  CHECK(close_rel(nm2.xi, -12.03972804325936, 1e-12));
  CHECK(close_rel(nm2.phi2, 12.06948960812582, 1e-12));

  const Network fig3 = generate(GenSpec::parse("identical:n=10,k=2,p=0.3,0.7,seed=1"));
  const NormalModel nm3 = theoretical_normal(fig3);
  CHECK(close_rel(nm3.xi, -7.8032387413233419, 1e-12));
  CHECK(close_rel(nm3.phi2, 1.794784160541833, 1e-12));
}

TEST_CASE("identically distributed family respects its intervals") {
  const GenSpec spec =
      GenSpec::parse("identically_distributed:n=10,k=2,iv=0:0.1,0.9:1.0,seed=4");
  const Network net = generate(spec);
  for (const Variable& v : net.variables()) {
    for (std::uint64_t c = 0; c < v.config_count(); ++c) {
      const double q = v.cpt[c * 2];
      const double r = v.cpt[c * 2 + 1];
      CHECK(q >= -1e-12);
      CHECK(q <= 0.1 + 1e-12);
      CHECK(r >= 0.9 - 1e-12);
      CHECK(r <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("three-outcome interval recipe: remainder lands in the last interval") {
  const GenSpec spec = GenSpec::parse(
      "identically_distributed:n=4,k=3,iv=0.1:0.2,0.2:0.3,0.5:0.7,seed=12");
  const Network net = generate(spec);
  for (const Variable& v : net.variables()) {
    for (std::uint64_t c = 0; c < v.config_count(); ++c) {
      CHECK(v.cpt[c * 3 + 2] >= 0.5 - 1e-9);
      CHECK(v.cpt[c * 3 + 2] <= 0.7 + 1e-9);
    }
  }
}

TEST_CASE("infeasible intervals are rejected") {
  // remainder of a draw from [0, 0.1] lies in [0.9, 1.0], never in [0.5, 0.6]
  const GenSpec spec =
      GenSpec::parse("identically_distributed:n=2,k=2,iv=0:0.1,0.5:0.6,seed=3");
  CHECK_THROWS_AS(generate(spec), ValidationError);
}

TEST_CASE("dirichlet family: positive columns, exact unit sums") {
  const GenSpec spec = GenSpec::parse("dirichlet:n=5,k=4,alpha=0.5,indeg=2,seed=31");
  const Network net = generate(spec);
  for (const Variable& v : net.variables()) {
    const std::uint32_t k = v.outcome_count();
    for (std::uint64_t c = 0; c < v.config_count(); ++c) {
      std::vector<double> column(v.cpt.begin() + c * k, v.cpt.begin() + (c + 1) * k);
      std::sort(column.begin(), column.end());
      double sum = 0.0;
      for (const double q : column) {
        CHECK(q > 0.0);
        sum += q;
      }
      CHECK(sum == 1.0);
    }
  }
}

TEST_CASE("random structure honors the in-degree bound and ordering") {
  const GenSpec spec = GenSpec::parse("dirichlet:n=12,k=2,alpha=1,indeg=3,seed=8");
  const Network net = generate(spec);
  for (std::size_t i = 0; i < net.variable_count(); ++i) {
    const Variable& v = net.variable(i);
    CHECK(v.parents.size() <= 3);
    for (const std::uint32_t p : v.parents) CHECK(p < i);
  }
}

TEST_CASE("spec strings round-trip") {
  for (const char* text :
       {"identical:n=10,k=2,p=0.1,0.9,seed=1",
        "identically_distributed:n=10,k=2,iv=0:0.1,0.9:1,seed=2",
        "dirichlet:n=5,k=3,alpha=0.5,indeg=2,seed=3"}) {
    const GenSpec spec = GenSpec::parse(text);
    const GenSpec again = GenSpec::parse(spec.to_string());
    CHECK(again.to_string() == spec.to_string());
    CHECK(write_native(generate(spec)) == write_native(generate(again)));
  }
  CHECK_THROWS_AS(GenSpec::parse("mystery:n=2"), ValidationError);
  CHECK_THROWS_AS(GenSpec::parse("identical:n=2,k=2,p=0.4,0.4"), ValidationError);
  CHECK_THROWS_AS(GenSpec::parse("identical"), ValidationError);
}

TEST_CASE("corpus networks are valid and within the enumerable range") {
  const auto entries = corpus(1234, 12);
  CHECK(entries.size() == 12);
  bool saw_parents = false;
  for (const auto& entry : entries) {
    const Network& net = entry.network;
    CHECK(net.variable_count() >= 2);
    CHECK(net.variable_count() <= 12);
    CHECK(net.state_count() <= (std::uint64_t{1} << 22));
    for (const Variable& v : net.variables()) {
      CHECK(v.outcome_count() >= 2);
      CHECK(v.outcome_count() <= 4);
      saw_parents |= !v.parents.empty();
    }
  }
  CHECK(saw_parents);
}
