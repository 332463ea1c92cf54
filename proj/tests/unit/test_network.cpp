#include <cmath>
#include <limits>
#include <map>

#include <doctest.h>

#include "helpers.hpp"
#include "jointprof/summation.hpp"

using namespace jointprof;
using namespace jointprof::testing;

TEST_CASE("state probabilities of independent coins") {
  const Network net = coin_pair();
  CHECK(net.state_count() == 4);
  for (StateIndex i = 0; i < 4; ++i) {
    const Assignment a = index_to_assignment(net, i);
    CHECK(state_log_prob(net, a) == doctest::Approx(std::log(0.25)).epsilon(1e-15));
    CHECK(state_prob(net, a) == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("product evaluation on ten 0.9 variables") {
  const Network net = iid_binary(10, 0.9);
  const Assignment all_first(10, 0);  // outcome 0 carries probability 0.9
  CHECK(state_log_prob(net, all_first) ==
        doctest::Approx(-1.053605156578263).epsilon(1e-12));
  CHECK(state_prob(net, all_first) == doctest::Approx(0.34867844010).epsilon(1e-12));
}

TEST_CASE("zero factor annihilates the product") {
  const Network net = deterministic_chain();
  // parent a=0 forces b=0; the state (0, 1, anything) has a zero factor
  const Assignment a = {0, 1, 0};
  CHECK(state_log_prob(net, a) == -std::numeric_limits<double>::infinity());
  CHECK(state_prob(net, a) == 0.0);
}

TEST_CASE("index/assignment bijection") {
  const Network net = coin_pair();
  CHECK(index_to_assignment(net, 0) == Assignment{0, 0});
  CHECK(index_to_assignment(net, 3) == Assignment{1, 1});
  CHECK_THROWS_AS(index_to_assignment(net, 4), ValidationError);

  for (const auto& entry : corpus(7, 6)) {
    const Network& n = entry.network;
    if (n.state_count() > (1u << 12)) continue;
    for (StateIndex i = 0; i < n.state_count(); ++i) {
      const Assignment a = index_to_assignment(n, i);
      CHECK(assignment_to_index(n, a) == i);
    }
  }
}

TEST_CASE("probabilities over all assignments sum to one") {
  // direct index loop, independent of the enumeration module
  for (const auto& entry : corpus(21, 6)) {
    const Network& net = entry.network;
    if (net.state_count() > (1u << 12)) continue;
    Accumulator sum;
    for (StateIndex i = 0; i < net.state_count(); ++i) {
      sum.add(state_prob(net, index_to_assignment(net, i)));
    }
    CHECK(std::abs(sum.value() - 1.0) <= 1e-9);
  }
}

TEST_CASE("outcome relabeling preserves the log-probability multiset") {
  const GenSpec spec = GenSpec::parse("dirichlet:n=5,k=3,alpha=1,indeg=2,seed=11");
  const Network net = generate(spec);
  const Network relabeled = permute_outcomes(net, 1, {2, 0, 1});
  REQUIRE(relabeled.state_count() == net.state_count());

  std::vector<double> a, b;
  for (StateIndex i = 0; i < net.state_count(); ++i) {
    a.push_back(state_log_prob(net, index_to_assignment(net, i)));
    b.push_back(state_log_prob(relabeled, index_to_assignment(relabeled, i)));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("assignment validation") {
  const Network net = coin_pair();
  const Assignment wrong_size = {0};
  CHECK_THROWS_AS(state_log_prob(net, wrong_size), ValidationError);
  const Assignment out_of_range = {0, 2};
  CHECK_THROWS_AS(state_log_prob(net, out_of_range), ValidationError);
}

TEST_CASE("CPT column validation and exact renormalization") {
  CHECK_THROWS_AS(Network::build("bad", {make_var("x", {0.4, 0.4})}), ValidationError);
  CHECK_THROWS_AS(Network::build("bad", {make_var("x", {-0.1, 1.1})}), ValidationError);

  // within 1e-12: renormalized so the ascending-order sum is exactly 1,
  // and a rebuild leaves every bit alone
  const double third = 1.0 / 3.0;
  const Network net = Network::build("t", {make_var("x", {third, third, third})});
  const std::vector<double> cpt = net.variable(0).cpt;
  double check = 0.0;
  std::vector<double> sorted = cpt;
  std::sort(sorted.begin(), sorted.end());
  for (const double q : sorted) check += q;
  CHECK(check == 1.0);

  Variable again = net.variable(0);
  const Network net2 = Network::build("t2", {again});
  CHECK(net2.variable(0).cpt == cpt);
}

TEST_CASE("state count overflow is a reported error") {
  std::vector<Variable> vars;
  for (int i = 0; i < 41; ++i) {
    vars.push_back(make_var("x" + std::to_string(i), {0.25, 0.25, 0.5}));
  }
  CHECK_THROWS_AS(Network::build("huge", std::move(vars)), ValidationError);
}

TEST_CASE("subnetwork keeps parent closure") {
  const Network net = deterministic_chain();
  const std::vector<std::string> good = {"a", "b"};
  const Network sub = subnetwork(net, good);
  CHECK(sub.variable_count() == 2);
  CHECK(sub.state_count() == 4);

  const std::vector<std::string> orphan = {"b"};
  CHECK_THROWS_AS(subnetwork(net, orphan), ValidationError);
  const std::vector<std::string> unknown = {"zz"};
  CHECK_THROWS_AS(subnetwork(net, unknown), ValidationError);
}
