#include "jointprof/topk_search.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "jointprof/summation.hpp"

namespace jointprof {

StopRule StopRule::max_states(std::uint64_t k) {
  StopRule r;
  r.kind = Kind::kMaxStates;
  r.k = k;
  if (k == 0) throw ValidationError("max_states rule needs k >= 1");
  return r;
}

StopRule StopRule::residual_mass(double epsilon) {
  StopRule r;
  r.kind = Kind::kResidualMass;
  r.value = epsilon;
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("residual_mass rule needs epsilon in (0, 1)");
  }
  return r;
}

StopRule StopRule::probability_floor(double t) {
  StopRule r;
  r.kind = Kind::kProbabilityFloor;
  r.value = t;
  if (!(t > 0.0 && t < 1.0)) {
    throw ValidationError("probability_floor rule needs t in (0, 1)");
  }
  return r;
}

std::string StopRule::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kMaxStates:
      os << "k=" << k;
      break;
    case Kind::kResidualMass:
      os << "epsilon=" << value;
      break;
    case Kind::kProbabilityFloor:
      os << "floor=" << value;
      break;
  }
  return os.str();
}

namespace {

struct Node {
  double lnp;               // exact prefix log probability
  StateIndex min_index;     // index of the prefix completed with all-0 outcomes
  std::uint32_t parent;     // arena id of the parent node
  std::uint32_t outcome;    // outcome taken at depth-1 (unused for the root)
  std::uint32_t depth;      // number of assigned search positions
};

struct FrontierEntry {
  double bound;
  StateIndex min_index;
  std::uint32_t node;
};

// Max-bound first; ties by min completion index, then insertion order.
struct FrontierOrder {
  bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.min_index != b.min_index) return a.min_index > b.min_index;
    return a.node > b.node;
  }
};

// Greedy topological order picking the largest max-CPT-entry variable among
// those whose parents are already placed.
std::vector<std::uint32_t> search_order(const Network& net, bool reorder) {
  const std::size_t n = net.variable_count();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (!reorder) return order;

  std::vector<double> max_entry(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    max_entry[i] = *std::max_element(net.variable(i).cpt.begin(), net.variable(i).cpt.end());
  }
  std::vector<bool> placed(n, false);
  for (std::size_t slot = 0; slot < n; ++slot) {
    int best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const auto& parents = net.variable(i).parents;
      const bool ready = std::all_of(parents.begin(), parents.end(),
                                     [&](std::uint32_t p) { return placed[p]; });
      if (!ready) continue;
      if (best < 0 || max_entry[i] > max_entry[static_cast<std::size_t>(best)]) {
        best = static_cast<int>(i);
      }
    }
    order[slot] = static_cast<std::uint32_t>(best);
    placed[static_cast<std::size_t>(best)] = true;
  }
  return order;
}

}  // namespace

SearchResult search_top_states(const Network& net, const StopRule& rule,
                               const SearchOptions& options) {
  const std::size_t n = net.variable_count();
  const auto order = search_order(net, options.reorder_by_max_entry);

  // Admissible optimistic bound: per-position max log entry, summed over the
  // unassigned suffix. The slack absorbs reassociation rounding so the bound
  // can never drop below any completion's exactly-accumulated ln p.
  std::vector<double> max_log(n, 0.0);
  double abs_log_total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const Variable& v = net.variable(order[s]);
    double max_q = 0.0;
    double min_q = 1.0;
    for (const double q : v.cpt) {
      max_q = std::max(max_q, q);
      if (q > 0.0) min_q = std::min(min_q, q);
    }
    max_log[s] = std::log(max_q);  // max_q > 0: every column sums to 1
    abs_log_total += std::abs(std::log(min_q));
  }
  std::vector<double> suffix_bound(n + 1, 0.0);
  for (std::size_t s = n; s-- > 0;) {
    suffix_bound[s] = suffix_bound[s + 1] + max_log[s];
  }
  const double slack =
      4.0 * static_cast<double>(n + 2) * DBL_EPSILON * (abs_log_total + 1.0);

  std::vector<Node> arena;
  arena.push_back(Node{0.0, 0, 0, 0, 0});
  std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, FrontierOrder> frontier;
  frontier.push(FrontierEntry{suffix_bound[0] + slack, 0, 0});

  SearchResult result;
  Accumulator mass;
  Assignment prefix(n, 0);

  const auto done_after_emit = [&]() {
    switch (rule.kind) {
      case StopRule::Kind::kMaxStates:
        return result.states.size() >= rule.k;
      case StopRule::Kind::kResidualMass:
        return 1.0 - mass.value() <= rule.value;
      case StopRule::Kind::kProbabilityFloor:
        return false;  // handled before emitting
    }
    return false;
  };

  bool done = false;
  while (!done && !frontier.empty()) {
    const FrontierEntry top = frontier.top();
    frontier.pop();
    const Node node = arena[top.node];

    if (node.depth == n) {
      const double p = std::exp(node.lnp);
      if (rule.kind == StopRule::Kind::kProbabilityFloor && p < rule.value) break;
      TopState st;
      st.index = node.min_index;
      st.log_prob = node.lnp;
      st.prob = p;
      st.assignment = index_to_assignment(net, node.min_index);
      result.states.push_back(std::move(st));
      mass.add(p);
      done = done_after_emit();
      continue;
    }

    if (result.nodes_expanded >= options.node_cap) {
      result.truncated = true;
      break;
    }
    ++result.nodes_expanded;

    // Recover the assigned outcomes along the parent chain.
    for (std::uint32_t id = top.node; arena[id].depth > 0; id = arena[id].parent) {
      prefix[order[arena[id].depth - 1]] = arena[id].outcome;
    }

    const std::uint32_t var = order[node.depth];
    const Variable& v = net.variable(var);
    const std::uint64_t config = net.parent_config(var, prefix);
    const double* column = v.cpt.data() + config * v.outcome_count();
    const std::uint64_t stride = net.strides()[var];
    for (std::uint32_t o = 0; o < v.outcome_count(); ++o) {
      const double q = column[o];
      if (q == 0.0) continue;  // zero-probability subtree, never emitted
      Node child;
      child.lnp = node.lnp + std::log(q);
      child.min_index = node.min_index + o * stride;
      child.parent = top.node;
      child.outcome = o;
      child.depth = node.depth + 1;
      const double bound = (child.depth == n)
                               ? child.lnp
                               : child.lnp + suffix_bound[child.depth] + slack;
      arena.push_back(child);
      frontier.push(
          FrontierEntry{bound, child.min_index, static_cast<std::uint32_t>(arena.size() - 1)});
    }
  }

  // A drained frontier without truncation means every positive state was
  // emitted; that satisfies any rule.
  result.accounted_mass = mass.value();
  result.residual_bound = std::max(0.0, 1.0 - result.accounted_mass);
  return result;
}

VerifyReport verify_against_enumeration(const Network& net, const StopRule& rule,
                                        const SearchOptions& options,
                                        const EnumerateOptions& enum_options) {
  VerifyReport report;
  const auto fail = [&](const std::string& msg) {
    report.pass = false;
    report.failures.push_back(msg);
  };

  const SearchResult got = search_top_states(net, rule, options);
  if (got.truncated) {
    fail("search hit its node cap; raise it to verify this rule");
    return report;
  }

  // Exact ranking of every positive state, same per-state arithmetic path.
  const std::vector<TopState> all = top_k_exact(net, net.state_count(), enum_options);

  // Expected stop point under the rule.
  std::size_t expected = 0;
  Accumulator cum;
  switch (rule.kind) {
    case StopRule::Kind::kMaxStates:
      expected = static_cast<std::size_t>(std::min<std::uint64_t>(rule.k, all.size()));
      break;
    case StopRule::Kind::kResidualMass:
      while (expected < all.size()) {
        cum.add(all[expected].prob);
        ++expected;
        if (1.0 - cum.value() <= rule.value) break;
      }
      break;
    case StopRule::Kind::kProbabilityFloor:
      while (expected < all.size() && all[expected].prob >= rule.value) ++expected;
      break;
  }

  if (got.states.size() != expected) {
    fail("emitted " + std::to_string(got.states.size()) + " states, oracle expects " +
         std::to_string(expected));
  }

  const std::size_t common = std::min(got.states.size(), expected);
  for (std::size_t i = 0; i < common; ++i) {
    if (got.states[i].index != all[i].index) {
      fail("rank " + std::to_string(i + 1) + ": search index " +
           std::to_string(got.states[i].index) + " != exact index " +
           std::to_string(all[i].index));
      break;
    }
    if (got.states[i].log_prob != all[i].log_prob) {
      fail("rank " + std::to_string(i + 1) + ": log-prob mismatch");
      break;
    }
  }

  for (std::size_t i = 1; i < got.states.size(); ++i) {
    const auto& a = got.states[i - 1];
    const auto& b = got.states[i];
    if (b.log_prob > a.log_prob ||
        (b.log_prob == a.log_prob && b.index < a.index)) {
      fail("emission order violated at rank " + std::to_string(i + 1));
      break;
    }
  }

  Accumulator exact_mass;
  for (std::size_t i = 0; i < common; ++i) exact_mass.add(all[i].prob);
  if (std::abs(got.accounted_mass - exact_mass.value()) > 1e-12) {
    fail("accounted mass differs from exact cumulative mass by more than 1e-12");
  }
  if (rule.kind == StopRule::Kind::kResidualMass && !got.truncated &&
      got.residual_bound > rule.value && got.states.size() < all.size()) {
    fail("residual bound above epsilon at stop");
  }
  return report;
}

}  // namespace jointprof
