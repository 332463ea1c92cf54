#ifndef JOINTPROF_TOPK_SEARCH_HPP
#define JOINTPROF_TOPK_SEARCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jointprof/enumeration.hpp"
#include "jointprof/network.hpp"

namespace jointprof {

// When to stop emitting best-first states. Exactly one rule is active.
struct StopRule {
  enum class Kind {
    kMaxStates,         // emit the k most probable states
    kResidualMass,      // emit until 1 - accumulated mass <= epsilon
    kProbabilityFloor,  // emit exactly the states with p >= t
  };

  Kind kind = Kind::kMaxStates;
  std::uint64_t k = 1;
  double value = 0.0;

  static StopRule max_states(std::uint64_t k);
  static StopRule residual_mass(double epsilon);
  static StopRule probability_floor(double t);

  std::string to_string() const;
};

struct SearchOptions {
  std::uint64_t node_cap = 10'000'000;  // expansions before giving up
  // Search the tree in descending max-CPT-entry order instead of network
  // order. Emitted order is unchanged; off by default for determinism of
  // the node-expansion trace.
  bool reorder_by_max_entry = false;
};

struct SearchResult {
  std::vector<TopState> states;     // exactly descending (log_prob, index asc ties)
  double accounted_mass = 0.0;      // compensated sum of emitted probabilities
  double residual_bound = 0.0;      // max(0, 1 - accounted_mass), exact remaining mass
  std::uint64_t nodes_expanded = 0;
  bool truncated = false;           // node cap hit before the rule was satisfied
};

// Best-first enumeration of most probable states over the prefix tree,
// using the admissible bound prefix-lnp + suffix max-entry log sums.
// Zero-probability states are pruned and never emitted.
SearchResult search_top_states(const Network& net, const StopRule& rule,
                               const SearchOptions& options = {});

// Oracle harness: checks search output against exact enumeration for
// order, membership, per-state values, rule semantics and mass agreement.
struct VerifyReport {
  bool pass = true;
  std::vector<std::string> failures;
};

VerifyReport verify_against_enumeration(const Network& net, const StopRule& rule,
                                        const SearchOptions& options = {},
                                        const EnumerateOptions& enum_options = {});

}  // namespace jointprof

#endif  // JOINTPROF_TOPK_SEARCH_HPP
