#ifndef JOINTPROF_NETWORK_HPP
#define JOINTPROF_NETWORK_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jointprof/errors.hpp"

namespace jointprof {

using StateIndex = std::uint64_t;

// One outcome index per variable, aligned with network order.
using Assignment = std::vector<std::uint32_t>;

// A discrete variable with a dense CPT. Columns are indexed by parent
// configuration; column j holds the probability vector over this variable's
// outcomes given parent configuration j. The configuration index is
// mixed-radix over the parent outcomes in `parents` order, last parent
// varying fastest.
struct Variable {
  std::string name;
  std::vector<std::string> outcomes;    // labels; k = outcomes.size() >= 2
  std::vector<std::uint32_t> parents;   // indices of earlier variables
  std::vector<double> cpt;              // cpt[config * k + outcome]
  std::vector<std::string> properties;  // opaque annotations (e.g. BIF property strings)

  std::uint32_t outcome_count() const { return static_cast<std::uint32_t>(outcomes.size()); }
  std::uint64_t config_count() const {
    return outcomes.empty() ? 0 : cpt.size() / outcomes.size();
  }
};

// A factored model over topologically ordered variables: every parent index
// is smaller than the index of the variable that lists it, which is also
// the acyclicity proof. Immutable after construction; all member functions
// are const and safe for unrestricted concurrent use.
class Network {
 public:
  // Validates structure and CPTs, renormalizes columns within 1e-12 of 1
  // (see canonicalize_column), and precomputes index strides.
  // Throws ValidationError on any violated invariant, including state-count
  // overflow past 2^64 - 1.
  static Network build(std::string name, std::vector<Variable> variables);

  const std::string& name() const { return name_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(std::size_t i) const { return vars_[i]; }
  std::size_t variable_count() const { return vars_.size(); }
  StateIndex state_count() const { return state_count_; }

  // Strides of the mixed-radix state index (last variable fastest).
  const std::vector<std::uint64_t>& strides() const { return strides_; }

  // Parent-configuration index of variable i under assignment a.
  std::uint64_t parent_config(std::size_t i, std::span<const std::uint32_t> a) const;

  // The CPT entry p_i of variable i's outcome under assignment a.
  double factor(std::size_t i, std::span<const std::uint32_t> a) const {
    const Variable& v = vars_[i];
    return v.cpt[parent_config(i, a) * v.outcome_count() + a[i]];
  }

  int index_of(const std::string& variable_name) const;  // -1 if absent

 private:
  Network() = default;

  std::string name_;
  std::vector<Variable> vars_;
  std::vector<std::uint64_t> strides_;
  std::vector<std::vector<std::uint64_t>> parent_strides_;
  StateIndex state_count_ = 0;
};

// Sum of ln p_i over all variables; -infinity iff some factor is 0.
// Throws ValidationError if the assignment does not fit the network.
double state_log_prob(const Network& net, std::span<const std::uint32_t> a);

// exp(state_log_prob); exact product when all factors are positive.
double state_prob(const Network& net, std::span<const std::uint32_t> a);

// Mixed-radix bijection between state indices and assignments,
// lexicographic in network variable order. Throws on out-of-range input.
Assignment index_to_assignment(const Network& net, StateIndex idx);
StateIndex assignment_to_index(const Network& net, std::span<const std::uint32_t> a);

// Restriction of `net` to the named variables, which must be closed under
// parents; relative order is preserved. Throws ValidationError otherwise.
Network subnetwork(const Network& net, std::span<const std::string> names);

// Rescales a probability column so it sums to exactly 1.0: divide by the
// sum, then push the leftover ulp onto the largest entry. Idempotent, so
// loading what we wrote never changes bits. |sum - 1| must be <= tol.
void canonicalize_column(std::span<double> column, double tol = 1e-12);

}  // namespace jointprof

#endif  // JOINTPROF_NETWORK_HPP
