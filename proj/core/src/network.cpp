#include "jointprof/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace jointprof {

namespace {

bool mul_overflows(std::uint64_t a, std::uint64_t b, std::uint64_t* out) {
  return __builtin_mul_overflow(a, b, out);
}

}  // namespace

namespace {

// Sum in ascending value order: permutation-invariant, so permuted columns
// canonicalize to exact permutations of each other, and numerically stable.
double ordered_sum(std::span<const double> column, std::size_t skip) {
  std::vector<double> vals;
  vals.reserve(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (i != skip) vals.push_back(column[i]);
  }
  std::sort(vals.begin(), vals.end());
  double sum = 0.0;
  for (const double v : vals) sum += v;
  return sum;
}

}  // namespace

void canonicalize_column(std::span<double> column, double tol) {
  constexpr auto kNoSkip = static_cast<std::size_t>(-1);
  const double sum = ordered_sum(column, kNoSkip);
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "column sums to " << sum << ", outside tolerance " << tol;
    throw ValidationError(os.str());
  }
  if (sum == 1.0) return;

  for (double& q : column) q /= sum;  // q <= sum of the column, so q/sum <= 1

  // Reassign the largest entry so the ascending-order sum lands on 1.0
  // exactly; reloading then finds sum == 1.0 and changes nothing.
  std::size_t largest = 0;
  for (std::size_t i = 1; i < column.size(); ++i) {
    if (column[i] > column[largest]) largest = i;
  }
  const double rest = ordered_sum(column, largest);
  double x = 1.0 - rest;
  bool exact = false;
  for (int guard = 0; guard < 256 && x >= 0.0 && x <= 1.0; ++guard) {
    column[largest] = x;
    const double total = ordered_sum(column, kNoSkip);
    if (total == 1.0) {
      exact = true;
      break;
    }
    x = std::nextafter(x, total > 1.0 ? 0.0 : 2.0);
  }
  if (!exact) {
    throw ValidationError("column cannot be renormalized to an exact unit sum");
  }
}

Network Network::build(std::string name, std::vector<Variable> variables) {
  Network net;
  net.name_ = std::move(name);
  net.vars_ = std::move(variables);

  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < net.vars_.size(); ++i) {
    Variable& v = net.vars_[i];
    if (v.name.empty()) {
      throw ValidationError("variable " + std::to_string(i) + " has an empty name");
    }
    if (!seen.insert(v.name).second) {
      throw ValidationError("duplicate variable name '" + v.name + "'");
    }
    if (v.outcomes.size() < 2) {
      throw ValidationError("variable '" + v.name + "' needs at least 2 outcomes");
    }
    std::uint64_t configs = 1;
    for (std::uint32_t p : v.parents) {
      if (p >= i) {
        throw ValidationError("variable '" + v.name +
                              "' lists a parent that does not precede it (index " +
                              std::to_string(p) + ")");
      }
      if (mul_overflows(configs, net.vars_[p].outcome_count(), &configs)) {
        throw ValidationError("parent configuration count of '" + v.name +
                              "' overflows 64 bits");
      }
    }
    const std::uint64_t k = v.outcome_count();
    std::uint64_t expected = 0;
    if (mul_overflows(configs, k, &expected) || expected != v.cpt.size()) {
      throw ValidationError("variable '" + v.name + "' has a CPT of " +
                            std::to_string(v.cpt.size()) + " entries, expected " +
                            std::to_string(configs) + " columns x " + std::to_string(k));
    }
    for (double q : v.cpt) {
      if (!(q >= 0.0 && q <= 1.0)) {
        throw ValidationError("variable '" + v.name +
                              "' has a CPT entry outside [0, 1]");
      }
    }
    for (std::uint64_t c = 0; c < configs; ++c) {
      try {
        canonicalize_column(std::span<double>(v.cpt.data() + c * k, k));
      } catch (const ValidationError& e) {
        throw ValidationError("variable '" + v.name + "', column " + std::to_string(c) +
                              ": " + e.what());
      }
    }
  }

  // State-index strides, last variable fastest; overflow is an error,
  // never a silent wraparound.
  const std::size_t n = net.vars_.size();
  net.strides_.assign(n, 1);
  std::uint64_t count = 1;
  for (std::size_t i = n; i-- > 0;) {
    net.strides_[i] = count;
    if (mul_overflows(count, net.vars_[i].outcome_count(), &count)) {
      throw ValidationError("state count overflows 64 bits at variable '" +
                            net.vars_[i].name + "'");
    }
  }
  net.state_count_ = count;

  net.parent_strides_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& parents = net.vars_[i].parents;
    auto& ps = net.parent_strides_[i];
    ps.assign(parents.size(), 1);
    std::uint64_t stride = 1;
    for (std::size_t j = parents.size(); j-- > 0;) {
      ps[j] = stride;
      stride *= net.vars_[parents[j]].outcome_count();
    }
  }
  return net;
}

std::uint64_t Network::parent_config(std::size_t i, std::span<const std::uint32_t> a) const {
  const auto& parents = vars_[i].parents;
  const auto& ps = parent_strides_[i];
  std::uint64_t config = 0;
  for (std::size_t j = 0; j < parents.size(); ++j) {
    config += ps[j] * a[parents[j]];
  }
  return config;
}

int Network::index_of(const std::string& variable_name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == variable_name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

void check_assignment(const Network& net, std::span<const std::uint32_t> a) {
  if (a.size() != net.variable_count()) {
    throw ValidationError("assignment has " + std::to_string(a.size()) +
                          " outcomes for a network of " +
                          std::to_string(net.variable_count()) + " variables");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] >= net.variable(i).outcome_count()) {
      throw ValidationError("outcome index " + std::to_string(a[i]) +
                            " out of range for variable '" + net.variable(i).name + "'");
    }
  }
}

}  // namespace

double state_log_prob(const Network& net, std::span<const std::uint32_t> a) {
  check_assignment(net, a);
  double sum = 0.0;
  for (std::size_t i = 0; i < net.variable_count(); ++i) {
    const double q = net.factor(i, a);
    if (q == 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(q);
  }
  return sum;
}

double state_prob(const Network& net, std::span<const std::uint32_t> a) {
  check_assignment(net, a);
  double prod = 1.0;
  for (std::size_t i = 0; i < net.variable_count(); ++i) {
    prod *= net.factor(i, a);
  }
  return prod;
}

Assignment index_to_assignment(const Network& net, StateIndex idx) {
  if (idx >= net.state_count()) {
    throw ValidationError("state index " + std::to_string(idx) +
                          " out of range (state count " +
                          std::to_string(net.state_count()) + ")");
  }
  Assignment a(net.variable_count());
  for (std::size_t i = 0; i < net.variable_count(); ++i) {
    const std::uint64_t stride = net.strides()[i];
    a[i] = static_cast<std::uint32_t>(idx / stride);
    idx %= stride;
  }
  return a;
}

StateIndex assignment_to_index(const Network& net, std::span<const std::uint32_t> a) {
  check_assignment(net, a);
  StateIndex idx = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    idx += net.strides()[i] * a[i];
  }
  return idx;
}

Network subnetwork(const Network& net, std::span<const std::string> names) {
  std::vector<std::uint32_t> keep;
  keep.reserve(names.size());
  std::unordered_set<std::string> requested;
  for (const auto& nm : names) {
    const int idx = net.index_of(nm);
    if (idx < 0) {
      throw ValidationError("subnetwork: no variable named '" + nm + "'");
    }
    if (!requested.insert(nm).second) {
      throw ValidationError("subnetwork: variable '" + nm + "' listed twice");
    }
    keep.push_back(static_cast<std::uint32_t>(idx));
  }
  std::sort(keep.begin(), keep.end());

  std::vector<int> remap(net.variable_count(), -1);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    remap[keep[j]] = static_cast<int>(j);
  }

  std::vector<Variable> vars;
  vars.reserve(keep.size());
  for (std::uint32_t old : keep) {
    Variable v = net.variable(old);
    for (std::uint32_t& p : v.parents) {
      if (remap[p] < 0) {
        throw ValidationError("subnetwork: variable '" + v.name + "' needs parent '" +
                              net.variable(p).name + "', which is not in the subset");
      }
      p = static_cast<std::uint32_t>(remap[p]);
    }
    vars.push_back(std::move(v));
  }
  return Network::build(net.name() + ":subset", std::move(vars));
}

}  // namespace jointprof
