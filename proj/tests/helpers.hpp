#ifndef JOINTPROF_TESTS_HELPERS_HPP
#define JOINTPROF_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "jointprof/model_gen.hpp"
#include "jointprof/network.hpp"

namespace jointprof::testing {

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool close_abs(double a, double b, double abs_tol) {
  return std::abs(a - b) <= abs_tol;
}

// A parentless variable from a probability row.
inline Variable make_var(const std::string& name, std::vector<double> probs) {
  Variable v;
  v.name = name;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    v.outcomes.push_back(name + "_" + std::to_string(i));
  }
  v.cpt = std::move(probs);
  return v;
}

inline Network coin_pair() {
  return Network::build("coins", {make_var("a", {0.5, 0.5}), make_var("b", {0.5, 0.5})});
}

// n independent binary variables, all with distribution (q, 1-q).
inline Network iid_binary(std::size_t n, double q) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < n; ++i) {
    vars.push_back(make_var("x" + std::to_string(i), {q, 1.0 - q}));
  }
  return Network::build("iid_binary", std::move(vars));
}

inline Network figure2_model() { return iid_binary(10, 0.1); }

// A 3-variable chain with a deterministic (0/1) middle CPT column.
inline Network deterministic_chain() {
  Variable a = make_var("a", {0.3, 0.7});
  Variable b;
  b.name = "b";
  b.outcomes = {"b_0", "b_1"};
  b.parents = {0};
  b.cpt = {1.0, 0.0, 0.25, 0.75};  // column per parent outcome
  Variable c = make_var("c", {0.6, 0.4});
  return Network::build("det_chain", {std::move(a), std::move(b), std::move(c)});
}

// Relabels the outcomes of variable `var` by `perm` (new label index
// perm[o] carries old outcome o), fixing up its CPT rows and the columns of
// every child. The state-probability multiset is untouched.
inline Network permute_outcomes(const Network& net, std::size_t var,
                                const std::vector<std::uint32_t>& perm) {
  std::vector<Variable> vars(net.variables().begin(), net.variables().end());
  Variable& v = vars[var];
  const std::uint32_t k = v.outcome_count();
  Variable relabeled = v;
  for (std::uint32_t o = 0; o < k; ++o) {
    relabeled.outcomes[perm[o]] = v.outcomes[o];
  }
  for (std::uint64_t c = 0; c < v.config_count(); ++c) {
    for (std::uint32_t o = 0; o < k; ++o) {
      relabeled.cpt[c * k + perm[o]] = v.cpt[c * k + o];
    }
  }
  vars[var] = std::move(relabeled);

  for (std::size_t child = var + 1; child < vars.size(); ++child) {
    Variable& cv = vars[child];
    const auto it = std::find(cv.parents.begin(), cv.parents.end(),
                              static_cast<std::uint32_t>(var));
    if (it == cv.parents.end()) continue;
    const std::size_t parent_pos = static_cast<std::size_t>(it - cv.parents.begin());

    std::vector<std::uint64_t> pstrides(cv.parents.size(), 1);
    std::uint64_t configs = 1;
    for (std::size_t j = cv.parents.size(); j-- > 0;) {
      pstrides[j] = configs;
      configs *= vars[cv.parents[j]].outcome_count();
    }
    const std::uint32_t ck = cv.outcome_count();
    std::vector<double> new_cpt(cv.cpt.size());
    for (std::uint64_t c = 0; c < configs; ++c) {
      const std::uint64_t digit = (c / pstrides[parent_pos]) % k;
      const std::uint64_t rebased = c - digit * pstrides[parent_pos] +
                                    perm[digit] * pstrides[parent_pos];
      for (std::uint32_t o = 0; o < ck; ++o) {
        new_cpt[rebased * ck + o] = cv.cpt[c * ck + o];
      }
    }
    cv.cpt = std::move(new_cpt);
  }
  return Network::build(net.name() + ":relabeled", std::move(vars));
}

// Reorders variables by `order` (new position i holds old variable
// order[i]); order must keep parents before children.
inline Network reorder_variables(const Network& net, const std::vector<std::uint32_t>& order) {
  std::vector<std::uint32_t> position(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = static_cast<std::uint32_t>(i);
  std::vector<Variable> vars;
  vars.reserve(order.size());
  for (const std::uint32_t old : order) {
    Variable v = net.variable(old);
    for (std::uint32_t& p : v.parents) p = position[p];
    vars.push_back(std::move(v));
  }
  return Network::build(net.name() + ":reordered", std::move(vars));
}

}  // namespace jointprof::testing

#endif  // JOINTPROF_TESTS_HELPERS_HPP
