#ifndef JOINTPROF_MODEL_GEN_HPP
#define JOINTPROF_MODEL_GEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jointprof/network.hpp"

namespace jointprof {

// Seeded generators for the experiment model families.
//
//   kIdentical: every CPT column is a seeded random permutation of one
//     fixed probability vector, so all columns of all variables share one
//     cell multiset.
//   kIdenticallyDistributed: each column is drawn afresh; entry j comes
//     uniformly from intervals[j] for j < k-1 and the remainder must land
//     in intervals[k-1] (redraw otherwise).
//   kDirichletRandom: each column from a symmetric Dirichlet; an extension
//     family for robustness corpora, not one of the reference setups.
enum class Family { kIdentical, kIdenticallyDistributed, kDirichletRandom };

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct GenSpec {
  Family family = Family::kIdentical;
  std::uint32_t n = 1;
  std::uint32_t k = 2;
  std::vector<double> probabilities;  // identical family: the base vector, size k
  std::vector<Interval> intervals;    // identically distributed: size k
  double concentration = 1.0;         // dirichlet family
  std::uint32_t max_in_degree = 0;    // 0 = parentless; else random parents
  std::uint64_t seed = 0;

  // Compact round-trippable form, e.g. "identical:n=10,k=2,p=0.1,0.9".
  std::string to_string() const;
  static GenSpec parse(const std::string& text);
};

// Fully deterministic in the spec (including seed).
// Throws ValidationError on infeasible specs.
Network generate(const GenSpec& spec);

struct CorpusEntry {
  GenSpec spec;
  Network network;
};

// Reproducible mixed corpus across families, n in [2,12], k in [2,4],
// in-degree in [0,3], sized to keep every member exactly enumerable.
std::vector<CorpusEntry> corpus(std::uint64_t seed, std::size_t count);

}  // namespace jointprof

#endif  // JOINTPROF_MODEL_GEN_HPP
