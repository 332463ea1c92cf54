#include "jointprof/model_gen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "jointprof/rng.hpp"
#include "text_util.hpp"

namespace jointprof {

namespace {

std::string family_name(Family f) {
  switch (f) {
    case Family::kIdentical:
      return "identical";
    case Family::kIdenticallyDistributed:
      return "identically_distributed";
    case Family::kDirichletRandom:
      return "dirichlet";
  }
  return "?";
}

std::string fmt(double x) { return format_double(x); }

std::vector<std::uint32_t> draw_parents(Rng& rng, std::uint32_t var,
                                        std::uint32_t max_in_degree) {
  const std::uint32_t cap = std::min(var, max_in_degree);
  if (cap == 0) return {};
  const auto want = static_cast<std::uint32_t>(rng.uniform_below(cap + 1));
  std::vector<std::uint32_t> parents;
  while (parents.size() < want) {
    const auto p = static_cast<std::uint32_t>(rng.uniform_below(var));
    if (std::find(parents.begin(), parents.end(), p) == parents.end()) {
      parents.push_back(p);
    }
  }
  std::sort(parents.begin(), parents.end());
  return parents;
}

std::vector<double> identical_column(Rng& rng, const std::vector<double>& base) {
  std::vector<double> column = base;
  for (std::size_t i = column.size(); i-- > 1;) {
    const std::size_t j = rng.uniform_below(i + 1);
    std::swap(column[i], column[j]);
  }
  return column;
}

std::vector<double> interval_column(Rng& rng, const std::vector<Interval>& intervals) {
  const std::size_t k = intervals.size();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> column(k);
    double rest = 1.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      column[j] = rng.uniform(intervals[j].lo, intervals[j].hi);
      rest -= column[j];
    }
    if (rest >= intervals[k - 1].lo && rest <= intervals[k - 1].hi) {
      column[k - 1] = rest;
      return column;
    }
  }
  throw ValidationError(
      "identically_distributed intervals leave no feasible column after 1000 draws");
}

std::vector<double> dirichlet_column(Rng& rng, std::uint32_t k, double alpha) {
  std::vector<double> column(k);
  double sum = 0.0;
  for (auto& q : column) {
    q = rng.gamma(alpha);
    sum += q;
  }
  for (auto& q : column) q /= sum;
  return column;
}

}  // namespace

std::string GenSpec::to_string() const {
  std::ostringstream os;
  os << family_name(family) << ":n=" << n << ",k=" << k;
  switch (family) {
    case Family::kIdentical:
      os << ",p=";
      for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (i) os << ',';
        os << fmt(probabilities[i]);
      }
      break;
    case Family::kIdenticallyDistributed:
      os << ",iv=";
      for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (i) os << ',';
        os << fmt(intervals[i].lo) << ':' << fmt(intervals[i].hi);
      }
      break;
    case Family::kDirichletRandom:
      os << ",alpha=" << fmt(concentration);
      break;
  }
  if (max_in_degree > 0) os << ",indeg=" << max_in_degree;
  os << ",seed=" << seed;
  return os.str();
}

namespace {

double parse_num(const std::string& tok, const std::string& what) {
  double out = 0.0;
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("generator spec: bad " + what + " '" + tok + "'");
  }
  return out;
}

}  // namespace

GenSpec GenSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string fam = text.substr(0, colon);
  GenSpec spec;
  if (fam == "identical") {
    spec.family = Family::kIdentical;
  } else if (fam == "iid" || fam == "identically_distributed") {
    spec.family = Family::kIdenticallyDistributed;
  } else if (fam == "dirichlet") {
    spec.family = Family::kDirichletRandom;
  } else {
    throw ValidationError("generator spec: unknown family '" + fam +
                          "' (identical | identically_distributed | dirichlet)");
  }
  if (colon == std::string::npos) {
    throw ValidationError("generator spec: expected '<family>:key=value,...'");
  }

  // Comma-separated key=value items; bare values extend the previous
  // list-valued key, so p=0.1,0.9 parses as one list.
  std::string current_key;
  std::string rest = text.substr(colon + 1);
  std::istringstream is(rest);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    std::string value = tok;
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      current_key = tok.substr(0, eq);
      value = tok.substr(eq + 1);
    } else if (current_key != "p" && current_key != "iv") {
      throw ValidationError("generator spec: dangling value '" + tok + "'");
    }
    if (current_key == "n") {
      spec.n = static_cast<std::uint32_t>(parse_num(value, "n"));
    } else if (current_key == "k") {
      spec.k = static_cast<std::uint32_t>(parse_num(value, "k"));
    } else if (current_key == "alpha") {
      spec.concentration = parse_num(value, "alpha");
    } else if (current_key == "indeg") {
      spec.max_in_degree = static_cast<std::uint32_t>(parse_num(value, "indeg"));
    } else if (current_key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_num(value, "seed"));
    } else if (current_key == "p") {
      spec.probabilities.push_back(parse_num(value, "probability"));
    } else if (current_key == "iv") {
      const auto sep = value.find(':');
      if (sep == std::string::npos) {
        throw ValidationError("generator spec: interval '" + value + "' needs lo:hi");
      }
      spec.intervals.push_back(Interval{parse_num(value.substr(0, sep), "interval lo"),
                                        parse_num(value.substr(sep + 1), "interval hi")});
    } else {
      throw ValidationError("generator spec: unknown key '" + current_key + "'");
    }
  }
  return spec;
}

Network generate(const GenSpec& spec) {
  if (spec.n < 1) throw ValidationError("generator: n must be >= 1");
  if (spec.k < 2) throw ValidationError("generator: k must be >= 2");

  switch (spec.family) {
    case Family::kIdentical: {
      if (spec.probabilities.size() != spec.k) {
        throw ValidationError("identical family: need exactly k probabilities");
      }
      double sum = 0.0;
      for (const double q : spec.probabilities) {
        if (!(q >= 0.0 && q <= 1.0)) {
          throw ValidationError("identical family: probabilities must lie in [0, 1]");
        }
        sum += q;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("identical family: probabilities must sum to 1");
      }
      break;
    }
    case Family::kIdenticallyDistributed: {
      if (spec.intervals.size() != spec.k) {
        throw ValidationError("identically_distributed family: need exactly k intervals");
      }
      for (const Interval& iv : spec.intervals) {
        if (!(iv.lo <= iv.hi && iv.lo >= 0.0 && iv.hi <= 1.0)) {
          throw ValidationError(
              "identically_distributed family: intervals must be ordered and inside "
              "[0, 1]");
        }
      }
      break;
    }
    case Family::kDirichletRandom:
      if (!(spec.concentration > 0.0)) {
        throw ValidationError("dirichlet family: concentration must be positive");
      }
      break;
  }

  Rng rng{mix64(spec.seed ^ 0x6a09e667f3bcc908ULL)};
  std::vector<double> base = spec.probabilities;

  std::vector<Variable> vars;
  vars.reserve(spec.n);
  for (std::uint32_t i = 0; i < spec.n; ++i) {
    Variable v;
    v.name = "x" + std::to_string(i);
    v.outcomes.reserve(spec.k);
    for (std::uint32_t o = 0; o < spec.k; ++o) {
      v.outcomes.push_back("s" + std::to_string(o));
    }
    v.parents = spec.max_in_degree > 0 ? draw_parents(rng, i, spec.max_in_degree)
                                       : std::vector<std::uint32_t>{};
    std::uint64_t configs = 1;
    for (const std::uint32_t p : v.parents) {
      configs *= vars[p].outcomes.size();
    }
    v.cpt.reserve(configs * spec.k);
    for (std::uint64_t c = 0; c < configs; ++c) {
      std::vector<double> column;
      switch (spec.family) {
        case Family::kIdentical:
          column = identical_column(rng, base);
          break;
        case Family::kIdenticallyDistributed:
          column = interval_column(rng, spec.intervals);
          break;
        case Family::kDirichletRandom:
          column = dirichlet_column(rng, spec.k, spec.concentration);
          break;
      }
      canonicalize_column(column, 1e-9);
      v.cpt.insert(v.cpt.end(), column.begin(), column.end());
    }
    vars.push_back(std::move(v));
  }
  return Network::build(spec.to_string(), std::move(vars));
}

std::vector<CorpusEntry> corpus(std::uint64_t seed, std::size_t count) {
  std::vector<CorpusEntry> out;
  out.reserve(count);
  Rng root(seed);
  for (std::size_t c = 0; c < count; ++c) {
    Rng rng = root.split(c);
    GenSpec spec;
    spec.seed = rng.next_u64();
    spec.family = static_cast<Family>(c % 3);
    spec.k = static_cast<std::uint32_t>(2 + rng.uniform_below(3));  // 2..4
    spec.n = static_cast<std::uint32_t>(2 + rng.uniform_below(11));  // 2..12
    // Keep every member exactly enumerable well inside the acceptance budget.
    const double max_n = std::floor(22.0 * std::log(2.0) / std::log(spec.k));
    spec.n = std::min(spec.n, static_cast<std::uint32_t>(max_n));
    spec.max_in_degree = static_cast<std::uint32_t>(rng.uniform_below(4));  // 0..3

    switch (spec.family) {
      case Family::kIdentical: {
        // Strictly positive base vector, bounded away from 0.
        std::vector<double> base(spec.k);
        double sum = 0.0;
        for (auto& q : base) {
          q = 0.05 + rng.uniform01();
          sum += q;
        }
        for (auto& q : base) q /= sum;
        canonicalize_column(base, 1e-9);
        spec.probabilities = base;
        break;
      }
      case Family::kIdenticallyDistributed: {
        // Centers from a positive normalized draw; the last interval is the
        // exact mirror of the first k-1, so every draw is feasible.
        std::vector<double> center(spec.k);
        double sum = 0.0;
        for (auto& q : center) {
          q = 0.1 + rng.uniform01();
          sum += q;
        }
        for (auto& q : center) q /= sum;
        double lo_sum = 0.0;
        double hi_sum = 0.0;
        spec.intervals.clear();
        for (std::uint32_t j = 0; j + 1 < spec.k; ++j) {
          const double w = center[j] * 0.5 * rng.uniform01();
          Interval iv{std::max(1e-3, center[j] - w), std::min(1.0, center[j] + w)};
          lo_sum += iv.lo;
          hi_sum += iv.hi;
          spec.intervals.push_back(iv);
        }
        spec.intervals.push_back(Interval{std::max(0.0, 1.0 - hi_sum),
                                          std::min(1.0, 1.0 - lo_sum)});
        break;
      }
      case Family::kDirichletRandom: {
        const double alphas[] = {0.5, 1.0, 3.0};
        spec.concentration = alphas[rng.uniform_below(3)];
        break;
      }
    }
    out.push_back(CorpusEntry{spec, generate(spec)});
  }
  return out;
}

}  // namespace jointprof
