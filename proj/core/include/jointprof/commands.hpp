#ifndef JOINTPROF_COMMANDS_HPP
#define JOINTPROF_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jointprof/enumeration.hpp"

namespace jointprof::cmd {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;    // parse/usage/validation failures
inline constexpr int kResourceCap = 3;   // enumeration cap exceeded, no fallback
inline constexpr int kTruncated = 4;     // search gave a partial result

// Where the network comes from: a file or a generator spec (exactly one).
struct NetworkSource {
  std::string input_path;
  std::string generate_spec;
  std::vector<std::string> subset;  // optional restriction, parent-closed
};

struct AnalyzeOptions {
  NetworkSource source;
  std::string out_dir;
  HistogramSpec histogram;
  std::uint64_t cap = std::uint64_t{1} << 24;
  std::uint64_t sample_fallback = 0;  // draws to use when the cap is exceeded
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;  // used by the sampling fallback
};

struct SampleCmdOptions {
  NetworkSource source;
  std::string out_dir;
  HistogramSpec histogram;
  std::uint64_t draws = 100000;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
};

struct FitOptions {
  NetworkSource source;
  std::string out_dir;  // empty: print to stdout
  std::uint64_t cap = std::uint64_t{1} << 24;
  bool mass_weighted = false;  // fit the contribution curve instead
  unsigned threads = 1;
};

struct ThresholdOptions {
  NetworkSource source;               // may be empty when xi/phi2 are given
  std::optional<double> xi, phi2;     // explicit model parameters
  bool use_fitted = false;            // fit via enumeration instead of theory
  std::optional<double> f;            // threshold equation target
  std::optional<double> epsilon;      // error-bound form; also estimates ranks
  std::optional<std::uint64_t> states;  // state count when no network given
  std::string out_dir;                // empty: print to stdout
  std::uint64_t cap = std::uint64_t{1} << 24;
  unsigned threads = 1;
};

struct TopkOptions {
  NetworkSource source;
  std::string out_dir;
  std::optional<std::uint64_t> k;
  std::optional<double> epsilon;
  std::optional<double> floor;
  std::uint64_t node_cap = 10'000'000;
};

struct GenerateOptions {
  std::string spec;
  std::optional<std::uint64_t> seed;  // overrides the spec's seed
  std::string out_path;               // empty: stdout
};

struct CheckCltOptions {
  NetworkSource source;
};

int analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int sample(const SampleCmdOptions& options, std::ostream& out, std::ostream& err);
int fit(const FitOptions& options, std::ostream& out, std::ostream& err);
int threshold(const ThresholdOptions& options, std::ostream& out, std::ostream& err);
int topk(const TopkOptions& options, std::ostream& out, std::ostream& err);
int generate(const GenerateOptions& options, std::ostream& out, std::ostream& err);
int check_clt(const CheckCltOptions& options, std::ostream& out, std::ostream& err);

// Re-runs the command recorded in a manifest into a fresh directory;
// outputs are bit-identical to the original run.
int replay(const std::string& manifest_path, const std::string& out_dir,
           std::ostream& out, std::ostream& err);

}  // namespace jointprof::cmd

#endif  // JOINTPROF_COMMANDS_HPP
