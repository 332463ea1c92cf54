#include "jointprof/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "jointprof/lognormal_fit.hpp"
#include "jointprof/model_gen.hpp"
#include "jointprof/moments.hpp"
#include "jointprof/net_format.hpp"
#include "jointprof/sampling.hpp"
#include "jointprof/sha256.hpp"
#include "jointprof/summation.hpp"
#include "jointprof/topk_search.hpp"
#include "jointprof/version.hpp"
#include "text_util.hpp"

namespace jointprof::cmd {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr double kLn10 = 2.302585092994046;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(ParseDiagnostic{Severity::kError, 1, 1, "cannot open '" + path + "'"});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

Network load_source(const NetworkSource& source, ordered_json* inputs) {
  const bool has_file = !source.input_path.empty();
  const bool has_spec = !source.generate_spec.empty();
  if (has_file == has_spec) {
    throw ValidationError("give exactly one network: an input file or --generate");
  }
  Network net = [&] {
    if (has_spec) {
      return jointprof::generate(GenSpec::parse(source.generate_spec));
    }
    const std::string text = read_file(source.input_path);
    if (inputs) {
      inputs->push_back(
          ordered_json{{"path", source.input_path}, {"sha256", sha256_hex(text)}});
    }
    const std::string& p = source.input_path;
    if (p.size() >= 4 && p.compare(p.size() - 4, 4, ".bif") == 0) return parse_bif(text);
    return parse_native(text);
  }();
  if (!source.subset.empty()) {
    net = subnetwork(net, source.subset);
  }
  return net;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  err << "note: no --seed given; using auto-seed " << s
      << " (recorded in the manifest)\n";
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

ordered_json source_params(const NetworkSource& source) {
  ordered_json j;
  j["input"] = source.input_path.empty() ? ordered_json() : ordered_json(source.input_path);
  j["generate"] =
      source.generate_spec.empty() ? ordered_json() : ordered_json(source.generate_spec);
  j["subset"] = source.subset;
  return j;
}

NetworkSource source_from_params(const ordered_json& p) {
  NetworkSource s;
  if (p.contains("input") && !p["input"].is_null()) s.input_path = p["input"];
  if (p.contains("generate") && !p["generate"].is_null()) s.generate_spec = p["generate"];
  if (p.contains("subset")) s.subset = p["subset"].get<std::vector<std::string>>();
  return s;
}

ordered_json histogram_params(const HistogramSpec& spec) {
  ordered_json j;
  j["bin_width_log10"] = spec.bin_width_log10;
  j["min_log10"] = spec.min_log10 ? ordered_json(*spec.min_log10) : ordered_json();
  j["max_log10"] = spec.max_log10 ? ordered_json(*spec.max_log10) : ordered_json();
  j["out_of_range"] =
      spec.out_of_range == OutOfRangePolicy::kRecord ? "record" : "clamp";
  return j;
}

HistogramSpec histogram_from_params(const ordered_json& p) {
  HistogramSpec spec;
  if (p.contains("bin_width_log10")) spec.bin_width_log10 = p["bin_width_log10"];
  if (p.contains("min_log10") && !p["min_log10"].is_null()) spec.min_log10 = p["min_log10"];
  if (p.contains("max_log10") && !p["max_log10"].is_null()) spec.max_log10 = p["max_log10"];
  if (p.value("out_of_range", "record") == std::string("clamp")) {
    spec.out_of_range = OutOfRangePolicy::kClamp;
  }
  return spec;
}

// The manifest: everything needed to re-run bit-identically, plus run
// metadata (timing, thread count, input digests, library version).
void write_manifest(const fs::path& dir, const std::string& command,
                    ordered_json parameters, ordered_json inputs, double elapsed_ms,
                    unsigned threads) {
  ordered_json m;
  m["manifest_version"] = 1;
  m["library_version"] = kVersion;
  m["command"] = command;
  m["parameters"] = std::move(parameters);
  m["inputs"] = std::move(inputs);
  m["threads"] = threads;
  m["timing_ms"] = elapsed_ms;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

int guard(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << "\n";
    return kResourceCap;
  } catch (const ParseError& e) {
    for (const auto& d : e.diagnostics()) err << d.to_string() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

// ---------------------------------------------------------------------------
// Report pieces shared between commands
// ---------------------------------------------------------------------------

std::string histogram_csv(const Histogram& hist) {
  std::string csv = "bin_lo_log10,bin_hi_log10,count,mass\n";
  for (const HistogramBin& b : hist.bins) {
    csv += format_double(b.lo_log10) + "," + format_double(b.hi_log10) + "," +
           std::to_string(b.count) + "," + format_double(b.mass) + "\n";
  }
  return csv;
}

ordered_json histogram_json(const Histogram& hist) {
  ordered_json bins = ordered_json::array();
  for (const HistogramBin& b : hist.bins) {
    bins.push_back(ordered_json{{"lo_log10", b.lo_log10},
                                {"hi_log10", b.hi_log10},
                                {"count", b.count},
                                {"mass", b.mass}});
  }
  return ordered_json{{"bins", std::move(bins)},
                      {"underflow_count", hist.underflow_count},
                      {"overflow_count", hist.overflow_count}};
}

struct TheoryReports {
  bool available = false;
  std::string note;
  std::vector<LogMoments> per_variable;
  NormalModel normal;
  ordered_json moments_json;
  std::string moments_csv;
  ordered_json liapounov_json;
};

TheoryReports make_theory_reports(const Network& net) {
  TheoryReports r;
  r.moments_csv = "variable,mu,sigma2,omega3\n";
  try {
    Accumulator xi, phi2;
    ordered_json vars = ordered_json::array();
    for (std::size_t i = 0; i < net.variable_count(); ++i) {
      const LogMoments m = variable_log_moments(net, i);
      r.per_variable.push_back(m);
      xi.add(m.mu);
      phi2.add(m.sigma2);
      vars.push_back(ordered_json{{"name", net.variable(i).name},
                                  {"outcome_count", net.variable(i).outcome_count()},
                                  {"mu", m.mu},
                                  {"sigma2", m.sigma2},
                                  {"omega3", m.omega3}});
      r.moments_csv += csv_escape(net.variable(i).name) + "," + format_double(m.mu) +
                       "," + format_double(m.sigma2) + "," + format_double(m.omega3) +
                       "\n";
    }
    r.normal.xi = xi.value();
    r.normal.phi2 = phi2.value();
    r.available = true;
    r.moments_json["variables"] = std::move(vars);
    r.moments_json["xi"] = r.normal.xi;
    r.moments_json["phi2"] = r.normal.phi2;
    r.moments_json["skewness"] =
        r.normal.phi2 > 0.0 ? ordered_json(skewness(r.normal)) : ordered_json();

    try {
      LiapounovReport rep = liapounov_ratio(r.per_variable);
      bool multi = false;
      for (std::size_t i = 0; i < net.variable_count(); ++i) {
        multi |= net.variable(i).outcome_count() > 2;
      }
      r.liapounov_json = ordered_json{{"sigma2", rep.sigma2s},
                                      {"omega3", rep.omega3s},
                                      {"ratio", rep.ratio},
                                      {"multi_valued_advisory", multi}};
    } catch (const DegenerateError& e) {
      r.liapounov_json = ordered_json{{"error", e.what()}};
    }
  } catch (const DegenerateError& e) {
    r.note = e.what();
    r.moments_json = ordered_json{{"error", r.note}};
    r.liapounov_json = ordered_json{{"error", r.note}};
  }
  return r;
}

std::string theory_curve_csv(const NormalModel& nm) {
  const double phi = std::sqrt(nm.phi2);
  const double lo = std::min(nm.xi, nm.xi + nm.phi2) - 4.0 * phi;
  constexpr int kPoints = 513;
  std::string csv = "ln_p,log10_p,density,contribution\n";
  for (int i = 0; i < kPoints; ++i) {
    const double x = lo + (0.0 - lo) * static_cast<double>(i) / (kPoints - 1);
    csv += format_double(x) + "," + format_double(x / kLn10) + "," +
           format_double(density_log(nm, x)) + "," +
           format_double(contribution_log(nm, x)) + "\n";
  }
  return csv;
}

ordered_json fit_json(const NormalModel& fitted, std::optional<double> ks,
                      const std::string& weighting) {
  ordered_json j;
  j["xi"] = fitted.xi;
  j["phi2"] = fitted.phi2;
  j["skewness"] = fitted.phi2 > 0.0 ? ordered_json(skewness(fitted)) : ordered_json();
  j["weighting"] = weighting;
  j["ks"] = ks ? ordered_json(*ks) : ordered_json();
  if (ks) j["lognormality_supported"] = *ks < 0.05;
  return j;
}

std::string coverage_csv(const MassProfile& profile) {
  std::string csv = "rank,state_prob,cumulative_mass\n";
  for (const CoveragePoint& c : profile.coverage) {
    csv += std::to_string(c.rank) + "," + format_double(c.state_prob) + "," +
           format_double(c.cumulative_mass) + "\n";
  }
  return csv;
}

ordered_json profile_json(const MassProfile& profile, const NormalModel& fitted,
                          std::optional<double> ks) {
  ordered_json j;
  j["state_count"] = profile.state_count;
  j["zero_state_count"] = profile.zero_state_count;
  j["total_mass"] = profile.total_mass;
  j["spread_orders"] = profile.spread_orders;
  j["lnp_mean"] = profile.lnp_mean;
  j["lnp_variance"] = profile.lnp_variance;
  j["histogram"] = histogram_json(profile.histogram);
  ordered_json cover = ordered_json::array();
  for (const double f : {0.5, 0.75, 0.9, 0.95, 0.99}) {
    cover.push_back(ordered_json{{"mass", f}, {"rank", coverage_at_mass(profile, f)}});
  }
  j["ranks_at_mass"] = std::move(cover);
  j["fit"] = fit_json(fitted, ks, "uniform");
  if (!profile.sorted_log_probs.empty()) {
    j["top_state_prob"] = std::exp(profile.sorted_log_probs.front());
  }
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

int analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    const auto t0 = Clock::now();
    ordered_json inputs = ordered_json::array();
    const Network net = load_source(options.source, &inputs);

    const fs::path dir(options.out_dir.empty() ? "." : options.out_dir);
    fs::create_directories(dir);

    std::optional<std::uint64_t> seed = options.seed;
    const bool needs_sampling = net.state_count() > options.cap;
    if (needs_sampling && options.sample_fallback == 0) {
      throw CapExceededError("analyze: network has " + std::to_string(net.state_count()) +
                                 " states, above the cap of " + std::to_string(options.cap) +
                                 "; pass --sample M to fall back to sampling",
                             net.state_count());
    }
    if (needs_sampling) seed = resolve_seed(seed, err);

    ordered_json params;
    params["source"] = source_params(options.source);
    params["histogram"] = histogram_params(options.histogram);
    params["cap"] = options.cap;
    params["sample_fallback"] = options.sample_fallback;
    params["threads"] = options.threads;
    params["seed"] = seed ? ordered_json(*seed) : ordered_json();

    const TheoryReports theory = make_theory_reports(net);
    write_file(dir / "moments.csv", theory.moments_csv);
    write_file(dir / "moments.json", theory.moments_json.dump(2) + "\n");
    write_file(dir / "liapounov.json", theory.liapounov_json.dump(2) + "\n");
    if (theory.available && theory.normal.phi2 > 0.0) {
      write_file(dir / "theory.csv", theory_curve_csv(theory.normal));
    }
    if (!theory.note.empty()) {
      out << "note: theoretical model unavailable: " << theory.note << "\n";
    }

    if (needs_sampling) {
      out << "note: " << net.state_count() << " states exceed the cap of " << options.cap
          << "; sampling " << options.sample_fallback << " states instead\n";
      SampleOptions sopt;
      sopt.seed = *seed;
      sopt.threads = options.threads;
      const NormalModel reference = theory.available ? theory.normal : NormalModel{};
      const SampleSummary summary = sample_summary(net, options.sample_fallback,
                                                   options.histogram, reference, sopt);
      write_file(dir / "sample_hist.csv", histogram_csv(summary.histogram));
      ordered_json sj;
      sj["m"] = summary.m;
      sj["zero_draws"] = summary.zero_draws;
      sj["lnp_mean"] = summary.mean;
      sj["lnp_variance"] = summary.variance;
      sj["ks"] = summary.reference_degenerate ? ordered_json() : ordered_json(summary.ks);
      sj["seed"] = summary.seed;
      write_file(dir / "sample_summary.json", sj.dump(2) + "\n");
      NormalModel fitted;
      fitted.xi = summary.mean;
      fitted.phi2 = summary.variance;
      write_file(dir / "fitted.json",
                 fit_json(fitted,
                          summary.reference_degenerate
                              ? std::nullopt
                              : std::optional<double>(summary.ks),
                          "uniform")
                         .dump(2) +
                     "\n");
    } else {
      EnumerateOptions eopt;
      eopt.max_states = options.cap;
      eopt.threads = options.threads;
      const MassProfile profile = enumerate_profile(net, options.histogram, eopt);

      NormalModel fitted = fit_normal(profile.sorted_log_probs);
      std::optional<double> ks;
      if (fitted.phi2 > 0.0) {
        std::vector<double> ascending(profile.sorted_log_probs.rbegin(),
                                      profile.sorted_log_probs.rend());
        ks = ks_statistic(ascending, fitted);
      }

      write_file(dir / "hist.csv", histogram_csv(profile.histogram));
      write_file(dir / "coverage.csv", coverage_csv(profile));
      write_file(dir / "profile.json", profile_json(profile, fitted, ks).dump(2) + "\n");
      write_file(dir / "fitted.json", fit_json(fitted, ks, "uniform").dump(2) + "\n");

      out << "states: " << profile.state_count << " (" << profile.zero_state_count
          << " zero-probability)\n";
      out << "total mass: " << format_double(profile.total_mass) << "\n";
      out << "spread: " << format_double(profile.spread_orders)
          << " orders of magnitude\n";
      if (!profile.sorted_log_probs.empty()) {
        out << "most probable state: p = "
            << format_double(std::exp(profile.sorted_log_probs.front())) << "\n";
      }
      out << "coverage:";
      for (const double f : {0.5, 0.75, 0.9, 0.95, 0.99}) {
        out << " " << format_double(f * 100) << "% at rank "
            << coverage_at_mass(profile, f) << ",";
      }
      out << "\n";
      if (theory.available) {
        out << "theory: xi = " << format_double(theory.normal.xi)
            << ", phi2 = " << format_double(theory.normal.phi2) << "\n";
      }
      out << "fit: xi = " << format_double(fitted.xi)
          << ", phi2 = " << format_double(fitted.phi2);
      if (ks) out << ", ks = " << format_double(*ks);
      out << "\n";
    }

    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    write_manifest(dir, "analyze", params, inputs, ms, options.threads);
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

int sample(const SampleCmdOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    const auto t0 = Clock::now();
    ordered_json inputs = ordered_json::array();
    const Network net = load_source(options.source, &inputs);
    const std::uint64_t seed = resolve_seed(options.seed, err);

    const fs::path dir(options.out_dir.empty() ? "." : options.out_dir);
    fs::create_directories(dir);

    ordered_json params;
    params["source"] = source_params(options.source);
    params["histogram"] = histogram_params(options.histogram);
    params["draws"] = options.draws;
    params["threads"] = options.threads;
    params["seed"] = seed;

    NormalModel reference;
    bool have_reference = true;
    try {
      reference = theoretical_normal(net);
    } catch (const DegenerateError&) {
      have_reference = false;
    }

    SampleOptions sopt;
    sopt.seed = seed;
    sopt.threads = options.threads;
    const SampleSummary summary =
        sample_summary(net, options.draws, options.histogram, reference, sopt);

    write_file(dir / "sample_hist.csv", histogram_csv(summary.histogram));
    ordered_json sj;
    sj["m"] = summary.m;
    sj["zero_draws"] = summary.zero_draws;
    sj["lnp_mean"] = summary.mean;
    sj["lnp_variance"] = summary.variance;
    sj["reference"] = have_reference
                          ? ordered_json{{"xi", reference.xi}, {"phi2", reference.phi2}}
                          : ordered_json();
    sj["ks"] = (have_reference && !summary.reference_degenerate)
                   ? ordered_json(summary.ks)
                   : ordered_json();
    sj["reference_degenerate"] = summary.reference_degenerate || !have_reference;
    sj["seed"] = summary.seed;
    write_file(dir / "sample_summary.json", sj.dump(2) + "\n");

    out << "draws: " << summary.m << " (" << summary.zero_draws << " zero-probability)\n";
    out << "lnp mean: " << format_double(summary.mean)
        << ", variance: " << format_double(summary.variance) << "\n";
    if (have_reference && !summary.reference_degenerate) {
      out << "ks vs theoretical truncated normal: " << format_double(summary.ks) << "\n";
    }

    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    write_manifest(dir, "sample", params, inputs, ms, options.threads);
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int fit(const FitOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    const auto t0 = Clock::now();
    ordered_json inputs = ordered_json::array();
    const Network net = load_source(options.source, &inputs);

    EnumerateOptions eopt;
    eopt.max_states = options.cap;
    eopt.threads = options.threads;
    HistogramSpec spec;
    const MassProfile profile = enumerate_profile(net, spec, eopt);

    NormalModel fitted;
    std::optional<double> ks;
    if (options.mass_weighted) {
      std::vector<double> weights;
      weights.reserve(profile.sorted_log_probs.size());
      for (const double lnp : profile.sorted_log_probs) weights.push_back(std::exp(lnp));
      fitted = fit_normal(profile.sorted_log_probs, weights);
    } else {
      fitted = fit_normal(profile.sorted_log_probs);
      if (fitted.phi2 > 0.0) {
        std::vector<double> ascending(profile.sorted_log_probs.rbegin(),
                                      profile.sorted_log_probs.rend());
        ks = ks_statistic(ascending, fitted);
      }
    }
    const ordered_json j =
        fit_json(fitted, ks, options.mass_weighted ? "mass" : "uniform");

    if (options.out_dir.empty()) {
      out << j.dump(2) << "\n";
    } else {
      const fs::path dir(options.out_dir);
      fs::create_directories(dir);
      write_file(dir / "fitted.json", j.dump(2) + "\n");
      ordered_json params;
      params["source"] = source_params(options.source);
      params["cap"] = options.cap;
      params["mass_weighted"] = options.mass_weighted;
      params["threads"] = options.threads;
      const double ms =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      write_manifest(dir, "fit", params, inputs, ms, options.threads);
    }
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// threshold
// ---------------------------------------------------------------------------

int threshold(const ThresholdOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    const auto t0 = Clock::now();
    if (options.f.has_value() == options.epsilon.has_value()) {
      throw ValidationError("give exactly one of --f or --epsilon");
    }

    ordered_json inputs = ordered_json::array();
    NormalModel nm;
    std::string model_source;
    std::optional<std::uint64_t> state_count = options.states;

    const bool explicit_params = options.xi.has_value() || options.phi2.has_value();
    if (explicit_params) {
      if (!options.xi || !options.phi2) {
        throw ValidationError("--xi and --phi2 must be given together");
      }
      nm.xi = *options.xi;
      nm.phi2 = *options.phi2;
      model_source = "explicit";
    } else {
      const Network net = load_source(options.source, &inputs);
      state_count = state_count ? state_count : std::optional<std::uint64_t>(net.state_count());
      if (options.use_fitted) {
        EnumerateOptions eopt;
        eopt.max_states = options.cap;
        eopt.threads = options.threads;
        HistogramSpec spec;
        const MassProfile profile = enumerate_profile(net, spec, eopt);
        nm = fit_normal(profile.sorted_log_probs);
        model_source = "fitted";
      } else {
        nm = theoretical_normal(net);
        model_source = "theoretical";
      }
    }

    const double f = options.f ? *options.f : *options.epsilon;
    const ThresholdResult r = mass_threshold(nm, f);

    ordered_json j;
    j[options.f ? "f" : "epsilon"] = f;
    j["ln_t"] = r.ln_t;
    j["t"] = r.t;
    j["l"] = r.l;
    j["l_untruncated"] = r.l_untruncated;
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["model"] = ordered_json{{"xi", nm.xi}, {"phi2", nm.phi2}, {"source", model_source}};
    if (options.epsilon) {
      if (state_count) {
        const double estimate = (1.0 - r.l) * static_cast<double>(*state_count);
        j["state_count"] = *state_count;
        j["rank_estimate"] = estimate;
        j["rank_estimate_rounded"] =
            static_cast<std::uint64_t>(std::llround(std::max(0.0, estimate)));
      } else {
        throw ValidationError(
            "--epsilon needs a state count: give a network or --states");
      }
    }

    if (options.out_dir.empty()) {
      out << j.dump(2) << "\n";
    } else {
      const fs::path dir(options.out_dir);
      fs::create_directories(dir);
      write_file(dir / "threshold.json", j.dump(2) + "\n");
      ordered_json params;
      params["source"] = source_params(options.source);
      params["xi"] = options.xi ? ordered_json(*options.xi) : ordered_json();
      params["phi2"] = options.phi2 ? ordered_json(*options.phi2) : ordered_json();
      params["use_fitted"] = options.use_fitted;
      params["f"] = options.f ? ordered_json(*options.f) : ordered_json();
      params["epsilon"] = options.epsilon ? ordered_json(*options.epsilon) : ordered_json();
      params["states"] = options.states ? ordered_json(*options.states) : ordered_json();
      params["cap"] = options.cap;
      params["threads"] = options.threads;
      const double ms =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      write_manifest(dir, "threshold", params, inputs, ms, options.threads);
    }
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// topk
// ---------------------------------------------------------------------------

int topk(const TopkOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    const auto t0 = Clock::now();
    const int rules_given = static_cast<int>(options.k.has_value()) +
                            static_cast<int>(options.epsilon.has_value()) +
                            static_cast<int>(options.floor.has_value());
    if (rules_given != 1) {
      throw ValidationError("give exactly one stop rule: --k, --epsilon or --floor");
    }
    StopRule rule = options.k        ? StopRule::max_states(*options.k)
                    : options.epsilon ? StopRule::residual_mass(*options.epsilon)
                                      : StopRule::probability_floor(*options.floor);

    ordered_json inputs = ordered_json::array();
    const Network net = load_source(options.source, &inputs);

    SearchOptions sopt;
    sopt.node_cap = options.node_cap;
    const SearchResult result = search_top_states(net, rule, sopt);

    const fs::path dir(options.out_dir.empty() ? "." : options.out_dir);
    fs::create_directories(dir);

    std::string csv = "rank,state_index";
    for (const Variable& v : net.variables()) csv += "," + csv_escape(v.name);
    csv += ",probability,cumulative_mass\n";
    Accumulator cum;
    for (std::size_t i = 0; i < result.states.size(); ++i) {
      const TopState& st = result.states[i];
      cum.add(st.prob);
      csv += std::to_string(i + 1) + "," + std::to_string(st.index);
      for (std::size_t v = 0; v < st.assignment.size(); ++v) {
        csv += "," + csv_escape(net.variable(v).outcomes[st.assignment[v]]);
      }
      csv += "," + format_double(st.prob) + "," + format_double(cum.value()) + "\n";
    }
    write_file(dir / "states.csv", csv);

    ordered_json params;
    params["source"] = source_params(options.source);
    params["k"] = options.k ? ordered_json(*options.k) : ordered_json();
    params["epsilon"] = options.epsilon ? ordered_json(*options.epsilon) : ordered_json();
    params["floor"] = options.floor ? ordered_json(*options.floor) : ordered_json();
    params["node_cap"] = options.node_cap;

    ordered_json run;
    run["rule"] = rule.to_string();
    run["states_emitted"] = result.states.size();
    run["accounted_mass"] = result.accounted_mass;
    run["residual_bound"] = result.residual_bound;
    run["nodes_expanded"] = result.nodes_expanded;
    run["truncated"] = result.truncated;
    write_file(dir / "run.json", run.dump(2) + "\n");

    out << "emitted " << result.states.size() << " states, accounted mass "
        << format_double(result.accounted_mass) << ", residual bound "
        << format_double(result.residual_bound) << "\n";
    if (result.truncated) {
      out << "warning: node cap " << options.node_cap
          << " hit; result is a correct but incomplete prefix\n";
    }

    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    write_manifest(dir, "topk", params, inputs, ms, 1);
    return result.truncated ? kTruncated : kOk;
  });
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int generate(const GenerateOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    GenSpec spec = GenSpec::parse(options.spec);
    if (options.seed) {
      spec.seed = *options.seed;
    } else if (options.spec.find("seed=") == std::string::npos) {
      spec.seed = resolve_seed(std::nullopt, err);
    }
    const Network net = jointprof::generate(spec);
    const std::string text = write_native(net);
    if (options.out_path.empty()) {
      out << text;
    } else {
      write_file(options.out_path, text);
      out << "wrote " << net.variable_count() << " variables, "
          << net.state_count() << " states to " << options.out_path << "\n";
    }
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// check-clt
// ---------------------------------------------------------------------------

int check_clt(const CheckCltOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    ordered_json inputs = ordered_json::array();
    const Network net = load_source(options.source, &inputs);

    ordered_json vars = ordered_json::array();
    std::vector<LogMoments> ms;
    bool multi = false;
    for (std::size_t i = 0; i < net.variable_count(); ++i) {
      const LogMoments m = variable_log_moments(net, i);
      ms.push_back(m);
      multi |= net.variable(i).outcome_count() > 2;
      vars.push_back(ordered_json{{"name", net.variable(i).name},
                                  {"outcome_count", net.variable(i).outcome_count()},
                                  {"mu", m.mu},
                                  {"sigma2", m.sigma2},
                                  {"omega3", m.omega3}});
    }
    ordered_json j;
    j["variables"] = std::move(vars);
    try {
      const LiapounovReport rep = liapounov_ratio(ms);
      j["ratio"] = rep.ratio;
    } catch (const DegenerateError& e) {
      j["ratio"] = ordered_json();
      j["note"] = e.what();
    }
    j["multi_valued_advisory"] = multi;
    out << j.dump(2) << "\n";
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

int replay(const std::string& manifest_path, const std::string& out_dir,
           std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    ordered_json m;
    try {
      m = ordered_json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(ParseDiagnostic{Severity::kError, 1, 1, e.what()});
    }
    const std::string command = m.value("command", std::string{});
    const ordered_json& p = m["parameters"];

    for (const auto& input : m.value("inputs", ordered_json::array())) {
      const std::string path = input.value("path", std::string{});
      try {
        const std::string digest = sha256_hex(read_file(path));
        if (digest != input.value("sha256", std::string{})) {
          err << "warning: '" << path << "' changed since the original run\n";
        }
      } catch (const Error&) {
        err << "warning: cannot re-read input '" << path << "'\n";
      }
    }

    if (command == "analyze") {
      AnalyzeOptions o;
      o.source = source_from_params(p["source"]);
      o.histogram = histogram_from_params(p["histogram"]);
      o.cap = p.value("cap", o.cap);
      o.sample_fallback = p.value("sample_fallback", std::uint64_t{0});
      o.threads = p.value("threads", 1u);
      if (p.contains("seed") && !p["seed"].is_null()) {
        o.seed = p["seed"].get<std::uint64_t>();
      }
      o.out_dir = out_dir;
      return analyze(o, out, err);
    }
    if (command == "sample") {
      SampleCmdOptions o;
      o.source = source_from_params(p["source"]);
      o.histogram = histogram_from_params(p["histogram"]);
      o.draws = p.value("draws", std::uint64_t{0});
      o.threads = p.value("threads", 1u);
      o.seed = p["seed"].get<std::uint64_t>();
      o.out_dir = out_dir;
      return sample(o, out, err);
    }
    if (command == "fit") {
      FitOptions o;
      o.source = source_from_params(p["source"]);
      o.cap = p.value("cap", o.cap);
      o.mass_weighted = p.value("mass_weighted", false);
      o.threads = p.value("threads", 1u);
      o.out_dir = out_dir;
      return fit(o, out, err);
    }
    if (command == "threshold") {
      ThresholdOptions o;
      o.source = source_from_params(p["source"]);
      if (!p["xi"].is_null()) o.xi = p["xi"].get<double>();
      if (!p["phi2"].is_null()) o.phi2 = p["phi2"].get<double>();
      o.use_fitted = p.value("use_fitted", false);
      if (!p["f"].is_null()) o.f = p["f"].get<double>();
      if (!p["epsilon"].is_null()) o.epsilon = p["epsilon"].get<double>();
      if (!p["states"].is_null()) o.states = p["states"].get<std::uint64_t>();
      o.cap = p.value("cap", o.cap);
      o.threads = p.value("threads", 1u);
      o.out_dir = out_dir;
      return threshold(o, out, err);
    }
    if (command == "topk") {
      TopkOptions o;
      o.source = source_from_params(p["source"]);
      if (!p["k"].is_null()) o.k = p["k"].get<std::uint64_t>();
      if (!p["epsilon"].is_null()) o.epsilon = p["epsilon"].get<double>();
      if (!p["floor"].is_null()) o.floor = p["floor"].get<double>();
      o.node_cap = p.value("node_cap", o.node_cap);
      o.out_dir = out_dir;
      return topk(o, out, err);
    }
    throw ValidationError("manifest has no replayable command (got '" + command + "')");
  });
}

}  // namespace jointprof::cmd
