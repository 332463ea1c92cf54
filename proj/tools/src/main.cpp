#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jointprof/commands.hpp"
#include "jointprof/version.hpp"

namespace {

using jointprof::HistogramSpec;
using jointprof::OutOfRangePolicy;

struct SourceFlags {
  std::string input;
  std::string generate;
  std::vector<std::string> subset;
};

void add_source_flags(CLI::App* app, SourceFlags* flags) {
  app->add_option("network", flags->input,
                  "network file (.bif for BIF, anything else parses as native JSON)");
  app->add_option("--generate", flags->generate,
                  "generator spec instead of a file, e.g. identical:n=10,k=2,p=0.1,0.9");
  app->add_option("--subset", flags->subset,
                  "restrict to these variables (must include all their parents)")
      ->delimiter(',');
}

jointprof::cmd::NetworkSource to_source(const SourceFlags& flags) {
  jointprof::cmd::NetworkSource src;
  src.input_path = flags.input;
  src.generate_spec = flags.generate;
  src.subset = flags.subset;
  return src;
}

struct HistFlags {
  double bin_width = 0.5;
  std::optional<double> min_log10;
  std::optional<double> max_log10;
  bool clamp = false;
};

void add_hist_flags(CLI::App* app, HistFlags* flags) {
  app->add_option("--bin-width", flags->bin_width, "histogram bin width in log10 units")
      ->capture_default_str();
  app->add_option("--log10-min", flags->min_log10, "histogram lower edge (log10 p)");
  app->add_option("--log10-max", flags->max_log10, "histogram upper edge (log10 p)");
  app->add_flag("--clamp-out-of-range", flags->clamp,
                "fold out-of-range states into the edge bins instead of counting them "
                "separately");
}

HistogramSpec to_hist(const HistFlags& flags) {
  HistogramSpec spec;
  spec.bin_width_log10 = flags.bin_width;
  spec.min_log10 = flags.min_log10;
  spec.max_log10 = flags.max_log10;
  spec.out_of_range = flags.clamp ? OutOfRangePolicy::kClamp : OutOfRangePolicy::kRecord;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jointprof: joint-distribution probability profiler for discrete "
               "Bayesian networks"};
  app.set_version_flag("--version", std::string("jointprof ") + jointprof::kVersion);
  app.require_subcommand(1);

  int exit_code = 0;
  const auto run = [&](auto fn) { exit_code = fn(std::cout, std::cerr); };

  // ---- analyze ----
  auto* analyze = app.add_subcommand(
      "analyze", "exact enumeration profile, moments, theory curves and fit");
  SourceFlags an_src;
  HistFlags an_hist;
  jointprof::cmd::AnalyzeOptions an_opt;
  std::optional<std::uint64_t> an_seed;
  add_source_flags(analyze, &an_src);
  add_hist_flags(analyze, &an_hist);
  analyze->add_option("-o,--out", an_opt.out_dir, "output directory")->required();
  analyze->add_option("--cap", an_opt.cap, "refuse exact enumeration above this many states")
      ->capture_default_str();
  analyze->add_option("--sample", an_opt.sample_fallback,
                      "fall back to this many sampled states when the cap is exceeded");
  analyze->add_option("--threads", an_opt.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  analyze->add_option("--seed", an_seed, "seed for the sampling fallback");
  analyze->callback([&] {
    an_opt.source = to_source(an_src);
    an_opt.histogram = to_hist(an_hist);
    an_opt.seed = an_seed;
    run([&](auto& out, auto& err) { return jointprof::cmd::analyze(an_opt, out, err); });
  });

  // ---- sample ----
  auto* sample = app.add_subcommand(
      "sample", "uniform state draws: ln p histogram, summary and KS check");
  SourceFlags sm_src;
  HistFlags sm_hist;
  jointprof::cmd::SampleCmdOptions sm_opt;
  std::optional<std::uint64_t> sm_seed;
  add_source_flags(sample, &sm_src);
  add_hist_flags(sample, &sm_hist);
  sample->add_option("-o,--out", sm_opt.out_dir, "output directory")->required();
  sample->add_option("-m,--draws", sm_opt.draws, "number of draws")->capture_default_str();
  sample->add_option("--threads", sm_opt.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  sample->add_option("--seed", sm_seed, "RNG seed (auto-seeded and recorded if absent)");
  sample->callback([&] {
    sm_opt.source = to_source(sm_src);
    sm_opt.histogram = to_hist(sm_hist);
    sm_opt.seed = sm_seed;
    run([&](auto& out, auto& err) { return jointprof::cmd::sample(sm_opt, out, err); });
  });

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "fit a lognormal model to the enumerated profile");
  SourceFlags ft_src;
  jointprof::cmd::FitOptions ft_opt;
  add_source_flags(fit, &ft_src);
  fit->add_option("-o,--out", ft_opt.out_dir, "output directory (default: print JSON)");
  fit->add_option("--cap", ft_opt.cap, "enumeration cap")->capture_default_str();
  fit->add_flag("--mass-weighted", ft_opt.mass_weighted,
                "weight states by probability (fits the contribution curve)");
  fit->add_option("--threads", ft_opt.threads, "worker threads")->capture_default_str();
  fit->callback([&] {
    ft_opt.source = to_source(ft_src);
    run([&](auto& out, auto& err) { return jointprof::cmd::fit(ft_opt, out, err); });
  });

  // ---- threshold ----
  auto* threshold = app.add_subcommand(
      "threshold", "solve the mass-threshold equation: f or epsilon -> t and l");
  SourceFlags th_src;
  jointprof::cmd::ThresholdOptions th_opt;
  std::optional<double> th_xi, th_phi2, th_f, th_eps;
  std::optional<std::uint64_t> th_states;
  add_source_flags(threshold, &th_src);
  threshold->add_option("--xi", th_xi, "explicit model mean of ln p");
  threshold->add_option("--phi2", th_phi2, "explicit model variance of ln p");
  threshold->add_option("--f", th_f, "target residual mass fraction in (0,1)");
  threshold->add_option("--epsilon", th_eps,
                        "error bound in (0,1); also estimates the rank needed");
  threshold->add_option("--states", th_states, "state count when no network is given");
  threshold->add_flag("--use-fitted", th_opt.use_fitted,
                      "fit the model by enumeration instead of using theory");
  threshold->add_option("-o,--out", th_opt.out_dir, "output directory (default: print)");
  threshold->add_option("--cap", th_opt.cap, "enumeration cap")->capture_default_str();
  threshold->add_option("--threads", th_opt.threads, "worker threads")
      ->capture_default_str();
  threshold->callback([&] {
    th_opt.source = to_source(th_src);
    th_opt.xi = th_xi;
    th_opt.phi2 = th_phi2;
    th_opt.f = th_f;
    th_opt.epsilon = th_eps;
    th_opt.states = th_states;
    run([&](auto& out, auto& err) { return jointprof::cmd::threshold(th_opt, out, err); });
  });

  // ---- topk ----
  auto* topk = app.add_subcommand(
      "topk", "best-first most-probable states under a stop rule");
  SourceFlags tk_src;
  jointprof::cmd::TopkOptions tk_opt;
  std::optional<std::uint64_t> tk_k;
  std::optional<double> tk_eps, tk_floor;
  add_source_flags(topk, &tk_src);
  topk->add_option("-o,--out", tk_opt.out_dir, "output directory")->required();
  topk->add_option("--k", tk_k, "emit the k most probable states");
  topk->add_option("--epsilon", tk_eps, "emit until residual mass <= epsilon");
  topk->add_option("--floor", tk_floor, "emit exactly the states with p >= this");
  topk->add_option("--node-cap", tk_opt.node_cap, "search node expansion cap")
      ->capture_default_str();
  topk->callback([&] {
    tk_opt.source = to_source(tk_src);
    tk_opt.k = tk_k;
    tk_opt.epsilon = tk_eps;
    tk_opt.floor = tk_floor;
    run([&](auto& out, auto& err) { return jointprof::cmd::topk(tk_opt, out, err); });
  });

  // ---- generate ----
  auto* generate = app.add_subcommand("generate", "write a generated network as native JSON");
  jointprof::cmd::GenerateOptions gn_opt;
  std::optional<std::uint64_t> gn_seed;
  generate->add_option("--spec", gn_opt.spec, "generator spec")->required();
  generate->add_option("--seed", gn_seed, "seed override");
  generate->add_option("-o,--out", gn_opt.out_path, "output file (default: stdout)");
  generate->callback([&] {
    gn_opt.seed = gn_seed;
    run([&](auto& out, auto& err) { return jointprof::cmd::generate(gn_opt, out, err); });
  });

  // ---- check-clt ----
  auto* clt = app.add_subcommand(
      "check-clt", "per-variable log-moments and the CLT precondition ratio");
  SourceFlags cl_src;
  jointprof::cmd::CheckCltOptions cl_opt;
  add_source_flags(clt, &cl_src);
  clt->callback([&] {
    cl_opt.source = to_source(cl_src);
    run([&](auto& out, auto& err) { return jointprof::cmd::check_clt(cl_opt, out, err); });
  });

  // ---- replay ----
  auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  std::string rp_manifest, rp_out;
  replay->add_option("manifest", rp_manifest, "manifest.json of a previous run")->required();
  replay->add_option("-o,--out", rp_out, "output directory")->required();
  replay->callback([&] {
    run([&](auto& out, auto& err) {
      return jointprof::cmd::replay(rp_manifest, rp_out, out, err);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : jointprof::cmd::kInputError;
  }
  return exit_code;
}
