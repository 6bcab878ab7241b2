#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gspsim/csv.hpp"
#include "gspsim/experiment.hpp"
#include "gspsim/manifest.hpp"
#include "gspsim/svg.hpp"
#include "gspsim/version.hpp"

namespace gspsim::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kIoError = 2,
  kNumericError = 3,
  kInternalError = 4,
};

/// Raw flag values as parsed; resolution into a SweepConfig happens in
/// make_plan so both steps stay testable.
struct Options {
  std::string alphas = "-2:2:0.1";
  std::size_t auctions = 234000;
  std::size_t slots = 12;
  std::size_t bidders = 13;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double spearman = 0.4;
  double value_mu = 0.35;
  double value_sigma = 0.71;
  std::string value_space = "log";
  double ctr_a = 2.71;
  double ctr_b = 25.43;
  std::string pollution = "off";
  double strength = 1.0;
  std::vector<double> strengths;
  std::vector<double> spearmans;
  std::string bias;
  std::string out;
  std::string plot;
  std::string metric = "revenue";
  double flat_tolerance = 0.03;
  unsigned threads = 0;
};

enum class RunMode { single, sensitivity, correlation };

struct RunPlan {
  SweepConfig config;
  RunMode mode = RunMode::single;
  std::vector<double> mode_values;  // strengths or spearman targets
  Metric metric = Metric::revenue;
  std::string out;
  std::string plot;
  bool seed_given = false;
};

inline std::vector<double> parse_alpha_spec(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  char trailing = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &trailing) != 3)
    throw std::invalid_argument("alphas: expected <lo:hi:step>, got '" + spec + "'");
  return make_alpha_grid(lo, hi, step);
}

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string cell = text.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + cell + "'");
    }
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) throw std::invalid_argument("not a number: '" + cell + "'");
    values.push_back(v);
    pos = comma + 1;
  }
  return values;
}

/// A comma-separated list, a single number, or a path to a one-number-per-line
/// file.
inline PositionBias resolve_bias(const std::string& spec, std::size_t slots) {
  if (spec.empty()) return PositionBias::geometric(slots);
  if (spec.find(',') != std::string::npos) return PositionBias(parse_number_list(spec));
  if (std::filesystem::exists(spec)) {
    std::ifstream file(spec);
    if (!file) throw std::invalid_argument("bias: cannot read file '" + spec + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(file, line)) {
      if (line.empty() || line[0] == '#') continue;
      values.push_back(parse_number_list(line).at(0));
    }
    if (values.empty()) throw std::invalid_argument("bias: file '" + spec + "' has no values");
    return PositionBias(std::move(values));
  }
  try {
    return PositionBias(parse_number_list(spec));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bias: '" + spec + "' is neither a file nor a number list");
  }
}

inline Metric parse_metric(const std::string& name) {
  if (name == "revenue") return Metric::revenue;
  if (name == "efficiency") return Metric::efficiency;
  if (name == "relevance") return Metric::relevance;
  throw std::invalid_argument("metric: expected revenue, efficiency, or relevance");
}

inline RunPlan make_plan(const Options& opt) {
  RunPlan plan;
  plan.config.alphas = parse_alpha_spec(opt.alphas);
  plan.config.auctions_per_alpha = opt.auctions;
  plan.config.slots = opt.slots;
  plan.config.bidders = opt.bidders;
  plan.config.seed = opt.seed;
  plan.config.spearman_rho = opt.spearman;
  plan.config.value_params = opt.value_space == "moments"
                                 ? lognormal_from_moments(opt.value_mu, opt.value_sigma)
                                 : LognormalParams(opt.value_mu, opt.value_sigma);
  plan.config.pollution.base_a = opt.ctr_a;
  plan.config.pollution.anchor_b = opt.ctr_b;
  plan.config.pollution.strength = opt.strength;
  plan.config.pollution.enabled = opt.pollution == "on";
  plan.config.bias = resolve_bias(opt.bias, opt.slots);
  plan.config.flat_tolerance = opt.flat_tolerance;
  plan.config.threads = opt.threads;
  plan.config.validate();

  if (!opt.strengths.empty() && !opt.spearmans.empty())
    throw std::invalid_argument("choose one of --strengths and --spearmans");
  if (!opt.strengths.empty()) {
    if (!plan.config.pollution.enabled)
      throw std::invalid_argument("--strengths requires --pollution on");
    plan.mode = RunMode::sensitivity;
    plan.mode_values = opt.strengths;
  } else if (!opt.spearmans.empty()) {
    plan.mode = RunMode::correlation;
    plan.mode_values = opt.spearmans;
  }
  plan.metric = parse_metric(opt.metric);
  plan.out = opt.out;
  plan.plot = opt.plot;
  plan.seed_given = opt.seed_given;
  return plan;
}

inline void attach_options(CLI::App& app, Options& opt) {
  app.add_option("--alphas", opt.alphas, "alpha grid as <lo:hi:step>")
      ->capture_default_str();
  app.add_option("--auctions", opt.auctions, "auctions simulated per alpha point")
      ->capture_default_str();
  app.add_option("--slots", opt.slots, "ad slots per page (K)")->capture_default_str();
  app.add_option("--bidders", opt.bidders, "bidders per auction (N, must exceed K)")
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "master seed; omitted = random, printed and recorded");
  app.add_option("--spearman", opt.spearman, "target Spearman correlation between value and ctr")
      ->capture_default_str();
  app.add_option("--value-mu", opt.value_mu, "value distribution location")->capture_default_str();
  app.add_option("--value-sigma", opt.value_sigma, "value distribution scale")
      ->capture_default_str();
  app.add_option("--value-space", opt.value_space,
                 "interpret --value-mu/--value-sigma in 'log' space (underlying normal) or as "
                 "distribution 'moments'")
      ->check(CLI::IsMember({"log", "moments"}))
      ->capture_default_str();
  app.add_option("--ctr-a", opt.ctr_a, "ctr beta distribution a-shape")->capture_default_str();
  app.add_option("--ctr-b", opt.ctr_b, "ctr beta distribution b-shape (anchor at alpha = 1)")
      ->capture_default_str();
  app.add_option("--pollution", opt.pollution, "shift the ctr distribution with alpha")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_option("--strength", opt.strength, "pollution shift multiplier")->capture_default_str();
  app.add_option("--strengths", opt.strengths,
                 "comma-separated strengths; runs one sweep per value on a shared seed")
      ->delimiter(',');
  app.add_option("--spearmans", opt.spearmans,
                 "comma-separated Spearman targets; runs one sweep per value on a shared seed")
      ->delimiter(',');
  app.add_option("--bias", opt.bias,
                 "position bias: comma-separated multipliers or a one-per-line file (default "
                 "geometric 0.75^i)");
  app.add_option("--out", opt.out, "write results CSV here (plus a .manifest.json)");
  app.add_option("--plot", opt.plot, "write an SVG line chart here");
  app.add_option("--metric", opt.metric, "metric to plot")
      ->check(CLI::IsMember({"revenue", "efficiency", "relevance"}))
      ->capture_default_str();
  app.add_option("--flat-tolerance", opt.flat_tolerance,
                 "relative tolerance defining the near-optimal revenue region")
      ->capture_default_str();
  app.add_option("--threads", opt.threads, "worker threads (0 = hardware); results are identical "
                                           "at any count");
  app.set_config("--config", "", "configuration file with 'key = value' lines");
}

inline std::string mode_suffix(RunMode mode, double value) {
  char buf[48];
  if (mode == RunMode::sensitivity)
    std::snprintf(buf, sizeof buf, "_strength%g", value);
  else
    std::snprintf(buf, sizeof buf, "_spearman%g", value);
  return buf;
}

inline std::string series_label(const RunPlan& plan, double value) {
  char buf[48];
  if (plan.mode == RunMode::sensitivity) {
    std::snprintf(buf, sizeof buf, "strength %g", value);
  } else if (plan.mode == RunMode::correlation) {
    std::snprintf(buf, sizeof buf, "spearman %g", value);
  } else {
    return plan.config.pollution.enabled ? "pollution on" : "pollution off";
  }
  return buf;
}

inline std::filesystem::path with_suffix(const std::filesystem::path& path,
                                         const std::string& suffix) {
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + suffix + path.extension().string());
  return out;
}

inline void print_summary(const std::string& label, const SweepResult& result) {
  const SweepConfig& c = result.config;
  std::printf("%s: %zu alphas in [%g, %g], %zu auctions each\n", label.c_str(), c.alphas.size(),
              c.alphas.front(), c.alphas.back(), c.auctions_per_alpha);
  std::printf("  revenue argmax alpha = %g; within %g%% of peak for alpha in [%g, %g]\n",
              result.argmax_revenue_alpha, c.flat_tolerance * 100.0,
              result.revenue_flat_region.lo, result.revenue_flat_region.hi);
}

inline int execute(const RunPlan& plan) {
  RunManifest manifest;
  manifest.started_utc = utc_timestamp();
  manifest.seed = plan.config.seed;
  manifest.seed_was_random = !plan.seed_given;
  manifest.config = config_to_json(plan.config);

  std::vector<std::pair<std::string, SweepResult>> runs;
  if (plan.mode == RunMode::sensitivity) {
    manifest.config["mode"] = "sensitivity";
    manifest.config["strengths"] = plan.mode_values;
    for (auto& [strength, result] : sensitivity_sweep(plan.config, plan.mode_values))
      runs.emplace_back(series_label(plan, strength), std::move(result));
  } else if (plan.mode == RunMode::correlation) {
    manifest.config["mode"] = "correlation";
    manifest.config["spearmans"] = plan.mode_values;
    for (auto& [rho, result] : correlation_sweep(plan.config, plan.mode_values))
      runs.emplace_back(series_label(plan, rho), std::move(result));
  } else {
    runs.emplace_back(series_label(plan, 0.0), run_sweep(plan.config));
  }

  for (const auto& [label, result] : runs) print_summary(label, result);

  if (!plan.out.empty()) {
    const std::filesystem::path base(plan.out);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::filesystem::path path =
          runs.size() == 1 ? base : with_suffix(base, mode_suffix(plan.mode, plan.mode_values[i]));
      const std::string body = csv_string(runs[i].second);
      write_csv(runs[i].second, path);
      manifest.record_output(path, body);
      std::printf("wrote %s (%zu rows)\n", path.string().c_str(), runs[i].second.rows.size());
    }
  }
  if (!plan.plot.empty()) {
    std::vector<PlotSeries> series;
    series.reserve(runs.size());
    for (const auto& [label, result] : runs) series.push_back(PlotSeries{label, &result});
    const std::string body = svg_string(series, plan.metric);
    write_plot(series, plan.metric, plan.plot);
    manifest.record_output(plan.plot, body);
    std::printf("wrote %s\n", plan.plot.c_str());
  }
  if (!plan.out.empty() || !plan.plot.empty()) {
    std::filesystem::path manifest_path(plan.out.empty() ? plan.plot : plan.out);
    manifest_path.replace_extension(".manifest.json");
    manifest.finished_utc = utc_timestamp();
    write_manifest(manifest, manifest_path);
    std::printf("wrote %s\n", manifest_path.string().c_str());
  }
  return kOk;
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Monte-Carlo sweeps of generalized second-price keyword auctions ranked by "
               "bid * ctr^alpha"};
  app.set_version_flag("--version", std::string(kVersion));
  Options opt;
  attach_options(app, opt);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }
  opt.seed_given = app.count("--seed") > 0;
  if (!opt.seed_given) {
    std::random_device device;
    opt.seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  }

  try {
    const RunPlan plan = make_plan(opt);
    std::printf("%s %s, seed %llu\n", std::string(kToolName).c_str(),
                std::string(kVersion).c_str(), static_cast<unsigned long long>(plan.config.seed));
    return execute(plan);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kIoError;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumericError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternalError;
  }
}

}  // namespace gspsim::cli
