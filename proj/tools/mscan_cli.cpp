// mscan: command-line front end for the multiscale submatrix scan library.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mscan.hpp"

namespace {

using mscan::Index;
using json = nlohmann::ordered_json;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

/// Reported with exit code 1 (bad combination of otherwise well-formed flags).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MSCAN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("MSCAN_SEED is not an unsigned integer: ") + env);
    }
  }
  return 100;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<mscan::Family> parse_families(const std::string& s) {
  std::vector<mscan::Family> out;
  for (const auto& name : split_list(s)) {
    auto f = mscan::parse_family(name);
    if (!f) throw UsageError("unknown family '" + name + "'");
    out.push_back(*f);
  }
  return out;
}

std::vector<mscan::Method> parse_methods(const std::string& s) {
  std::vector<mscan::Method> out;
  for (const auto& name : split_list(s)) {
    auto m = mscan::parse_method(name);
    if (!m) throw UsageError("unknown method '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

/// Fills every option of `sub` not given on the command line from the JSON
/// config named by its --config option. Keys are long option names without dashes.
void merge_config(CLI::App* sub, const std::string& config_path) {
  if (config_path.empty()) return;
  const nlohmann::json cfg = mscan::read_json_file(config_path);
  if (!cfg.is_object()) throw mscan::InputError("config '" + config_path + "' is not a JSON object");
  // --theta and --theta-mult are one choice: a command-line pick of either overrides both.
  const bool theta_on_cli = [&] {
    for (const char* name : {"--theta", "--theta-mult"}) {
      if (auto* opt = sub->get_option_no_throw(name); opt && opt->count() > 0) return true;
    }
    return false;
  }();
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("config key '" + key + "' is not an option of " + sub->get_name());
    if (opt->count() > 0) continue;
    if (theta_on_cli && (key == "theta" || key == "theta-mult")) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_array()) {
      for (const auto& v : value) {
        if (!text.empty()) text += ',';
        text += v.is_string() ? v.get<std::string>() : v.dump();
      }
    } else {
      text = value.dump();
    }
    opt->add_result(text);
    opt->run_callback();
  }
}

/// Effective option values of a subcommand, for provenance sidecars.
json effective_config(const CLI::App* sub) {
  json j;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      j[name] = opt->as<std::string>();
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string config, family = "gaussian", out, truth;
  Index M = 100, N = 120, m = 10, n = 12;
  std::optional<double> theta, theta_mult;
  std::optional<std::uint64_t> seed;
};

int run_generate(const GenerateArgs& a, const CLI::App* sub) {
  if (a.out.empty()) throw UsageError("generate: --out is required");
  if (a.theta && a.theta_mult) throw UsageError("generate: give --theta or --theta-mult, not both");
  mscan::GenerationSpec spec;
  const auto family = mscan::parse_family(a.family);
  if (!family) throw UsageError("unknown family '" + a.family + "'");
  spec.family = *family;
  spec.M = a.M;
  spec.N = a.N;
  spec.m_star = a.m;
  spec.n_star = a.n;
  if (a.theta_mult) {
    spec.theta = *a.theta_mult * mscan::theta_crit(a.M, a.N, a.m, a.n);
  } else {
    spec.theta = a.theta.value_or(0.0);
  }
  spec.seed = a.seed ? *a.seed : default_seed();
  const auto [X, truth] = mscan::generate(spec);
  mscan::write_matrix_csv(a.out, X);
  json sidecar = mscan::selection_to_json(truth, mscan::mscan_objective(X, truth));
  sidecar["spec"] = mscan::spec_to_json(spec);
  sidecar["config"] = effective_config(sub);
  const std::string truth_path = a.truth.empty() ? a.out + ".json" : a.truth;
  mscan::write_text_file(truth_path, sidecar.dump(2) + "\n");
  return 0;
}

struct LocalizeArgs {
  std::string config, input, method = "adaptive", truth;
  std::optional<std::uint64_t> seed;
  Index m0 = 25, n0 = 25, restarts = 50, max_outer = 100;
  std::optional<Index> mbar, nbar;
  Index inner_restarts = 1;
  double delta = 0.0;
  unsigned threads = 1;
};

int run_localize(const LocalizeArgs& a) {
  if (a.input.empty()) throw UsageError("localize: --input is required");
  const auto method = mscan::parse_method(a.method);
  if (!method) throw UsageError("unknown method '" + a.method + "'");
  const mscan::DataMatrix X = mscan::read_matrix_csv(a.input);
  mscan::ExperimentConfig cfg;
  cfg.adaptive.m0 = std::min(a.m0, X.rows());
  cfg.adaptive.n0 = std::min(a.n0, X.cols());
  cfg.adaptive.restarts = a.restarts;
  cfg.adaptive.max_outer_iterations = a.max_outer;
  cfg.adaptive.penalty.delta = a.delta;
  cfg.adaptive.threads = a.threads;
  cfg.gss.m_bar = a.mbar.value_or(std::min<Index>(500, X.rows()));
  cfg.gss.n_bar = a.nbar.value_or(std::min<Index>(500, X.cols()));
  cfg.gss.inner_las_restarts = a.inner_restarts;
  cfg.gss.penalty.delta = a.delta;
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  const mscan::Selection sel = mscan::localize(X, *method, cfg, seed);
  json out = mscan::selection_to_json(sel, mscan::mscan_objective(X, sel, {a.delta}));
  out["method"] = std::string(mscan::to_string(*method));
  if (!a.truth.empty()) {
    const auto truth = mscan::selection_from_json(mscan::read_json_file(a.truth), X.rows(), X.cols());
    out["err"] = mscan::err_measure(sel, truth);
  }
  print_json(out);
  return 0;
}

struct OracleArgs {
  std::string config, input;
  double delta = 0.0;
};

int run_oracle(const OracleArgs& a) {
  if (a.input.empty()) throw UsageError("oracle: --input is required");
  const mscan::DataMatrix X = mscan::read_matrix_csv(a.input);
  const mscan::ScanResult r = mscan::exhaustive_mscan(X, {a.delta});
  print_json(mscan::selection_to_json(r.selection, r.objective));
  return 0;
}

struct BenchArgs {
  std::string config, preset = "paper", design = "balanced", families, methods, out, svg;
  std::optional<double> theta_min, theta_max, theta_step;
  std::optional<Index> reps;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool record_timing = false;
};

mscan::ExperimentConfig bench_config(const BenchArgs& a, bool timing) {
  const bool desk = a.preset == "desk";
  if (!desk && a.preset != "paper") throw UsageError("unknown preset '" + a.preset + "'");
  mscan::Design design;
  if (timing) {
    design = desk ? mscan::designs::desk_timing() : mscan::designs::timing();
  } else if (a.design == "balanced") {
    design = desk ? mscan::designs::desk_balanced() : mscan::designs::balanced();
  } else if (a.design == "imbalanced") {
    design = desk ? mscan::designs::desk_imbalanced() : mscan::designs::imbalanced();
  } else {
    throw UsageError("unknown design '" + a.design + "'");
  }
  mscan::ExperimentConfig cfg =
      timing ? (desk ? mscan::desk_timing_preset(design) : mscan::paper_timing_preset(design))
             : (desk ? mscan::desk_error_preset(design) : mscan::paper_error_preset(design));
  if (!a.families.empty()) cfg.families = parse_families(a.families);
  if (!a.methods.empty()) cfg.methods = parse_methods(a.methods);
  if (a.theta_min || a.theta_max || a.theta_step) {
    const double lo = a.theta_min.value_or(cfg.theta_grid.front());
    const double hi = a.theta_max.value_or(cfg.theta_grid.back());
    const double step = a.theta_step.value_or(0.1);
    cfg.theta_grid = mscan::theta_grid(lo, hi, step);
  }
  if (a.reps) cfg.replications = *a.reps;
  cfg.seed = a.seed ? *a.seed : default_seed();
  cfg.threads = a.threads;
  return cfg;
}

int run_bench(const BenchArgs& a, bool timing, const CLI::App* sub) {
  if (a.out.empty()) throw UsageError(std::string(sub->get_name()) + ": --out is required");
  const mscan::ExperimentConfig cfg = bench_config(a, timing);
  const auto rows = timing ? mscan::run_timing(cfg) : mscan::run_error_curve(cfg);
  std::ostringstream csv;
  mscan::write_results_csv(csv, rows, timing || a.record_timing);
  mscan::write_text_file(a.out, csv.str());
  json sidecar;
  sidecar["design"] = {{"name", cfg.design.name},     {"M", cfg.design.M},
                       {"N", cfg.design.N},           {"m", cfg.design.m_star},
                       {"n", cfg.design.n_star},
                       {"theta_crit", mscan::theta_crit(cfg.design.M, cfg.design.N,
                                                        cfg.design.m_star, cfg.design.n_star)}};
  sidecar["theta_grid"] = cfg.theta_grid;
  sidecar["replications"] = cfg.replications;
  sidecar["seed"] = cfg.seed;
  sidecar["config"] = effective_config(sub);
  mscan::write_text_file(a.out + ".json", sidecar.dump(2) + "\n");
  if (!a.svg.empty()) mscan::write_text_file(a.svg, mscan::error_curve_svg(rows));
  return 0;
}

struct UnimodalityArgs {
  std::string config, design = "balanced", out, display_out, svg;
  Index restarts = 100;
  std::optional<std::uint64_t> seed;
  std::optional<Index> mbar, nbar;
  std::optional<double> theta_mult;
  unsigned threads = 1;
};

int run_unimodality(const UnimodalityArgs& a, const CLI::App* sub) {
  if (a.out.empty()) throw UsageError("unimodality: --out is required");
  mscan::LandscapeDesign d;
  if (a.design == "balanced") {
    d = mscan::designs::landscape_balanced();
  } else if (a.design == "imbalanced") {
    d = mscan::designs::landscape_imbalanced();
  } else {
    throw UsageError("unknown design '" + a.design + "'");
  }
  if (a.mbar) d.m_bar = *a.mbar;
  if (a.nbar) d.n_bar = *a.nbar;
  if (a.theta_mult) d.theta_mult = *a.theta_mult;
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  const mscan::Landscape grid = mscan::unimodality_grid(d, a.restarts, seed, a.threads);

  std::ostringstream raw;
  mscan::write_grid_csv(raw, grid.values, grid.n_bar);
  mscan::write_text_file(a.out, raw.str());
  const std::string display_path = a.display_out.empty() ? a.out + ".display.csv" : a.display_out;
  std::ostringstream shown;
  mscan::write_grid_csv(shown, grid.display(), grid.n_bar);
  mscan::write_text_file(display_path, shown.str());

  const auto [am, an] = grid.argmax();
  json sidecar;
  sidecar["design"] = {{"name", d.name}, {"M", d.M},         {"N", d.N},
                       {"m", d.m_star},  {"n", d.n_star},    {"mbar", d.m_bar},
                       {"nbar", d.n_bar}, {"theta_mult", d.theta_mult},
                       {"theta", d.theta_mult * mscan::theta_crit(d.M, d.N, d.m_star, d.n_star)}};
  sidecar["las_restarts"] = a.restarts;
  sidecar["seed"] = seed;
  sidecar["argmax"] = {am, an};
  sidecar["display_csv"] = display_path;
  sidecar["config"] = effective_config(sub);
  mscan::write_text_file(a.out + ".json", sidecar.dump(2) + "\n");
  if (!a.svg.empty()) mscan::write_text_file(a.svg, mscan::level_plot_svg(grid));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale scan statistic: localize an anomalous submatrix of unknown size"};
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1, 1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a planted-block matrix CSV and truth JSON");
  generate->add_option("--config", gen.config, "JSON file of option values");
  generate->add_option("--family", gen.family, "gaussian | poisson | rademacher");
  generate->add_option("--M", gen.M, "Rows")->check(CLI::PositiveNumber);
  generate->add_option("--N", gen.N, "Columns")->check(CLI::PositiveNumber);
  generate->add_option("--m", gen.m, "Planted rows")->check(CLI::PositiveNumber);
  generate->add_option("--n", gen.n, "Planted columns")->check(CLI::PositiveNumber);
  generate->add_option("--theta", gen.theta, "Absolute natural parameter");
  generate->add_option("--theta-mult", gen.theta_mult, "Multiple of theta_crit(M, N, m, n)");
  generate->add_option("--seed", gen.seed, "RNG seed (default: $MSCAN_SEED or 100)");
  generate->add_option("--out", gen.out, "Matrix CSV path");
  generate->add_option("--truth", gen.truth, "Truth JSON path (default: <out>.json)");

  LocalizeArgs loc;
  auto* localize = app.add_subcommand("localize", "Localize the anomalous block of a matrix CSV");
  localize->add_option("--config", loc.config, "JSON file of option values");
  localize->add_option("--input", loc.input, "Matrix CSV");
  localize->add_option("--method", loc.method, "adaptive | gss | spectral | gmg");
  localize->add_option("--seed", loc.seed, "RNG seed (default: $MSCAN_SEED or 100)");
  localize->add_option("--m0", loc.m0, "Adaptive LAS initial rows");
  localize->add_option("--n0", loc.n0, "Adaptive LAS initial columns");
  localize->add_option("--restarts", loc.restarts, "Adaptive LAS random restarts");
  localize->add_option("--max-outer", loc.max_outer, "Adaptive LAS outer iteration cap");
  localize->add_option("--mbar", loc.mbar, "GSS row bound (default min(500, M))");
  localize->add_option("--nbar", loc.nbar, "GSS column bound (default min(500, N))");
  localize->add_option("--inner-restarts", loc.inner_restarts, "LAS runs per GSS evaluation");
  localize->add_option("--delta", loc.delta, "Penalty inflation delta >= 0");
  localize->add_option("--threads", loc.threads, "Worker threads, 0 = auto");
  localize->add_option("--truth", loc.truth, "Truth JSON; adds err to the output");

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "Exact multiscale scan by enumeration (M <= 20)");
  oracle->add_option("--config", orc.config, "JSON file of option values");
  oracle->add_option("--input", orc.input, "Matrix CSV");
  oracle->add_option("--delta", orc.delta, "Penalty inflation delta >= 0");

  BenchArgs err_args, time_args;
  auto add_bench_options = [](CLI::App* sub, BenchArgs& b) {
    sub->add_option("--config", b.config, "JSON file of option values");
    sub->add_option("--preset", b.preset, "paper | desk");
    sub->add_option("--design", b.design, "balanced | imbalanced");
    sub->add_option("--families", b.families, "Comma list of families");
    sub->add_option("--methods", b.methods, "Comma list of adaptiveLas,gss,spectral,gmg");
    sub->add_option("--theta-min", b.theta_min, "First theta multiplier");
    sub->add_option("--theta-max", b.theta_max, "Last theta multiplier");
    sub->add_option("--theta-step", b.theta_step, "Multiplier step");
    sub->add_option("--reps", b.reps, "Replications per grid point");
    sub->add_option("--seed", b.seed, "RNG seed (default: $MSCAN_SEED or 100)");
    sub->add_option("--threads", b.threads, "Worker threads, 0 = auto");
    sub->add_option("--out", b.out, "Results CSV");
    sub->add_option("--svg", b.svg, "Optional SVG plot of mean err");
  };
  auto* bench_error = app.add_subcommand("bench-error", "Error-count curves over theta");
  add_bench_options(bench_error, err_args);
  bench_error->add_flag("--record-timing", err_args.record_timing,
                        "Fill the millis column (output is then not byte-reproducible)");
  auto* bench_time = app.add_subcommand("bench-time", "Computing-time experiment");
  add_bench_options(bench_time, time_args);

  UnimodalityArgs uni;
  auto* unimodality = app.add_subcommand("unimodality", "f_X(m, n) landscape on [mbar] x [nbar]");
  unimodality->add_option("--config", uni.config, "JSON file of option values");
  unimodality->add_option("--design", uni.design, "balanced | imbalanced");
  unimodality->add_option("--restarts", uni.restarts, "LAS random starts per (m, n)");
  unimodality->add_option("--mbar", uni.mbar, "Row bound override");
  unimodality->add_option("--nbar", uni.nbar, "Column bound override");
  unimodality->add_option("--theta-mult", uni.theta_mult, "Signal multiple of theta_crit");
  unimodality->add_option("--seed", uni.seed, "RNG seed (default: $MSCAN_SEED or 100)");
  unimodality->add_option("--threads", uni.threads, "Worker threads, 0 = auto");
  unimodality->add_option("--out", uni.out, "Raw grid CSV");
  unimodality->add_option("--display-out", uni.display_out, "Display grid CSV");
  unimodality->add_option("--svg", uni.svg, "Optional SVG level plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (auto* cfg = sub->get_option_no_throw("--config"); cfg && cfg->count() > 0) {
      merge_config(sub, cfg->as<std::string>());
    }
    if (sub == generate) return run_generate(gen, sub);
    if (sub == localize) return run_localize(loc);
    if (sub == oracle) return run_oracle(orc);
    if (sub == bench_error) return run_bench(err_args, false, sub);
    if (sub == bench_time) return run_bench(time_args, true, sub);
    if (sub == unimodality) return run_unimodality(uni, sub);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const mscan::GuardViolation& e) {
    std::cerr << "guard violation: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const mscan::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
