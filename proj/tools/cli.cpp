#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socdiff/dataset_io.hpp"
#include "socdiff/errors.hpp"
#include "socdiff/harness.hpp"
#include "socdiff/parallel.hpp"
#include "socdiff/verify.hpp"

namespace socdiff::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "n/a"; }

// ---------------------------------------------------------------------------
// Flag groups shared by several subcommands.

struct DataFlags {
  std::string items;
  std::string social;
  std::string unknown_users = "add";
  std::string id_map;

  void attach(CLI::App* app) {
    app->add_option("--items", items, "user<TAB>item edge list")->required();
    app->add_option("--social", social, "user<TAB>user edge list")->required();
    app->add_option("--unknown-users", unknown_users,
                    "social-file users missing from the item file: add or skip")
        ->check(CLI::IsMember({"add", "skip"}));
    app->add_option("--id-map", id_map, "write the label <-> index map here");
  }

  UnknownUserRule rule() const {
    return unknown_users == "skip" ? UnknownUserRule::Skip : UnknownUserRule::Add;
  }
};

struct KernelFlags {
  std::string method = "md";
  double p = 0.0;
  double lambda = 0.0;
  int social_steps = 1;
  std::string friendless_rule = "retain";
  CLI::Option* p_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* steps_opt = nullptr;
  CLI::Option* rule_opt = nullptr;

  void attach(CLI::App* app, bool with_lambda = true) {
    app->add_option("--method", method, "md, hc, hybrid, smd or grm");
    p_opt = app->add_option("--p", p, "SMD retention fraction");
    if (with_lambda) lambda_opt = app->add_option("--lambda", lambda, "Hybrid exponent");
    steps_opt = app->add_option("--social-steps", social_steps, "SMD social diffusion rounds");
    rule_opt = app->add_option("--friendless-rule", friendless_rule,
                               "SMD users without friends: retain or drop");
  }

  bool given(const CLI::Option* o) const { return o != nullptr && o->count() > 0; }

  // With `sweep` the tunable parameter comes from the grid and must not be
  // passed explicitly.
  KernelSpec build(bool sweep) const {
    KernelSpec k;
    try {
      k.method = parse_method(method);
      k.friendless_rule = parse_friendless_rule(friendless_rule);
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
    if (given(p_opt) && k.method != Method::SMD) {
      throw UsageError("--p applies only to --method smd");
    }
    if (given(lambda_opt) && k.method != Method::Hybrid) {
      throw UsageError("--lambda applies only to --method hybrid");
    }
    if ((given(steps_opt) || given(rule_opt)) && k.method != Method::SMD) {
      throw UsageError("--social-steps and --friendless-rule apply only to --method smd");
    }
    k.social_steps = social_steps;
    if (sweep) {
      if (!k.has_parameter()) throw UsageError("--grid needs --method smd or --method hybrid");
      if (given(p_opt) || given(lambda_opt)) {
        throw UsageError("the swept parameter comes from --grid; drop --p/--lambda");
      }
      return k;
    }
    if (k.method == Method::SMD) {
      if (!given(p_opt)) throw UsageError("--method smd needs --p");
      k.p = p;
    }
    if (k.method == Method::Hybrid) {
      if (!given(lambda_opt)) throw UsageError("--method hybrid needs --lambda");
      k.lambda = lambda;
    }
    return k;
  }
};

struct RunFlags {
  double probe_fraction = 0.1;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::size_t top_l = 20;
  std::string out;
  std::string format = "csv";
  std::size_t workers = 0;
  std::size_t diversity_sample_above = 0;
  std::size_t diversity_samples = 200000;
  CLI::Option* workers_opt = nullptr;

  void attach(CLI::App* app, bool with_runs = true) {
    if (with_runs) {
      app->add_option("--probe-fraction", probe_fraction, "share of links held out per run");
      app->add_option("--runs", runs, "independent random splits");
    }
    app->add_option("--seed", seed, "master seed");
    app->add_option("--top-l", top_l, "recommendation list length L");
    app->add_option("--out", out, "report path");
    app->add_option("--format", format, "report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    workers_opt = app->add_option("--workers", workers,
                                  "worker threads (default: $SOCDIFF_WORKERS, then all cores)");
    app->add_option("--diversity-sample-above", diversity_sample_above,
                    "sample user pairs for inter-diversity above this many pairs (0: never)");
    app->add_option("--diversity-samples", diversity_samples, "pairs drawn when sampling");
  }

  std::size_t resolve_workers() const {
    if (workers_opt->count() > 0) {
      if (workers == 0) throw UsageError("--workers must be positive");
      return workers;
    }
    if (const char* env = std::getenv("SOCDIFF_WORKERS"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (*end != '\0' || v == 0) throw UsageError("SOCDIFF_WORKERS must be a positive integer");
      return static_cast<std::size_t>(v);
    }
    return default_workers();
  }

  ExperimentConfig config(const KernelSpec& kernel) const {
    ExperimentConfig c;
    c.probe_fraction = probe_fraction;
    c.runs = runs;
    c.master_seed = seed;
    c.l = top_l;
    c.kernel = kernel;
    c.workers = resolve_workers();
    c.diversity.sample_above_pairs = diversity_sample_above;
    c.diversity.sample_pairs = diversity_samples;
    c.diversity.seed = seed;
    return c;
  }
};

void check_config(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
}

// "start:stop:step", inclusive of stop when the steps land on it.
std::vector<double> parse_grid(const std::string& text) {
  double v[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string::npos) throw UsageError("--grid must look like start:stop:step");
    const std::string part = text.substr(pos, end - pos);
    char* stop = nullptr;
    v[i] = std::strtod(part.c_str(), &stop);
    if (part.empty() || *stop != '\0') throw UsageError("--grid has a non-numeric field: " + text);
    pos = end + 1;
  }
  const double start = v[0], stop = v[1], step = v[2];
  if (!(step > 0.0)) throw UsageError("--grid step must be positive");
  if (start > stop) throw UsageError("--grid is inverted (start > stop)");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 100000) throw UsageError("--grid has too many points");
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Round away the binary noise of start + i*step so echoed values read 0.3, not
    // 0.30000000000000004.
    double g = std::strtod(fmt(start + static_cast<double>(i) * step, "%.12g").c_str(), nullptr);
    grid.push_back(std::min(g, stop));
  }
  return grid;
}

Dataset load(const DataFlags& data, std::ostream& err) {
  Dataset d = load_dataset(data.items, data.social, data.rule());
  if (d.bipartite_stats.duplicates_collapsed > 0) {
    err << "note: " << d.bipartite_stats.duplicates_collapsed
        << " duplicate user-item links collapsed\n";
  }
  if (d.social_stats.self_loops_dropped > 0) {
    err << "note: " << d.social_stats.self_loops_dropped << " social self-loops dropped\n";
  }
  if (d.unknown_social_users > 0) {
    err << "note: " << d.unknown_social_users << " social-file users not in the item file ("
        << (data.rule() == UnknownUserRule::Add ? "added" : "skipped") << ")\n";
  }
  if (!data.id_map.empty()) write_id_map(d.ids, data.id_map);
  return d;
}

std::string summary(const MetricsReport& r) {
  return "RS=" + fmt(r.rs) + " P=" + fmt(r.precision) + " H=" + fmt(r.inter_diversity) +
         " I=" + fmt(r.intra_diversity) + " Cov=" + fmt(r.coverage) + " N=" + fmt(r.novelty) +
         " C=" + fmt(r.congestion);
}

ReportFormat format_of(const RunFlags& run) { return parse_report_format(run.format); }

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_stats(const DataFlags& data, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  const Dataset d = load(data, err);
  const DatasetStats s = dataset_stats(d.network);
  out << "n\t" << s.n_users << "\n"
      << "m\t" << s.n_items << "\n"
      << "E_UO\t" << s.user_item_links << "\n"
      << "E_UU\t" << s.social_links << "\n"
      << "mean_k\t" << fmt(s.mean_user_degree) << "\n"
      << "mean_K\t" << fmt(s.mean_social_degree) << "\n";
  if (!out_path.empty()) write_degree_histogram(degree_distribution(d.network.bipartite()), out_path);
  return kExitOk;
}

int cmd_evaluate(const DataFlags& data, const KernelFlags& kf, const RunFlags& rf,
                 std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = rf.config(kf.build(false));
  check_config(config);
  const auto format = format_of(rf);
  const Dataset d = load(data, err);
  const EvaluationResult result = run_evaluation(d.network, config);
  if (!rf.out.empty()) write_report(result, config, rf.out, format);
  out << config.kernel.describe() << ": " << summary(result.mean) << " (runs "
      << result.runs.size() << ", users " << result.mean.users_evaluated << ", lists "
      << result.mean.lists_evaluated << ")\n";
  return kExitOk;
}

int cmd_sweep(const DataFlags& data, const KernelFlags& kf, const RunFlags& rf,
              const std::string& grid_text, std::ostream& out, std::ostream& err) {
  const auto grid = parse_grid(grid_text);
  ExperimentConfig config = rf.config(kf.build(true).with_parameter(grid.front()));
  config.parameter_grid = grid;
  check_config(config);
  const auto format = format_of(rf);
  const Dataset d = load(data, err);
  const SweepResult result = sweep_parameter(d.network, config);
  if (!rf.out.empty()) write_report(result, config, rf.out, format);
  const char* name = config.kernel.method == Method::SMD ? "p" : "lambda";
  for (const auto& point : result.points) {
    out << name << "=" << fmt(point.parameter) << " " << summary(point.mean) << "\n";
  }
  out << "optimal " << name << "=" << fmt(result.optimal_parameter)
      << " RS=" << fmt(result.optimum().mean.rs) << "\n";
  return kExitOk;
}

int cmd_coldstart(const DataFlags& data, const KernelFlags& kf, const RunFlags& rf,
                  std::size_t max_degree, std::ostream& out, std::ostream& err) {
  const KernelSpec kernel = kf.build(false);
  if (kernel.method != Method::SMD && kernel.method != Method::GRM) {
    throw UsageError("coldstart compares --method smd (or grm) against GRM");
  }
  const ExperimentConfig config = rf.config(kernel);
  check_config(config);
  const auto format = format_of(rf);
  const Dataset d = load(data, err);
  const ColdstartResult r = coldstart_experiment(d.network, max_degree, config);
  if (!r.unreachable.empty()) {
    err << "note: " << r.unreachable.size()
        << " users within the degree limit have no friends and were left out\n";
  }
  if (!rf.out.empty()) write_report(r, config, max_degree, rf.out, format);
  out << "cold-start users: " << r.selected.size() << " (max degree " << max_degree << ")\n";
  out << "metric\t" << r.challenger_kernel.describe() << "\t" << r.baseline_kernel.describe()
      << "\timprovement\n";
  const auto row = [&](const char* name, const std::optional<double>& a,
                       const std::optional<double>& b, const std::optional<double>& imp) {
    out << name << "\t" << fmt(a) << "\t" << fmt(b) << "\t" << fmt(imp) << "\n";
  };
  const auto& c = r.challenger;
  const auto& b = r.baseline;
  const auto& i = r.improvement;
  row("rs", c.rs, b.rs, i.rs);
  row("precision", c.precision, b.precision, i.precision);
  row("inter_diversity", c.inter_diversity, b.inter_diversity, i.inter_diversity);
  row("intra_diversity", c.intra_diversity, b.intra_diversity, i.intra_diversity);
  row("coverage", c.coverage, b.coverage, i.coverage);
  row("novelty", c.novelty, b.novelty, i.novelty);
  row("congestion", c.congestion, b.congestion, i.congestion);
  return kExitOk;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  const auto checks = run_oracle_suite(options);
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (checks " << c.checks << ", worst "
        << fmt(c.worst, "%.3g") << ")";
    if (!c.passed) out << ": " << c.counterexample;
    out << "\n";
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_synth(const SynthParams& params, const std::string& items, const std::string& social) {
  const CombinedNetwork net = synth_generate(params);
  write_bipartite_file(net.bipartite(), nullptr, items);
  write_social_file(net.social(), nullptr, social);
  return kExitOk;
}

// Splices `key = value` lines of the file named by --config into the
// argument list as `--key value`, skipping keys already given as flags so that
// flags always win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path || rest.empty()) return args;

  const auto given = [&rest](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(), [&flag](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
      s = s.substr(1, s.size() - 2);
    }
    return s;
  };

  std::ifstream in(*path);
  if (!in) throw DataError("cannot open config file " + *path);
  std::vector<std::string> injected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError(*path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = trim(t.substr(eq + 1));
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    injected.push_back(flag);
    if (value != "true") injected.push_back(value);
  }
  // rest[0] is the subcommand; file values go right after it.
  rest.insert(rest.begin() + 1, injected.begin(), injected.end());
  return rest;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diffusion-based recommendation on user-item and social networks", "socdiff"};
  app.require_subcommand(1);

  std::string config_path;
  const auto with_config = [&config_path](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value file; explicit flags override it");
  };

  DataFlags stats_data;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "dataset statistics and degree histogram");
  stats_data.attach(stats);
  stats->add_option("--out", stats_out, "degree histogram CSV");
  with_config(stats);

  DataFlags eval_data;
  KernelFlags eval_kernel;
  RunFlags eval_run;
  auto* evaluate = app.add_subcommand("evaluate", "repeated holdout evaluation of one kernel");
  eval_data.attach(evaluate);
  eval_kernel.attach(evaluate);
  eval_run.attach(evaluate);
  with_config(evaluate);

  DataFlags sweep_data;
  KernelFlags sweep_kernel;
  RunFlags sweep_run;
  std::string grid;
  auto* sweep = app.add_subcommand("sweep", "evaluate a grid of p (smd) or lambda (hybrid)");
  sweep_data.attach(sweep);
  sweep_kernel.attach(sweep);
  sweep_run.attach(sweep);
  sweep->add_option("--grid", grid, "start:stop:step")->required();
  with_config(sweep);

  DataFlags cold_data;
  KernelFlags cold_kernel;
  RunFlags cold_run;
  std::size_t max_degree = 0;
  auto* coldstart = app.add_subcommand("coldstart", "new-user comparison against GRM");
  cold_data.attach(coldstart);
  cold_kernel.attach(coldstart, false);
  cold_run.attach(coldstart, false);
  coldstart->add_option("--max-degree", max_degree, "users with at most this many links")
      ->required();
  with_config(coldstart);

  VerifyOptions verify_options;
  std::string verify_rule = "retain";
  bool oracle = false;
  auto* verify = app.add_subcommand("verify", "property checks on random small instances");
  verify->add_flag("--oracle", oracle, "compare the sparse kernels with dense transfer matrices");
  verify->add_option("--seed", verify_options.seed, "seed of the first instance");
  verify->add_option("--instances", verify_options.instances, "number of random instances");
  verify->add_option("--friendless-rule", verify_rule,
                     "rule used by the mass-conservation check: retain or drop")
      ->check(CLI::IsMember({"retain", "drop"}));

  SynthParams synth_params;
  std::string synth_items, synth_social;
  auto* synth = app.add_subcommand("synth", "write a planted-partition fixture");
  synth->add_option("--items-out", synth_items, "user-item edge list to write")->required();
  synth->add_option("--social-out", synth_social, "social edge list to write")->required();
  synth->add_option("--communities", synth_params.communities);
  synth->add_option("--users-per-community", synth_params.users_per_community);
  synth->add_option("--items-per-community", synth_params.items_per_community);
  synth->add_option("--intra-collect", synth_params.intra_collect);
  synth->add_option("--inter-collect", synth_params.inter_collect);
  synth->add_option("--intra-friend", synth_params.intra_friend);
  synth->add_option("--inter-friend", synth_params.inter_friend);
  synth->add_option("--seed", synth_params.seed);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const DataError& e) {
    err << "socdiff: " << e.what() << "\n";
    return kExitFailure;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == static_cast<int>(CLI::ExitCodes::Success) ? kExitOk : kExitUsage;
  }

  try {
    if (stats->parsed()) return cmd_stats(stats_data, stats_out, out, err);
    if (evaluate->parsed()) return cmd_evaluate(eval_data, eval_kernel, eval_run, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_data, sweep_kernel, sweep_run, grid, out, err);
    if (coldstart->parsed()) {
      return cmd_coldstart(cold_data, cold_kernel, cold_run, max_degree, out, err);
    }
    if (verify->parsed()) {
      if (!oracle) throw UsageError("verify runs the oracle suite; pass --oracle");
      if (verify_options.instances == 0) throw UsageError("--instances must be positive");
      verify_options.conservation_rule = parse_friendless_rule(verify_rule);
      return cmd_verify(verify_options, out);
    }
    if (synth->parsed()) return cmd_synth(synth_params, synth_items, synth_social);
  } catch (const UsageError& e) {
    err << "socdiff: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "socdiff: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotEvaluableError& e) {
    err << "socdiff: nothing to evaluate: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "socdiff: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace socdiff::cli
