// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails. Tolerances are fixed constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "socdiff/dataset_io.hpp"
#include "socdiff/diffusion.hpp"
#include "socdiff/errors.hpp"
#include "socdiff/harness.hpp"
#include "socdiff/metrics.hpp"
#include "socdiff/parallel.hpp"
#include "socdiff/random.hpp"
#include "socdiff/verify.hpp"
#include "toy_networks.hpp"

#ifdef SOCDIFF_ACCEPTANCE_WITH_CLI
#include "cli.hpp"
#endif

using namespace socdiff;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kOracleInstances = 50;
constexpr std::uint64_t kOracleSeed = 20240601;
constexpr double kOracleTolerance = 1e-10;
constexpr double kDegeneracyTolerance = 1e-12;
constexpr double kConservationTolerance = 1e-9;  // relative
constexpr double kCosineTolerance = 1e-15;
constexpr double kOracleSeconds = 10.0;
constexpr double kSyntheticSeconds = 300.0;
constexpr double kDatasetSeconds = 1800.0;
constexpr double kDatasetRsTolerance = 0.01;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Outcome {
  enum class Status { Pass, Fail, Skip } status = Status::Pass;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::Skip, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return ok ? pass(std::move(d)) : fail(std::move(d)); }

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = fail(std::string("exception: ") + e.what());
  }
  const char* tag = o.status == Outcome::Status::Pass   ? "PASS"
                    : o.status == Outcome::Status::Fail ? "FAIL"
                                                        : "SKIP";
  if (o.status == Outcome::Status::Fail) ++failures;
  std::printf("%s %-3s %s: %s\n", tag, id, title, o.detail.c_str());
  std::fflush(stdout);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::vector<CombinedNetwork> oracle_instances() {
  std::vector<CombinedNetwork> out;
  for (std::size_t k = 0; k < kOracleInstances; ++k) {
    out.push_back(random_instance(derive_seed(kOracleSeed, k), 15, 20, 0.3));
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::vector<KernelSpec> specs{KernelSpec::md(), KernelSpec::hc()};
  for (double lambda : {0.0, 0.3, 0.7, 1.0}) specs.push_back(KernelSpec::hybrid(lambda));
  for (double p : {0.0, 0.5, 1.0}) specs.push_back(KernelSpec::smd(p, 1, FriendlessRule::Drop));

  double worst = 0.0;
  std::size_t vectors = 0;
  std::string where;
  for (std::size_t k = 0; k < kOracleInstances; ++k) {
    const auto net = random_instance(derive_seed(kOracleSeed, k), 15, 20, 0.3);
    for (const auto& spec : specs) {
      const auto w = transfer_matrix(spec, net);
      for (UserId u = 0; u < net.n_users(); ++u) {
        const auto expected = w.apply(initial_resource(net.bipartite(), u));
        const double d = max_abs_diff(compute_scores(spec, net, u).scores, expected);
        ++vectors;
        if (d > worst) {
          worst = d;
          where = spec.describe() + " instance " + std::to_string(k) + " user " + std::to_string(u);
        }
      }
    }
  }
  const double secs = seconds_since(start);
  return verdict(worst <= kOracleTolerance && secs < kOracleSeconds,
                 std::to_string(vectors) + " score vectors, worst " + num(worst) + " (" + where +
                     ") <= " + num(kOracleTolerance) + ", " + num(secs, "%.2f") + " s < " +
                     num(kOracleSeconds, "%.0f") + " s");
}

Outcome degeneracy() {
  double worst = 0.0;
  std::size_t checks = 0;
  for (const auto& net : oracle_instances()) {
    const auto& bip = net.bipartite();
    for (UserId u = 0; u < net.n_users(); ++u) {
      const auto md = md_scores(bip, u).scores;
      const auto hc = hc_scores(bip, u).scores;
      worst = std::max(worst, max_abs_diff(smd_scores(net, u, 1.0).scores, md));
      worst = std::max(worst, max_abs_diff(hybrid_scores(bip, u, 1.0).scores, md));
      worst = std::max(worst, max_abs_diff(hybrid_scores(bip, u, 0.0).scores, hc));
      checks += 3;
    }
  }
  return verdict(worst <= kDegeneracyTolerance,
                 std::to_string(checks) + " identities (SMD p=1 = MD, Hybrid 1 = MD, Hybrid 0 = HC)"
                 ", worst " + num(worst) + " <= " + num(kDegeneracyTolerance));
}

Outcome conservation_and_support() {
  double worst = 0.0;
  std::size_t conserved = 0, support_checks = 0, support_violations = 0;
  for (const auto& net : oracle_instances()) {
    const auto& bip = net.bipartite();
    for (UserId u = 0; u < net.n_users(); ++u) {
      const double k = static_cast<double>(bip.user_degree(u));
      const auto md = md_scores(bip, u);
      worst = std::max(worst, std::abs(md.total() - k) / k);
      for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        worst = std::max(worst,
                         std::abs(smd_scores(net, u, p, 1, FriendlessRule::Retain).total() - k) / k);
      }
      conserved += 6;
      for (double p : {0.25, 0.5, 0.75}) {
        const auto smd = smd_scores(net, u, p);
        for (ItemId a = 0; a < net.n_items(); ++a) {
          ++support_checks;
          if (md.scores[a] > 0.0 && !(smd.scores[a] > 0.0)) ++support_violations;
        }
      }
    }
  }
  return verdict(worst <= kConservationTolerance && support_violations == 0,
                 std::to_string(conserved) + " sums, worst relative error " + num(worst) +
                     " <= " + num(kConservationTolerance) + "; support violations " +
                     std::to_string(support_violations) + " of " + std::to_string(support_checks));
}

Outcome metric_goldens() {
  std::vector<std::string> bad;
  const auto check = [&bad](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  const auto toy2 = testing::toy2();
  const auto profile = toy2.bipartite().items_of(0);
  const std::vector<ItemId> probe{1};
  check(ranking_score_user(md_scores(toy2.bipartite(), 0), profile, probe) == 0.75, "RS MD 0.75");
  check(ranking_score_user(smd_scores(toy2, 0, 0.5), profile, probe) == 0.5, "RS SMD 0.5");

  check(gini_coefficient({1, 1, 1, 1}) == 0.0, "Gini 0");
  check(gini_coefficient({0, 0, 0, 4}) == 0.75, "Gini 0.75");
  check(gini_coefficient({1, 2, 3, 4}) == 0.25, "Gini 0.25");

  const auto list = [](std::vector<ItemId> items) { return RecommendationList{0, std::move(items)}; };
  check(inter_diversity(std::vector{list({1, 2}), list({2, 1})}, 2) == 0.0, "Hamming 0");
  check(inter_diversity(std::vector{list({1, 2}), list({3, 4})}, 2) == 1.0, "Hamming 1");
  check(inter_diversity(std::vector{list({1, 2, 3, 4}), list({3, 4, 5, 6})}, 4) == 0.5,
        "Hamming 0.5");

  const auto toy1 = testing::toy1();
  check(std::abs(item_cosine_similarity(toy1, 1, 1) - 1.0) <= kCosineTolerance, "cosine 1");
  check(std::abs(item_cosine_similarity(toy1, 0, 1) - 1.0 / std::sqrt(2.0)) <= kCosineTolerance,
        "cosine 1/sqrt(2)");

  if (!bad.empty()) {
    std::string d = "mismatched:";
    for (const auto& b : bad) d += " [" + b + "]";
    return fail(d);
  }
  return pass("RS 0.75/0.5, Gini 0/0.75/0.25, Hamming 0/1/0.5 exact; cosine 1 and 1/sqrt(2) within " +
              num(kCosineTolerance));
}

// ---------------------------------------------------------------------------
// Synthetic directional checks share one fixture and configuration.

struct Synthetic {
  CombinedNetwork net = synth_generate(SynthParams{});
  ExperimentConfig config;
  SweepResult sweep;
  Clock::time_point start = Clock::now();

  Synthetic() {
    config.master_seed = 42;
    config.runs = 10;
    config.l = 20;
    config.probe_fraction = 0.1;
    config.kernel = KernelSpec::smd(0.0);
    for (int i = 0; i <= 20; ++i) config.parameter_grid.push_back(i / 20.0);
    sweep = sweep_parameter(net, config);
  }

  double md_rs() const { return sweep.find(1.0)->mean.rs; }
};

Outcome synthetic_optimum(const Synthetic& s) {
  const double best = s.sweep.optimum().mean.rs;
  const double md = s.md_rs();
  return verdict(best < md && s.sweep.optimal_parameter < 1.0,
                 "p* = " + num(s.sweep.optimal_parameter) + ", RS(SMD p*) = " + num(best, "%.6f") +
                     " < RS(MD) = " + num(md, "%.6f"));
}

Outcome synthetic_terciles(const Synthetic& s) {
  // Terciles of the training degree of evaluable users in the first run.
  const auto split = split_links(s.net.bipartite(), s.config.probe_fraction, s.config.run_seed(0));
  const auto training = training_network(split);
  std::vector<std::size_t> degrees;
  for (UserId u = 0; u < training.n_users(); ++u) {
    if (training.user_degree(u) > 0) degrees.push_back(training.user_degree(u));
  }
  const auto buckets = quantile_buckets(degrees, 3);
  if (buckets.size() < 2) return fail("degree values too tied to form terciles");
  const auto groups = degree_group_analysis(s.net, s.config, buckets);
  const auto gain = [](const BucketSweep& g) {
    const double md = g.result->find(1.0)->mean.rs;
    return (md - g.result->optimum().mean.rs) / md;
  };
  const auto& low = groups.front();
  const auto& high = groups.back();
  if (!low.result || !high.result) return fail("a tercile had no evaluable users");
  const double g_low = gain(low), g_high = gain(high);
  const auto range = [](const DegreeBucket& b) {
    return "[" + std::to_string(b.min_degree) + "," + std::to_string(b.max_degree) + "]";
  };
  return verdict(g_low > g_high,
                 "relative RS gain at per-tercile p*: low k " + range(low.bucket) + " " +
                     num(g_low) + " > high k " + range(high.bucket) + " " + num(g_high));
}

Outcome synthetic_tiny_spread(const Synthetic& s) {
  ExperimentConfig c = s.config;
  c.parameter_grid = {1.0 - 1e-8, 1.0};
  const auto sweep = sweep_parameter(s.net, c);
  const auto& near = sweep.points[0].runs;
  const auto& md = sweep.points[1].runs;
  std::size_t ok = 0;
  double worst = -1.0, mean = 0.0;
  for (std::size_t r = 0; r < near.size(); ++r) {
    const double diff = near[r].report.rs - md[r].report.rs;
    worst = std::max(worst, diff);
    mean += diff / static_cast<double>(near.size());
    if (diff <= 0.0) ++ok;
  }
  return verdict(ok == near.size(), std::to_string(ok) + "/" + std::to_string(near.size()) +
                                        " runs with RS(1-1e-8) <= RS(1), largest difference " +
                                        num(worst) + ", mean difference " + num(mean));
}

Outcome synthetic_coldstart(const Synthetic& s) {
  ExperimentConfig c = s.config;
  c.parameter_grid.clear();
  c.kernel = KernelSpec::smd(s.sweep.optimal_parameter);
  const auto r = coldstart_experiment(s.net, 3, c);
  const double smd_rs = r.challenger.rs, grm_rs = r.baseline.rs;
  const double smd_h = r.challenger.inter_diversity.value_or(0.0);
  const double grm_h = r.baseline.inter_diversity.value_or(0.0);
  return verdict(smd_rs < grm_rs && smd_h > grm_h,
                 std::to_string(r.selected.size()) + " new users, SMD(p=" +
                     num(s.sweep.optimal_parameter) + ") RS " + num(smd_rs, "%.6f") + " < GRM " +
                     num(grm_rs, "%.6f") + ", H " + num(smd_h, "%.6f") + " > GRM " +
                     num(grm_h, "%.6f"));
}

// ---------------------------------------------------------------------------

struct Benchmark {
  const char* name;
  const char* items_env;
  const char* social_env;
  std::size_t n, m, e_uo, e_uu;
  double rs_md;
  double p;
  double rs_smd;
};

Outcome dataset_reproduction() {
  const Benchmark sets[] = {
      {"Friendfeed", "SOCDIFF_FRIENDFEED_ITEMS", "SOCDIFF_FRIENDFEED_SOCIAL", 4148, 5700, 96942,
       265497, 0.1064, 0.71, 0.0948},
      {"Epinions", "SOCDIFF_EPINIONS_ITEMS", "SOCDIFF_EPINIONS_SOCIAL", 4066, 7649, 154122, 167717,
       0.1731, 0.77, 0.1696},
  };
  std::string detail;
  bool any = false, ok = true;
  for (const auto& b : sets) {
    const char* items = std::getenv(b.items_env);
    const char* social = std::getenv(b.social_env);
    if (items == nullptr || social == nullptr) continue;
    any = true;
    const auto start = Clock::now();
    const auto data = load_dataset(items, social);
    const auto stats = dataset_stats(data.network);
    const bool stats_ok = stats.n_users == b.n && stats.n_items == b.m &&
                          stats.user_item_links == b.e_uo && stats.social_links == b.e_uu;
    ExperimentConfig c;
    c.runs = 10;
    c.master_seed = 42;
    c.workers = default_workers();
    c.kernel = KernelSpec::md();
    const double md = run_evaluation(data.network, c).mean.rs;
    c.kernel = KernelSpec::smd(b.p);
    const double smd = run_evaluation(data.network, c).mean.rs;
    const double secs = seconds_since(start);
    const bool rs_ok = std::abs(md - b.rs_md) <= kDatasetRsTolerance &&
                       std::abs(smd - b.rs_smd) <= kDatasetRsTolerance;
    const bool time_ok = secs < kDatasetSeconds;
    ok = ok && stats_ok && rs_ok && time_ok;
    detail += std::string(b.name) + ": n=" + std::to_string(stats.n_users) +
              " m=" + std::to_string(stats.n_items) + " E_UO=" +
              std::to_string(stats.user_item_links) + " E_UU=" + std::to_string(stats.social_links) +
              (stats_ok ? " (match)" : " (MISMATCH)") + ", RS(MD)=" + num(md) +
              " RS(SMD p=" + num(b.p) + ")=" + num(smd) + (rs_ok ? " (within 0.01)" : " (OFF)") +
              ", " + num(secs, "%.0f") + " s; ";
  }
  if (!any) {
    return skip("no dataset files supplied (set SOCDIFF_FRIENDFEED_ITEMS/_SOCIAL or "
                "SOCDIFF_EPINIONS_ITEMS/_SOCIAL)");
  }
  return verdict(ok, detail);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "socdiff_acceptance";
  fs::create_directories(dir);
  const auto net = synth_generate({.users_per_community = 30, .items_per_community = 30});
  std::size_t compared = 0;
  std::vector<std::string> differing;

  const auto compare = [&](const std::string& name, const std::function<void(std::size_t,
                                                                             const fs::path&)>& make) {
    std::string reference;
    for (std::size_t workers : {1, 1, 2, 4}) {
      const auto path = dir / (name + "_" + std::to_string(workers));
      make(workers, path);
      const auto bytes = slurp(path);
      if (reference.empty()) {
        reference = bytes;
      } else if (bytes != reference) {
        differing.push_back(name + " at " + std::to_string(workers) + " workers");
      }
      ++compared;
    }
  };

  ExperimentConfig c;
  c.runs = 3;
  c.master_seed = 7;
  c.l = 10;
  for (auto format : {ReportFormat::Csv, ReportFormat::Json}) {
    const std::string ext = format == ReportFormat::Csv ? "csv" : "json";
    compare("evaluate." + ext, [&](std::size_t w, const fs::path& p) {
      auto cw = c;
      cw.workers = w;
      cw.kernel = KernelSpec::smd(0.6);
      write_report(run_evaluation(net, cw), cw, p, format);
    });
    compare("sweep." + ext, [&](std::size_t w, const fs::path& p) {
      auto cw = c;
      cw.workers = w;
      cw.kernel = KernelSpec::hybrid(0.0);
      cw.parameter_grid = {0.0, 0.5, 1.0};
      write_report(sweep_parameter(net, cw), cw, p, format);
    });
    compare("coldstart." + ext, [&](std::size_t w, const fs::path& p) {
      auto cw = c;
      cw.workers = w;
      cw.kernel = KernelSpec::smd(0.5);
      write_report(coldstart_experiment(net, 4, cw), cw, 4, p, format);
    });
  }
  compare("sampled_diversity.csv", [&](std::size_t w, const fs::path& p) {
    auto cw = c;
    cw.workers = w;
    cw.diversity = {.sample_above_pairs = 10, .sample_pairs = 500, .seed = 3};
    write_report(run_evaluation(net, cw), cw, p, ReportFormat::Csv);
  });

#ifdef SOCDIFF_ACCEPTANCE_WITH_CLI
  const auto items = (dir / "items.tsv").string(), social = (dir / "social.tsv").string();
  write_bipartite_file(net.bipartite(), nullptr, items);
  write_social_file(net.social(), nullptr, social);
  const auto cli = [&](std::vector<std::string> args, std::size_t w, const fs::path& p) {
    args.insert(args.begin(), "socdiff");
    for (const auto& a : {std::string("--items"), items, std::string("--social"), social,
                          std::string("--workers"), std::to_string(w), std::string("--out"),
                          p.string()}) {
      args.push_back(a);
    }
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) {
      throw Error("cli failed: " + err.str());
    }
  };
  compare("cli_evaluate.json", [&](std::size_t w, const fs::path& p) {
    cli({"evaluate", "--method", "md", "--runs", "10", "--seed", "7", "--format", "json"}, w, p);
  });
  compare("cli_sweep.csv", [&](std::size_t w, const fs::path& p) {
    cli({"sweep", "--method", "smd", "--grid", "0:1:0.25", "--runs", "3", "--seed", "7"}, w, p);
  });
  compare("cli_coldstart.csv", [&](std::size_t w, const fs::path& p) {
    cli({"coldstart", "--method", "smd", "--p", "0.5", "--max-degree", "4"}, w, p);
  });
#endif

  if (!differing.empty()) {
    std::string d = "reports differ:";
    for (const auto& x : differing) d += " [" + x + "]";
    return fail(d);
  }
  return pass(std::to_string(compared) +
              " report files byte-identical across repeats and 1/2/4 workers");
}

}  // namespace

int main() {
  report("1", "oracle equivalence", oracle_equivalence);
  report("2", "degeneracy identities", degeneracy);
  report("3", "conservation and support", conservation_and_support);
  report("4", "metric golden values", metric_goldens);

  const auto start = Clock::now();
  std::unique_ptr<Synthetic> synthetic;
  std::string setup_error;
  try {
    synthetic = std::make_unique<Synthetic>();
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  const auto with_fixture = [&](Outcome (*body)(const Synthetic&)) {
    return [&, body]() -> Outcome {
      if (!synthetic) return fail("synthetic sweep failed: " + setup_error);
      return body(*synthetic);
    };
  };
  report("5a", "synthetic: SMD optimum beats MD with p* < 1", with_fixture(synthetic_optimum));
  report("5b", "synthetic: low-degree tercile gains more", with_fixture(synthetic_terciles));
  report("5c", "synthetic: RS(1-1e-8) <= RS(1) per run", with_fixture(synthetic_tiny_spread));
  report("5d", "synthetic: cold-start SMD beats GRM", with_fixture(synthetic_coldstart));
  const double synth_secs = seconds_since(start);
  report("5", "synthetic runtime", [&] {
    return verdict(synth_secs < kSyntheticSeconds, num(synth_secs, "%.1f") + " s < " +
                                                       num(kSyntheticSeconds, "%.0f") + " s");
  });

  report("6", "dataset reproduction", dataset_reproduction);
  report("7", "determinism", determinism);

  std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed"
                                    : ("acceptance: " + std::to_string(failures) +
                                       " criteria failed").c_str());
  return failures == 0 ? 0 : 1;
}
