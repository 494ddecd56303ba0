#include "socdiff/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "socdiff/errors.hpp"
#include "socdiff/random.hpp"

namespace socdiff {

LinkSplit split_links(const BipartiteNetwork& net, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ParameterError("probe fraction must lie strictly between 0 and 1");
  }
  auto edges = net.edges();
  const auto total = edges.size();
  const auto probe_count =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  Rng rng(seed);
  for (std::size_t i = 0; i < probe_count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(edges[i], edges[j]);
  }
  LinkSplit split;
  split.seed = seed;
  split.n_users = net.n_users();
  split.n_items = net.n_items();
  split.probe.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(probe_count));
  split.training.assign(edges.begin() + static_cast<std::ptrdiff_t>(probe_count), edges.end());
  std::sort(split.probe.begin(), split.probe.end());
  std::sort(split.training.begin(), split.training.end());
  return split;
}

BipartiteNetwork training_network(const LinkSplit& split) {
  return build_bipartite(split.training, split.n_users, split.n_items);
}

CombinedNetwork training_network(const LinkSplit& split, const SocialNetwork& social) {
  return combine(training_network(split), social);
}

void ExperimentConfig::validate() const {
  if (!(probe_fraction > 0.0 && probe_fraction < 1.0)) {
    throw ParameterError("probe fraction must lie strictly between 0 and 1");
  }
  if (runs == 0) throw ParameterError("runs must be positive");
  if (l == 0) throw ParameterError("list length L must be positive");
  kernel.validate();
  for (double v : parameter_grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("grid values must lie in [0, 1]");
  }
  if (!parameter_grid.empty() && !kernel.has_parameter()) {
    throw ParameterError(std::string(to_string(kernel.method)) + " has no parameter to sweep");
  }
  for (const auto& b : degree_buckets) {
    if (b.min_degree > b.max_degree) throw ParameterError("degree bucket with min > max");
  }
}

namespace {

struct OptionalMean {
  double sum = 0.0;
  std::size_t count = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  std::optional<double> value() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

void require_grid(const ExperimentConfig& config) {
  config.validate();
  if (config.parameter_grid.empty()) throw ParameterError("parameter grid is empty");
}

SweepResult finish_sweep(KernelSpec kernel, std::vector<SweepPoint> points) {
  SweepResult result;
  result.kernel = std::move(kernel);
  result.points = std::move(points);
  const SweepPoint* best = nullptr;
  for (const auto& point : result.points) {
    if (!best || point.mean.rs < best->mean.rs ||
        (point.mean.rs == best->mean.rs && point.parameter > best->parameter)) {
      best = &point;
    }
  }
  result.optimal_parameter = best->parameter;
  return result;
}

}  // namespace

MetricsReport average_reports(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw NotEvaluableError("no reports to average");
  MetricsReport out;
  OptionalMean inter, intra;
  double rs = 0, precision = 0, cov = 0, novelty = 0, congestion = 0;
  std::size_t users = 0, lists = 0;
  for (const auto& r : reports) {
    rs += r.rs;
    precision += r.precision;
    cov += r.coverage;
    novelty += r.novelty;
    congestion += r.congestion;
    inter.add(r.inter_diversity);
    intra.add(r.intra_diversity);
    users += r.users_evaluated;
    lists += r.lists_evaluated;
  }
  const auto k = static_cast<double>(reports.size());
  out.rs = rs / k;
  out.precision = precision / k;
  out.coverage = cov / k;
  out.novelty = novelty / k;
  out.congestion = congestion / k;
  out.inter_diversity = inter.value();
  out.intra_diversity = intra.value();
  out.l = reports.front().l;
  out.users_evaluated = users / reports.size();
  out.lists_evaluated = lists / reports.size();
  return out;
}

EvaluationResult run_evaluation(const CombinedNetwork& net, const ExperimentConfig& config) {
  config.validate();
  EvaluationResult result;
  result.kernel = config.kernel;
  std::vector<MetricsReport> reports;
  for (std::size_t run = 0; run < config.runs; ++run) {
    const auto seed = config.run_seed(run);
    const auto split = split_links(net.bipartite(), config.probe_fraction, seed);
    const auto training = training_network(split, net.social());
    const auto report = evaluate_all(training, split, config.kernel, config.l,
                                     {config.workers, config.diversity});
    result.runs.push_back({run, seed, report});
    reports.push_back(report);
  }
  result.mean = average_reports(reports);
  return result;
}

const SweepPoint& SweepResult::optimum() const {
  const auto* p = find(optimal_parameter);
  if (!p) throw NotEvaluableError("sweep has no points");
  return *p;
}

const SweepPoint* SweepResult::find(double parameter) const {
  for (const auto& point : points)
    if (point.parameter == parameter) return &point;
  return nullptr;
}

SweepResult sweep_parameter(const CombinedNetwork& net, const ExperimentConfig& config) {
  require_grid(config);
  const auto& grid = config.parameter_grid;
  std::vector<SweepPoint> points(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) points[g].parameter = grid[g];

  for (std::size_t run = 0; run < config.runs; ++run) {
    const auto seed = config.run_seed(run);
    const auto split = split_links(net.bipartite(), config.probe_fraction, seed);
    const auto training = training_network(split, net.social());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto report = evaluate_all(training, split, config.kernel.with_parameter(grid[g]),
                                       config.l, {config.workers, config.diversity});
      points[g].runs.push_back({run, seed, report});
    }
  }
  for (auto& point : points) {
    std::vector<MetricsReport> reports;
    for (const auto& r : point.runs) reports.push_back(r.report);
    point.mean = average_reports(reports);
  }
  return finish_sweep(config.kernel, std::move(points));
}

std::vector<BucketSweep> degree_group_analysis(const CombinedNetwork& net,
                                               const ExperimentConfig& config,
                                               std::span<const DegreeBucket> buckets) {
  require_grid(config);
  const auto& grid = config.parameter_grid;
  // points[bucket][grid]
  std::vector<std::vector<SweepPoint>> points(buckets.size(),
                                              std::vector<SweepPoint>(grid.size()));
  for (std::size_t run = 0; run < config.runs; ++run) {
    const auto seed = config.run_seed(run);
    const auto split = split_links(net.bipartite(), config.probe_fraction, seed);
    const auto training = training_network(split, net.social());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto evaluation = evaluate_split(training, split, config.kernel.with_parameter(grid[g]),
                                             config.l, config.workers);
      for (std::size_t b = 0; b < buckets.size(); ++b) {
        const auto bucket = buckets[b];
        bool has_probe = false, has_list = false;
        for (const auto& user : evaluation.users) {
          if (!bucket.contains(user.training_degree)) continue;
          has_probe = has_probe || user.rs.has_value();
          has_list = has_list || user.list.has_value();
        }
        if (!has_probe || !has_list) continue;
        const auto report = summarize(
            evaluation, training.bipartite(),
            [&](const UserOutcome& u) { return bucket.contains(u.training_degree); },
            config.diversity);
        points[b][g].runs.push_back({run, seed, report});
      }
    }
  }

  std::vector<BucketSweep> out;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    BucketSweep entry{buckets[b], std::nullopt};
    if (!points[b].front().runs.empty()) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        auto& point = points[b][g];
        point.parameter = grid[g];
        std::vector<MetricsReport> reports;
        for (const auto& r : point.runs) reports.push_back(r.report);
        point.mean = average_reports(reports);
      }
      entry.result = finish_sweep(config.kernel, std::move(points[b]));
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<DegreeBucket> quantile_buckets(std::vector<std::size_t> degrees, std::size_t parts) {
  if (parts == 0) throw ParameterError("bucket count must be positive");
  if (degrees.empty()) return {};
  std::sort(degrees.begin(), degrees.end());
  std::vector<DegreeBucket> out;
  std::size_t start = 0;
  for (std::size_t part = 0; part < parts && start < degrees.size(); ++part) {
    std::size_t end = (degrees.size() * (part + 1)) / parts;  // exclusive
    if (end <= start) continue;
    // Extend the range over the whole tied block of its last value.
    while (end < degrees.size() && degrees[end] == degrees[end - 1]) ++end;
    if (part + 1 == parts) end = degrees.size();
    out.push_back({degrees[start], degrees[end - 1]});
    start = end;
  }
  return out;
}

namespace {

std::optional<double> relative_gain(double challenger, double baseline, bool higher_is_better) {
  if (challenger == baseline) return 0.0;
  if (baseline == 0.0) return std::nullopt;
  const double diff = higher_is_better ? challenger - baseline : baseline - challenger;
  return diff / baseline;
}

std::optional<double> relative_gain(const std::optional<double>& challenger,
                                    const std::optional<double>& baseline, bool higher_is_better) {
  if (!challenger || !baseline) return std::nullopt;
  return relative_gain(*challenger, *baseline, higher_is_better);
}

Scorer profile_free_scorer(const KernelSpec& spec, const CombinedNetwork& training,
                           std::vector<double>& lost) {
  switch (spec.method) {
    case Method::SMD:
      return [&, spec](UserId u) {
        auto s = coldstart_scores(training, u, *spec.p, spec.social_steps, spec.friendless_rule);
        lost[u] = s.lost_mass;
        return s;
      };
    case Method::GRM:
      return [&](UserId u) { return grm_scores(training.bipartite(), u); };
    default:
      throw ParameterError(std::string(to_string(spec.method)) +
                           " cannot score users without a profile; use smd or grm");
  }
}

}  // namespace

MetricImprovement improvement(const MetricsReport& challenger, const MetricsReport& baseline) {
  MetricImprovement out;
  out.rs = relative_gain(challenger.rs, baseline.rs, false);
  out.precision = relative_gain(challenger.precision, baseline.precision, true);
  out.inter_diversity =
      relative_gain(challenger.inter_diversity, baseline.inter_diversity, true);
  out.intra_diversity =
      relative_gain(challenger.intra_diversity, baseline.intra_diversity, false);
  out.coverage = relative_gain(challenger.coverage, baseline.coverage, true);
  out.novelty = relative_gain(challenger.novelty, baseline.novelty, false);
  out.congestion = relative_gain(challenger.congestion, baseline.congestion, false);
  return out;
}

ColdstartResult coldstart_experiment(const CombinedNetwork& net, std::size_t max_degree,
                                     const ExperimentConfig& config,
                                     const KernelSpec& baseline) {
  config.validate();
  baseline.validate();
  const auto& bip = net.bipartite();
  ColdstartResult result;
  result.challenger_kernel = config.kernel;
  result.baseline_kernel = baseline;

  std::vector<char> selected(net.n_users(), 0);
  for (UserId u = 0; u < net.n_users(); ++u) {
    if (bip.user_degree(u) > max_degree) continue;
    if (net.social().social_degree(u) == 0) {
      result.unreachable.push_back(u);
      continue;
    }
    selected[u] = 1;
    result.selected.push_back(u);
  }

  LinkSplit split;
  split.n_users = net.n_users();
  split.n_items = net.n_items();
  for (const auto& e : bip.edges()) (selected[e.user] ? split.probe : split.training).push_back(e);
  if (split.probe.empty()) {
    throw NotEvaluableError("no eligible users: nobody with k_i <= " + std::to_string(max_degree) +
                            " has both a friend and a link to hold out (" +
                            std::to_string(result.unreachable.size()) +
                            " degree-eligible users have no friends)");
  }
  const auto training = training_network(split, net.social());

  std::vector<double> lost(net.n_users(), 0.0), unused(net.n_users(), 0.0);
  const auto run = [&](const KernelSpec& spec, std::vector<double>& lost_slot) {
    const auto scorer = profile_free_scorer(spec, training, lost_slot);
    const auto evaluation = evaluate_users(training.bipartite(), split.probe, result.selected,
                                           scorer, config.l, config.workers);
    return summarize(evaluation, training.bipartite(), {}, config.diversity);
  };
  result.challenger = run(config.kernel, lost);
  result.baseline = run(baseline, unused);
  for (UserId u : result.selected) result.lost_mass += lost[u];
  result.improvement = improvement(result.challenger, result.baseline);
  return result;
}

std::map<std::size_t, std::size_t> degree_distribution(const BipartiteNetwork& net) {
  std::map<std::size_t, std::size_t> histogram;
  for (UserId u = 0; u < net.n_users(); ++u) ++histogram[net.user_degree(u)];
  return histogram;
}

DatasetStats dataset_stats(const CombinedNetwork& net) {
  DatasetStats s;
  s.n_users = net.n_users();
  s.n_items = net.n_items();
  s.user_item_links = net.bipartite().n_edges();
  s.social_links = net.social().n_edges();
  if (s.n_users > 0) {
    s.mean_user_degree = static_cast<double>(s.user_item_links) / static_cast<double>(s.n_users);
    s.mean_social_degree =
        2.0 * static_cast<double>(s.social_links) / static_cast<double>(s.n_users);
  }
  return s;
}

}  // namespace socdiff
