#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "socdiff/diffusion.hpp"
#include "socdiff/metrics.hpp"
#include "socdiff/network.hpp"
#include "socdiff/random.hpp"
#include "socdiff/split.hpp"

namespace socdiff {

// Inclusive range of training degrees k_i.
struct DegreeBucket {
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;

  bool contains(std::size_t k) const { return k >= min_degree && k <= max_degree; }
  friend bool operator==(const DegreeBucket&, const DegreeBucket&) = default;
};

struct ExperimentConfig {
  double probe_fraction = 0.1;
  std::size_t runs = 10;
  std::uint64_t master_seed = 0;
  std::size_t l = 20;
  KernelSpec kernel;
  std::vector<double> parameter_grid;  // values of p (SMD) or lambda (Hybrid)
  std::vector<DegreeBucket> degree_buckets;
  std::size_t workers = 1;
  InterDiversityOptions diversity;

  // Throws ParameterError on any inconsistency.
  void validate() const;
  std::uint64_t run_seed(std::size_t run) const { return derive_seed(master_seed, run); }
};

struct RunReport {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  MetricsReport report;
};

struct EvaluationResult {
  KernelSpec kernel;
  MetricsReport mean;
  std::vector<RunReport> runs;
};

// Arithmetic mean of each metric. Optional metrics average over the reports
// that carry them; counts are averaged and rounded down.
MetricsReport average_reports(std::span<const MetricsReport> reports);

// Repeated random holdout: one split per run, seeds derived from
// (master_seed, run), metrics averaged over runs.
EvaluationResult run_evaluation(const CombinedNetwork& net, const ExperimentConfig& config);

struct SweepPoint {
  double parameter = 0.0;
  MetricsReport mean;
  std::vector<RunReport> runs;
};

struct SweepResult {
  KernelSpec kernel;
  std::vector<SweepPoint> points;  // in grid order
  // Grid value with the lowest mean RS; ties go to the larger value.
  double optimal_parameter = 0.0;

  const SweepPoint& optimum() const;
  const SweepPoint* find(double parameter) const;
};

// Evaluates every grid value on the same split within each run, so curves
// differ only by the parameter.
SweepResult sweep_parameter(const CombinedNetwork& net, const ExperimentConfig& config);

struct BucketSweep {
  DegreeBucket bucket;
  std::optional<SweepResult> result;  // absent when no run had probe-active users in the bucket
};

// Sweep whose metrics are restricted to users whose training degree falls in
// each bucket. Splits and scores are shared across buckets.
std::vector<BucketSweep> degree_group_analysis(const CombinedNetwork& net,
                                               const ExperimentConfig& config,
                                               std::span<const DegreeBucket> buckets);

// Splits sorted degree values into `parts` contiguous ranges holding roughly
// equal numbers of users. Adjacent ranges never share a degree value, so
// fewer ranges come back when the values are heavily tied.
std::vector<DegreeBucket> quantile_buckets(std::vector<std::size_t> degrees, std::size_t parts);

// Fractional improvement of a challenger over a baseline, oriented so that a
// positive value is always better. Absent when the baseline is zero and the
// values differ.
struct MetricImprovement {
  std::optional<double> rs, precision, inter_diversity, intra_diversity, coverage, novelty,
      congestion;
};

MetricImprovement improvement(const MetricsReport& challenger, const MetricsReport& baseline);

struct ColdstartResult {
  KernelSpec challenger_kernel;
  KernelSpec baseline_kernel;
  MetricsReport challenger;
  MetricsReport baseline;
  MetricImprovement improvement;
  std::vector<UserId> selected;        // users whose links were all moved to probe
  std::vector<UserId> unreachable;     // degree-eligible users without friends
  double lost_mass = 0.0;              // summed over selected users, challenger side
};

// New-user protocol: every user with k_i <= max_degree and at least one friend
// loses all its links to the probe set; the rest of the network trains. The
// challenger (config.kernel, SMD or GRM) and the baseline are scored in
// profile-free mode on the selected users only. Throws NotEvaluableError when
// no eligible user has probe links.
ColdstartResult coldstart_experiment(const CombinedNetwork& net, std::size_t max_degree,
                                     const ExperimentConfig& config,
                                     const KernelSpec& baseline = KernelSpec::grm());

// Parameters of the planted-partition generator. User u belongs to community
// u / users_per_community, item a to a / items_per_community.
struct SynthParams {
  std::size_t communities = 2;
  std::size_t users_per_community = 50;
  std::size_t items_per_community = 50;
  double intra_collect = 0.2;
  double inter_collect = 0.01;
  double intra_friend = 0.1;
  double inter_friend = 0.005;
  std::uint64_t seed = 42;
};

CombinedNetwork synth_generate(const SynthParams& params);

// Exact histogram of user degrees k_i.
std::map<std::size_t, std::size_t> degree_distribution(const BipartiteNetwork& net);

struct DatasetStats {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t user_item_links = 0;
  std::size_t social_links = 0;
  double mean_user_degree = 0.0;
  double mean_social_degree = 0.0;
};

DatasetStats dataset_stats(const CombinedNetwork& net);

}  // namespace socdiff
