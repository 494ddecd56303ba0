#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "socdiff/diffusion.hpp"
#include "socdiff/network.hpp"
#include "socdiff/split.hpp"

namespace socdiff {

struct RecommendationList {
  UserId target = 0;
  std::vector<ItemId> items;
};

// Top-L uncollected items by descending score, ties broken by ascending item
// index. training_profile must be sorted. Throws ParameterError when fewer
// than L uncollected items exist or L is zero.
RecommendationList top_l(const ScoreVector& scores, std::span<const ItemId> training_profile,
                         std::size_t l);

// Mean normalised rank of the probe items among the U = m - |profile|
// uncollected items, ranked by descending score with tied blocks sharing their
// mid-rank. Throws NotEvaluableError for an empty probe set.
double ranking_score_user(const ScoreVector& scores, std::span<const ItemId> training_profile,
                          std::span<const ItemId> probe_items);

// |list ∩ probe| / L. probe_items must be sorted.
double precision_user(const RecommendationList& list, std::span<const ItemId> probe_items);

struct InterDiversityOptions {
  // Switch to pair sampling once the number of user pairs exceeds this value.
  // Zero keeps the exact computation regardless of size.
  std::uint64_t sample_above_pairs = 0;
  std::uint64_t sample_pairs = 200000;
  std::uint64_t seed = 0;
};

struct SampledDiversity {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t pairs = 0;
};

// Mean Hamming distance 1 - C_ij / L over all unordered pairs of lists.
// Throws ParameterError for fewer than two lists.
double inter_diversity(std::span<const RecommendationList> lists, std::size_t l,
                       const InterDiversityOptions& options = {});

// Estimate from `samples` uniformly drawn distinct pairs.
SampledDiversity inter_diversity_sampled(std::span<const RecommendationList> lists,
                                         std::size_t l, std::uint64_t samples,
                                         std::uint64_t seed);

// Cosine similarity of the items' collector sets. Degree-0 items are
// dissimilar to everything.
double item_cosine_similarity(const BipartiteNetwork& net, ItemId alpha, ItemId beta);

// Mean pairwise cosine similarity within one list. Requires L >= 2.
double intra_diversity_user(const BipartiteNetwork& net, const RecommendationList& list);

double coverage(std::span<const RecommendationList> lists, std::size_t n_items);

// Mean training degree of the recommended items.
double novelty_user(const BipartiteNetwork& training, const RecommendationList& list);

// Gini coefficient of a non-negative sample, zero entries included.
// Throws NotEvaluableError when the sample sums to zero.
double gini_coefficient(std::vector<double> values);

// Gini coefficient of per-item recommendation counts over all m items.
double congestion(std::span<const RecommendationList> lists, std::size_t n_items);

struct MetricsReport {
  double rs = 0.0;
  double precision = 0.0;
  std::optional<double> inter_diversity;  // absent with fewer than two lists
  std::optional<double> intra_diversity;  // absent when L < 2
  double coverage = 0.0;
  double novelty = 0.0;
  double congestion = 0.0;
  std::size_t l = 0;
  std::size_t users_evaluated = 0;  // users entering RS and P
  std::size_t lists_evaluated = 0;  // users entering H, I, N, Cov, C

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Per-user intermediate results shared by every aggregate.
struct UserOutcome {
  UserId user = 0;
  std::size_t training_degree = 0;
  std::optional<double> rs;         // present iff the user has probe links
  std::optional<double> precision;  // present iff rs and list are present
  std::optional<RecommendationList> list;  // absent when fewer than L candidates
};

struct Evaluation {
  std::vector<UserOutcome> users;  // ascending user index
  std::size_t n_items = 0;
  std::size_t l = 0;
};

using Scorer = std::function<ScoreVector(UserId)>;

// Scores every target once and derives its RS, precision and top-L list.
// Results are independent of the worker count.
Evaluation evaluate_users(const BipartiteNetwork& training, std::span<const UserItemEdge> probe,
                          std::span<const UserId> targets, const Scorer& scorer, std::size_t l,
                          std::size_t workers = 1);

// Aggregates the seven metrics over the users accepted by `include` (all when
// empty). Throws NotEvaluableError when no included user has probe links or
// no included user has a list.
MetricsReport summarize(const Evaluation& evaluation, const BipartiteNetwork& training,
                        const std::function<bool(const UserOutcome&)>& include = {},
                        const InterDiversityOptions& diversity = {});

struct EvaluateOptions {
  std::size_t workers = 1;
  InterDiversityOptions diversity;
};

// Standard protocol: every user with a non-empty training profile is scored.
// RS and P average over those with probe links; the list metrics use all of them.
Evaluation evaluate_split(const CombinedNetwork& training, const LinkSplit& split,
                          const KernelSpec& spec, std::size_t l, std::size_t workers = 1);

MetricsReport evaluate_all(const CombinedNetwork& training, const LinkSplit& split,
                           const KernelSpec& spec, std::size_t l,
                           const EvaluateOptions& options = {});

}  // namespace socdiff
