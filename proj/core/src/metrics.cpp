#include "socdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "socdiff/errors.hpp"
#include "socdiff/parallel.hpp"
#include "socdiff/random.hpp"

namespace socdiff {

namespace {

std::vector<char> profile_mask(std::size_t n_items, std::span<const ItemId> profile) {
  std::vector<char> mask(n_items, 0);
  for (ItemId a : profile) mask.at(a) = 1;
  return mask;
}

std::size_t common_items(const RecommendationList& x, const RecommendationList& y) {
  std::vector<ItemId> a = x.items, b = y.items;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t common = 0;
  for (auto i = a.begin(), j = b.begin(); i != a.end() && j != b.end();) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

// Neumaier summation; aggregates over many users stay order-insensitive to
// well below reporting precision.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

RecommendationList top_l(const ScoreVector& scores, std::span<const ItemId> training_profile,
                         std::size_t l) {
  if (l == 0) throw ParameterError("list length L must be positive");
  const auto mask = profile_mask(scores.scores.size(), training_profile);
  std::vector<ItemId> candidates;
  candidates.reserve(scores.scores.size());
  for (ItemId a = 0; a < scores.scores.size(); ++a)
    if (!mask[a]) candidates.push_back(a);
  if (candidates.size() < l) {
    throw ParameterError("L = " + std::to_string(l) + " exceeds the " +
                         std::to_string(candidates.size()) + " uncollected items of user " +
                         std::to_string(scores.target));
  }
  const auto& s = scores.scores;
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(l),
                    candidates.end(), [&](ItemId x, ItemId y) {
                      return s[x] != s[y] ? s[x] > s[y] : x < y;
                    });
  candidates.resize(l);
  return {scores.target, std::move(candidates)};
}

double ranking_score_user(const ScoreVector& scores, std::span<const ItemId> training_profile,
                          std::span<const ItemId> probe_items) {
  if (probe_items.empty()) {
    throw NotEvaluableError("user " + std::to_string(scores.target) + " has no probe items");
  }
  const auto mask = profile_mask(scores.scores.size(), training_profile);
  std::vector<double> uncollected;
  uncollected.reserve(scores.scores.size());
  for (ItemId a = 0; a < scores.scores.size(); ++a)
    if (!mask[a]) uncollected.push_back(scores.scores[a]);
  std::sort(uncollected.begin(), uncollected.end(), std::greater<>());
  const auto total = static_cast<double>(uncollected.size());

  double sum = 0.0;
  for (ItemId a : probe_items) {
    if (mask.at(a)) {
      throw DataError("probe item " + std::to_string(a) + " is in the training profile of user " +
                      std::to_string(scores.target));
    }
    const double s = scores.scores[a];
    auto [lo, hi] = std::equal_range(uncollected.begin(), uncollected.end(), s, std::greater<>());
    const auto above = static_cast<double>(lo - uncollected.begin());
    const auto tied = static_cast<double>(hi - lo);
    sum += (above + (tied + 1.0) / 2.0) / total;
  }
  return sum / static_cast<double>(probe_items.size());
}

double precision_user(const RecommendationList& list, std::span<const ItemId> probe_items) {
  if (list.items.empty()) throw ParameterError("empty recommendation list");
  std::size_t hits = 0;
  for (ItemId a : list.items)
    if (std::binary_search(probe_items.begin(), probe_items.end(), a)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(list.items.size());
}

double inter_diversity(std::span<const RecommendationList> lists, std::size_t l,
                       const InterDiversityOptions& options) {
  if (lists.size() < 2) throw ParameterError("inter-user diversity needs at least two lists");
  if (l == 0) throw ParameterError("list length L must be positive");
  const auto n = static_cast<std::uint64_t>(lists.size());
  const std::uint64_t pairs = n * (n - 1) / 2;
  if (options.sample_above_pairs != 0 && pairs > options.sample_above_pairs) {
    return inter_diversity_sampled(lists, l, options.sample_pairs, options.seed).mean;
  }
  // Summing C_ij over all pairs equals summing c(c-1)/2 over items, where c is
  // the number of lists containing the item.
  std::vector<std::uint64_t> counts;
  for (const auto& list : lists) {
    for (ItemId a : list.items) {
      if (a >= counts.size()) counts.resize(a + 1, 0);
      ++counts[a];
    }
  }
  long double common = 0;
  for (auto c : counts) common += static_cast<long double>(c) * (c - 1) / 2;
  return static_cast<double>(1.0L - common / (static_cast<long double>(l) * pairs));
}

SampledDiversity inter_diversity_sampled(std::span<const RecommendationList> lists,
                                         std::size_t l, std::uint64_t samples,
                                         std::uint64_t seed) {
  if (lists.size() < 2) throw ParameterError("inter-user diversity needs at least two lists");
  if (samples == 0) throw ParameterError("sample count must be positive");
  Rng rng(seed);
  const auto n = static_cast<std::uint64_t>(lists.size());
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto i = rng.below(n);
    auto j = rng.below(n - 1);
    if (j >= i) ++j;
    const double h =
        1.0 - static_cast<double>(common_items(lists[i], lists[j])) / static_cast<double>(l);
    sum += h;
    sum_sq += h * h;
  }
  const double k = static_cast<double>(samples);
  SampledDiversity out;
  out.mean = sum / k;
  out.pairs = samples;
  if (samples > 1) {
    const double var = std::max(0.0, (sum_sq - k * out.mean * out.mean) / (k - 1.0));
    out.standard_error = std::sqrt(var / k);
  }
  return out;
}

double item_cosine_similarity(const BipartiteNetwork& net, ItemId alpha, ItemId beta) {
  const auto x = net.users_of(alpha);
  const auto y = net.users_of(beta);
  if (x.empty() || y.empty()) return 0.0;
  std::size_t common = 0;
  for (auto i = x.begin(), j = y.begin(); i != x.end() && j != y.end();) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) /
         std::sqrt(static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

double intra_diversity_user(const BipartiteNetwork& net, const RecommendationList& list) {
  const std::size_t l = list.items.size();
  if (l < 2) throw ParameterError("intra-user diversity needs L >= 2");
  // Cosine similarity is symmetric, so the ordered-pair sum is twice the
  // unordered one.
  double sum = 0.0;
  for (std::size_t x = 0; x < l; ++x)
    for (std::size_t y = x + 1; y < l; ++y)
      sum += item_cosine_similarity(net, list.items[x], list.items[y]);
  return 2.0 * sum / (static_cast<double>(l) * static_cast<double>(l - 1));
}

double coverage(std::span<const RecommendationList> lists, std::size_t n_items) {
  if (n_items == 0) throw ParameterError("coverage needs at least one item");
  std::vector<char> seen(n_items, 0);
  std::size_t distinct = 0;
  for (const auto& list : lists)
    for (ItemId a : list.items)
      if (!seen.at(a)) {
        seen[a] = 1;
        ++distinct;
      }
  return static_cast<double>(distinct) / static_cast<double>(n_items);
}

double novelty_user(const BipartiteNetwork& training, const RecommendationList& list) {
  if (list.items.empty()) throw ParameterError("empty recommendation list");
  double sum = 0.0;
  for (ItemId a : list.items) sum += static_cast<double>(training.item_degree(a));
  return sum / static_cast<double>(list.items.size());
}

double gini_coefficient(std::vector<double> values) {
  if (values.empty()) throw NotEvaluableError("gini coefficient of an empty sample");
  std::sort(values.begin(), values.end());
  double total = 0.0, weighted = 0.0;
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r] < 0.0) throw ParameterError("gini coefficient needs non-negative values");
    total += values[r];
    weighted += static_cast<double>(r + 1) * values[r];
  }
  if (total == 0.0) throw NotEvaluableError("gini coefficient of an all-zero sample");
  const auto m = static_cast<double>(values.size());
  return 2.0 * weighted / (m * total) - (m + 1.0) / m;
}

double congestion(std::span<const RecommendationList> lists, std::size_t n_items) {
  std::vector<double> counts(n_items, 0.0);
  for (const auto& list : lists)
    for (ItemId a : list.items) counts.at(a) += 1.0;
  return gini_coefficient(std::move(counts));
}

Evaluation evaluate_users(const BipartiteNetwork& training, std::span<const UserItemEdge> probe,
                          std::span<const UserId> targets, const Scorer& scorer, std::size_t l,
                          std::size_t workers) {
  if (l == 0) throw ParameterError("list length L must be positive");
  // Probe items grouped per user; the probe edges are sorted by (user, item).
  std::vector<std::size_t> first(training.n_users() + 1, 0);
  for (const auto& e : probe) {
    if (e.user >= training.n_users()) throw DataError("probe edge user out of range");
    ++first[e.user + 1];
  }
  for (std::size_t u = 0; u < training.n_users(); ++u) first[u + 1] += first[u];
  std::vector<ItemId> probe_items(probe.size());
  {
    auto cursor = first;
    for (const auto& e : probe) probe_items[cursor[e.user]++] = e.item;
    for (std::size_t u = 0; u < training.n_users(); ++u)
      std::sort(probe_items.begin() + static_cast<std::ptrdiff_t>(first[u]),
                probe_items.begin() + static_cast<std::ptrdiff_t>(first[u + 1]));
  }

  Evaluation out;
  out.n_items = training.n_items();
  out.l = l;
  out.users.resize(targets.size());
  parallel_for(targets.size(), workers, [&](std::size_t t) {
    const UserId u = targets[t];
    const auto profile = training.items_of(u);
    const std::span<const ItemId> mine(probe_items.data() + first[u], first[u + 1] - first[u]);
    UserOutcome outcome;
    outcome.user = u;
    outcome.training_degree = profile.size();
    const ScoreVector scores = scorer(u);
    if (!mine.empty()) outcome.rs = ranking_score_user(scores, profile, mine);
    if (training.n_items() - profile.size() >= l) {
      outcome.list = top_l(scores, profile, l);
      if (outcome.rs) outcome.precision = precision_user(*outcome.list, mine);
    }
    out.users[t] = std::move(outcome);
  });
  std::stable_sort(out.users.begin(), out.users.end(),
                   [](const auto& x, const auto& y) { return x.user < y.user; });
  return out;
}

MetricsReport summarize(const Evaluation& evaluation, const BipartiteNetwork& training,
                        const std::function<bool(const UserOutcome&)>& include,
                        const InterDiversityOptions& diversity) {
  CompensatedSum rs, precision, intra, novelty;
  std::size_t rs_users = 0, precision_users = 0;
  std::vector<RecommendationList> lists;
  for (const auto& user : evaluation.users) {
    if (include && !include(user)) continue;
    if (user.rs) {
      rs.add(*user.rs);
      ++rs_users;
    }
    if (user.precision) {
      precision.add(*user.precision);
      ++precision_users;
    }
    if (user.list) lists.push_back(*user.list);
  }
  if (rs_users == 0) throw NotEvaluableError("no evaluable users: nobody has probe links");
  if (lists.empty()) throw NotEvaluableError("no evaluable users: no recommendation lists");

  MetricsReport report;
  report.l = evaluation.l;
  report.users_evaluated = rs_users;
  report.lists_evaluated = lists.size();
  report.rs = rs.value() / static_cast<double>(rs_users);
  report.precision =
      precision_users == 0 ? 0.0 : precision.value() / static_cast<double>(precision_users);
  for (const auto& list : lists) novelty.add(novelty_user(training, list));
  report.novelty = novelty.value() / static_cast<double>(lists.size());
  if (evaluation.l >= 2) {
    for (const auto& list : lists) intra.add(intra_diversity_user(training, list));
    report.intra_diversity = intra.value() / static_cast<double>(lists.size());
  }
  if (lists.size() >= 2) report.inter_diversity = inter_diversity(lists, evaluation.l, diversity);
  report.coverage = coverage(lists, evaluation.n_items);
  report.congestion = congestion(lists, evaluation.n_items);
  return report;
}

Evaluation evaluate_split(const CombinedNetwork& training, const LinkSplit& split,
                          const KernelSpec& spec, std::size_t l, std::size_t workers) {
  spec.validate();
  if (split.probe.empty()) throw NotEvaluableError("empty probe set");
  if (split.n_users != training.n_users() || split.n_items != training.n_items()) {
    throw DataError("split does not match the training network dimensions");
  }
  std::vector<UserId> targets;
  for (UserId u = 0; u < training.n_users(); ++u)
    if (training.bipartite().user_degree(u) > 0) targets.push_back(u);
  const Scorer scorer = [&](UserId u) { return compute_scores(spec, training, u); };
  return evaluate_users(training.bipartite(), split.probe, targets, scorer, l, workers);
}

MetricsReport evaluate_all(const CombinedNetwork& training, const LinkSplit& split,
                           const KernelSpec& spec, std::size_t l, const EvaluateOptions& options) {
  const auto evaluation = evaluate_split(training, split, spec, l, options.workers);
  return summarize(evaluation, training.bipartite(), {}, options.diversity);
}

}  // namespace socdiff
