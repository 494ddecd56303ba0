#pragma once

// Brute-force reference computations. They follow the textbook definitions
// directly and share no code with the library's production paths.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "socdiff/metrics.hpp"
#include "socdiff/network.hpp"

namespace socdiff::testing {

// Mid-rank of each probe item by pairwise comparison against every other
// uncollected item.
inline double brute_ranking_score(const std::vector<double>& scores,
                                  const std::vector<ItemId>& profile,
                                  const std::vector<ItemId>& probe) {
  const std::set<ItemId> collected(profile.begin(), profile.end());
  double total = 0.0;
  double uncollected = 0.0;
  for (ItemId a = 0; a < scores.size(); ++a)
    if (!collected.count(a)) uncollected += 1.0;
  for (ItemId a : probe) {
    double higher = 0.0, tied_others = 0.0;
    for (ItemId b = 0; b < scores.size(); ++b) {
      if (collected.count(b) || b == a) continue;
      if (scores[b] > scores[a]) higher += 1.0;
      if (scores[b] == scores[a]) tied_others += 1.0;
    }
    // Positions higher+1 .. higher+1+tied_others, averaged.
    total += (higher + 1.0 + tied_others / 2.0) / uncollected;
  }
  return total / static_cast<double>(probe.size());
}

// Congestion as one minus twice the area under the piecewise-linear Lorenz
// curve (trapezoid rule over the m ranked items).
inline double lorenz_congestion(std::vector<double> counts) {
  std::sort(counts.begin(), counts.end());
  double total = 0.0;
  for (double c : counts) total += c;
  const double m = static_cast<double>(counts.size());
  double cumulative = 0.0, area = 0.0;
  for (double c : counts) {
    const double before = cumulative / total;
    cumulative += c;
    area += (before + cumulative / total) / (2.0 * m);
  }
  return 1.0 - 2.0 * area;
}

inline double brute_inter_diversity(const std::vector<RecommendationList>& lists, double l) {
  double sum = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < lists.size(); ++i)
    for (std::size_t j = i + 1; j < lists.size(); ++j) {
      double common = 0.0;
      for (ItemId a : lists[i].items)
        if (std::find(lists[j].items.begin(), lists[j].items.end(), a) != lists[j].items.end())
          common += 1.0;
      sum += 1.0 - common / l;
      pairs += 1.0;
    }
  return sum / pairs;
}

inline double dense_cosine(const BipartiteNetwork& net, ItemId x, ItemId y) {
  double dot = 0.0, kx = 0.0, ky = 0.0;
  for (UserId u = 0; u < net.n_users(); ++u) {
    const double ax = net.has_edge(u, x) ? 1.0 : 0.0;
    const double ay = net.has_edge(u, y) ? 1.0 : 0.0;
    dot += ax * ay;
    kx += ax;
    ky += ay;
  }
  if (kx == 0.0 || ky == 0.0) return 0.0;
  return dot / std::sqrt(kx * ky);
}

}  // namespace socdiff::testing
