#pragma once

#include <cstdint>
#include <vector>

#include "socdiff/network.hpp"

namespace socdiff {

// Partition of the user-item links into a training set and a probe set.
// Both edge lists are kept sorted by (user, item).
struct LinkSplit {
  std::vector<UserItemEdge> training;
  std::vector<UserItemEdge> probe;
  std::uint64_t seed = 0;
  std::size_t n_users = 0;
  std::size_t n_items = 0;

  friend bool operator==(const LinkSplit&, const LinkSplit&) = default;
};

// Uniform sample without replacement of round(fraction * |E|) links as probe.
// Throws ParameterError unless 0 < fraction < 1.
LinkSplit split_links(const BipartiteNetwork& net, double fraction, std::uint64_t seed);

// Training network over the full user and item index space.
BipartiteNetwork training_network(const LinkSplit& split);

// Rebuilds a combined network whose bipartite part is the split's training set.
CombinedNetwork training_network(const LinkSplit& split, const SocialNetwork& social);

}  // namespace socdiff
