#include "socdiff/network.hpp"

#include <algorithm>
#include <string>

#include "socdiff/errors.hpp"

namespace socdiff {

namespace {

// Pairs must already be sorted by (row, target) and deduplicated.
template <class Pair, class RowOf, class TargetOf>
Adjacency pack(const std::vector<Pair>& pairs, std::size_t rows, RowOf row_of,
               TargetOf target_of) {
  std::vector<std::size_t> offsets(rows + 1, 0);
  for (const auto& p : pairs) ++offsets[row_of(p) + 1];
  for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
  std::vector<std::uint32_t> targets;
  targets.reserve(pairs.size());
  for (const auto& p : pairs) targets.push_back(target_of(p));
  return Adjacency(std::move(offsets), std::move(targets));
}

}  // namespace

bool Adjacency::contains(std::size_t r, std::uint32_t value) const {
  auto neighbors = row(r);
  return std::binary_search(neighbors.begin(), neighbors.end(), value);
}

std::vector<UserItemEdge> BipartiteNetwork::edges() const {
  std::vector<UserItemEdge> out;
  out.reserve(n_edges());
  for (UserId u = 0; u < n_users(); ++u)
    for (ItemId a : items_of(u)) out.push_back({u, a});
  return out;
}

std::vector<UserUserEdge> SocialNetwork::edges() const {
  std::vector<UserUserEdge> out;
  out.reserve(n_edges());
  for (UserId u = 0; u < n_users(); ++u)
    for (UserId v : friends_of(u))
      if (u < v) out.push_back({u, v});
  return out;
}

BipartiteNetwork build_bipartite(std::span<const UserItemEdge> edges, std::size_t n_users,
                                 std::size_t n_items, BuildStats* stats) {
  std::vector<UserItemEdge> by_user(edges.begin(), edges.end());
  for (const auto& e : by_user) {
    if (e.user >= n_users || e.item >= n_items) {
      throw DataError("user-item edge (" + std::to_string(e.user) + ", " +
                      std::to_string(e.item) + ") out of range for " +
                      std::to_string(n_users) + " users and " + std::to_string(n_items) +
                      " items");
    }
  }
  std::sort(by_user.begin(), by_user.end());
  auto last = std::unique(by_user.begin(), by_user.end());
  const auto collapsed = static_cast<std::size_t>(by_user.end() - last);
  by_user.erase(last, by_user.end());
  if (stats) stats->duplicates_collapsed += collapsed;

  std::vector<UserItemEdge> by_item = by_user;
  std::sort(by_item.begin(), by_item.end(), [](const auto& x, const auto& y) {
    return x.item != y.item ? x.item < y.item : x.user < y.user;
  });

  BipartiteNetwork net;
  net.user_items_ = pack(
      by_user, n_users, [](const auto& e) { return e.user; },
      [](const auto& e) { return e.item; });
  net.item_users_ = pack(
      by_item, n_items, [](const auto& e) { return e.item; },
      [](const auto& e) { return e.user; });
  return net;
}

SocialNetwork build_social(std::span<const UserUserEdge> edges, std::size_t n_users,
                           BuildStats* stats) {
  std::vector<UserUserEdge> directed;
  directed.reserve(edges.size() * 2);
  std::size_t self_loops = 0;
  for (const auto& e : edges) {
    if (e.a >= n_users || e.b >= n_users) {
      throw DataError("user-user edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                      ") out of range for " + std::to_string(n_users) + " users");
    }
    if (e.a == e.b) {
      ++self_loops;
      continue;
    }
    directed.push_back({e.a, e.b});
    directed.push_back({e.b, e.a});
  }
  std::sort(directed.begin(), directed.end());
  auto last = std::unique(directed.begin(), directed.end());
  // Each collapsed undirected pair removes two directed copies.
  const auto collapsed = static_cast<std::size_t>(directed.end() - last) / 2;
  directed.erase(last, directed.end());
  if (stats) {
    stats->duplicates_collapsed += collapsed;
    stats->self_loops_dropped += self_loops;
  }

  SocialNetwork net;
  net.friends_ = pack(
      directed, n_users, [](const auto& e) { return e.a; }, [](const auto& e) { return e.b; });
  return net;
}

CombinedNetwork combine(BipartiteNetwork bipartite, SocialNetwork social) {
  if (bipartite.n_users() != social.n_users()) {
    throw DataError("user count mismatch: bipartite network has " +
                    std::to_string(bipartite.n_users()) + " users, social network has " +
                    std::to_string(social.n_users()));
  }
  CombinedNetwork net;
  net.bipartite_ = std::move(bipartite);
  net.social_ = std::move(social);
  return net;
}

}  // namespace socdiff
