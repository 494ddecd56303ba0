#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace socdiff {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;

struct UserItemEdge {
  UserId user;
  ItemId item;

  friend bool operator==(const UserItemEdge&, const UserItemEdge&) = default;
  friend auto operator<=>(const UserItemEdge&, const UserItemEdge&) = default;
};

struct UserUserEdge {
  UserId a;
  UserId b;

  friend bool operator==(const UserUserEdge&, const UserUserEdge&) = default;
  friend auto operator<=>(const UserUserEdge&, const UserUserEdge&) = default;
};

// Counters filled in by the builders for input anomalies they repaired.
struct BuildStats {
  std::size_t duplicates_collapsed = 0;
  std::size_t self_loops_dropped = 0;
};

// Compressed adjacency: offsets has size rows+1, targets holds sorted neighbor
// lists back to back.
class Adjacency {
 public:
  Adjacency() : offsets_(1, 0) {}
  Adjacency(std::vector<std::size_t> offsets, std::vector<std::uint32_t> targets)
      : offsets_(std::move(offsets)), targets_(std::move(targets)) {}

  std::size_t rows() const { return offsets_.size() - 1; }
  std::size_t entries() const { return targets_.size(); }

  std::span<const std::uint32_t> row(std::size_t r) const {
    return {targets_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::size_t row_size(std::size_t r) const { return offsets_[r + 1] - offsets_[r]; }
  bool contains(std::size_t r, std::uint32_t value) const;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
};

// User-item collection graph. Both the user-major and item-major views are kept
// so either side's neighbors can be walked in linear time.
class BipartiteNetwork {
 public:
  BipartiteNetwork() = default;

  std::size_t n_users() const { return user_items_.rows(); }
  std::size_t n_items() const { return item_users_.rows(); }
  std::size_t n_edges() const { return user_items_.entries(); }

  std::span<const ItemId> items_of(UserId u) const { return user_items_.row(u); }
  std::span<const UserId> users_of(ItemId a) const { return item_users_.row(a); }

  std::size_t user_degree(UserId u) const { return user_items_.row_size(u); }
  std::size_t item_degree(ItemId a) const { return item_users_.row_size(a); }

  bool has_edge(UserId u, ItemId a) const { return user_items_.contains(u, a); }

  // All edges in (user, item) lexicographic order.
  std::vector<UserItemEdge> edges() const;

  friend bool operator==(const BipartiteNetwork&, const BipartiteNetwork&) = default;

 private:
  friend BipartiteNetwork build_bipartite(std::span<const UserItemEdge>, std::size_t,
                                          std::size_t, BuildStats*);
  Adjacency user_items_;
  Adjacency item_users_;
};

// Undirected friendship graph over the same user index space.
class SocialNetwork {
 public:
  SocialNetwork() = default;

  std::size_t n_users() const { return friends_.rows(); }
  // Number of undirected edges.
  std::size_t n_edges() const { return friends_.entries() / 2; }

  std::span<const UserId> friends_of(UserId u) const { return friends_.row(u); }
  std::size_t social_degree(UserId u) const { return friends_.row_size(u); }
  bool are_friends(UserId a, UserId b) const { return friends_.contains(a, b); }

  // Undirected edges with a < b, in lexicographic order.
  std::vector<UserUserEdge> edges() const;

  friend bool operator==(const SocialNetwork&, const SocialNetwork&) = default;

 private:
  friend SocialNetwork build_social(std::span<const UserUserEdge>, std::size_t, BuildStats*);
  Adjacency friends_;
};

class CombinedNetwork {
 public:
  CombinedNetwork() = default;

  const BipartiteNetwork& bipartite() const { return bipartite_; }
  const SocialNetwork& social() const { return social_; }
  std::size_t n_users() const { return bipartite_.n_users(); }
  std::size_t n_items() const { return bipartite_.n_items(); }

 private:
  friend CombinedNetwork combine(BipartiteNetwork, SocialNetwork);
  BipartiteNetwork bipartite_;
  SocialNetwork social_;
};

// Builds the bipartite network from dense 0-based ids. Duplicate pairs collapse
// to one binary link. Throws DataError naming the first out-of-range pair.
BipartiteNetwork build_bipartite(std::span<const UserItemEdge> edges, std::size_t n_users,
                                 std::size_t n_items, BuildStats* stats = nullptr);

// Builds the symmetric friendship graph. Every pair is inserted in both
// directions; self-loops are dropped and duplicates collapsed.
SocialNetwork build_social(std::span<const UserUserEdge> edges, std::size_t n_users,
                           BuildStats* stats = nullptr);

// Throws DataError when the two networks disagree on the number of users.
CombinedNetwork combine(BipartiteNetwork bipartite, SocialNetwork social);

}  // namespace socdiff
