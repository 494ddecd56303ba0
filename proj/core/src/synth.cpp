#include <string>

#include "socdiff/errors.hpp"
#include "socdiff/harness.hpp"
#include "socdiff/random.hpp"

namespace socdiff {

CombinedNetwork synth_generate(const SynthParams& params) {
  if (params.communities == 0 || params.users_per_community == 0 ||
      params.items_per_community == 0) {
    throw ParameterError("synthetic network needs at least one community, user and item");
  }
  for (double prob : {params.intra_collect, params.inter_collect, params.intra_friend,
                      params.inter_friend}) {
    if (!(prob >= 0.0 && prob <= 1.0)) throw ParameterError("probabilities must lie in [0, 1]");
  }
  const std::size_t n = params.communities * params.users_per_community;
  const std::size_t m = params.communities * params.items_per_community;
  Rng rng(params.seed);

  std::vector<UserItemEdge> collections;
  for (UserId u = 0; u < n; ++u) {
    const auto cu = u / params.users_per_community;
    for (ItemId a = 0; a < m; ++a) {
      const auto ca = a / params.items_per_community;
      if (rng.bernoulli(cu == ca ? params.intra_collect : params.inter_collect))
        collections.push_back({u, a});
    }
  }
  std::vector<UserUserEdge> friendships;
  for (UserId u = 0; u < n; ++u) {
    for (UserId v = u + 1; v < n; ++v) {
      const bool same = u / params.users_per_community == v / params.users_per_community;
      if (rng.bernoulli(same ? params.intra_friend : params.inter_friend))
        friendships.push_back({u, v});
    }
  }
  return combine(build_bipartite(collections, n, m), build_social(friendships, n));
}

}  // namespace socdiff
