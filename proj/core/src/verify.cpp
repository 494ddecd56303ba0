#include "socdiff/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "socdiff/metrics.hpp"
#include "socdiff/random.hpp"

namespace socdiff {

CombinedNetwork random_instance(std::uint64_t seed, std::size_t max_users, std::size_t max_items,
                                double edge_probability) {
  Rng rng(seed);
  const std::size_t n = 2 + rng.below(max_users - 1);
  const std::size_t m = 2 + rng.below(max_items - 1);
  std::vector<UserItemEdge> links;
  for (UserId u = 0; u < n; ++u) {
    bool any = false;
    for (ItemId a = 0; a < m; ++a)
      if (rng.bernoulli(edge_probability)) {
        links.push_back({u, a});
        any = true;
      }
    if (!any) links.push_back({u, static_cast<ItemId>(rng.below(m))});
  }
  std::vector<UserUserEdge> friends;
  for (UserId u = 0; u < n; ++u)
    for (UserId v = u + 1; v < n; ++v)
      if (rng.bernoulli(edge_probability)) friends.push_back({u, v});
  return combine(build_bipartite(links, n, m), build_social(friends, n));
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class Recorder {
 public:
  explicit Recorder(std::string name, double tolerance = 0.0) : tolerance_(tolerance) {
    check_.name = std::move(name);
  }

  // Records a deviation; anything above the tolerance is a failure.
  void deviation(double value, const std::function<std::string()>& where) {
    ++check_.checks;
    if (!(value <= check_.worst)) check_.worst = value;
    if (!(value <= tolerance_)) fail(where() + ", deviation " + fmt(value));
  }

  void require(bool ok, const std::function<std::string()>& where) {
    ++check_.checks;
    if (!ok) fail(where());
  }

  PropertyCheck take() { return std::move(check_); }

 private:
  void fail(const std::string& message) {
    if (check_.passed) check_.counterexample = message;
    check_.passed = false;
  }
  double tolerance_;
  PropertyCheck check_;
};

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

std::string at(std::uint64_t seed, UserId target, const std::string& what) {
  return "instance seed " + std::to_string(seed) + ", target " + std::to_string(target) + ", " +
         what;
}

}  // namespace

std::vector<PropertyCheck> run_oracle_suite(const VerifyOptions& options) {
  std::vector<KernelSpec> oracle_specs = {
      KernelSpec::md(),          KernelSpec::hc(),
      KernelSpec::hybrid(0.0),   KernelSpec::hybrid(0.3),
      KernelSpec::hybrid(0.7),   KernelSpec::hybrid(1.0),
  };
  for (double p : {0.0, 0.5, 1.0}) {
    oracle_specs.push_back(KernelSpec::smd(p, 1, FriendlessRule::Drop));
    oracle_specs.push_back(KernelSpec::smd(p, 1, FriendlessRule::Retain));
  }
  oracle_specs.push_back(KernelSpec::smd(0.4, 3, FriendlessRule::Retain));

  Recorder oracle("oracle_equivalence", 1e-10);
  Recorder degeneracy("degeneracy_identities", 1e-12);
  Recorder conservation("mass_conservation", 1e-9);
  Recorder support("support_monotonicity");
  Recorder nonneg("non_negativity");
  Recorder grm("grm_target_independence");
  Recorder stochastic("transfer_matrix_stochasticity", 1e-12);
  Recorder rank_invariance("rs_rank_invariance", 1e-15);
  Recorder midrank("rs_midrank_all_zero", 1e-15);
  Recorder gini_const("congestion_constant_counts", 1e-15);
  Recorder permutation("metric_permutation_invariance", 1e-12);
  Recorder sampling("inter_diversity_sampling_agreement");

  for (std::size_t k = 0; k < options.instances; ++k) {
    const std::uint64_t seed = derive_seed(options.seed, k);
    const auto net = random_instance(seed);
    const auto& bip = net.bipartite();

    std::vector<DenseMatrix> matrices;
    for (const auto& spec : oracle_specs) matrices.push_back(transfer_matrix(spec, net));

    const auto md_matrix = transfer_matrix(KernelSpec::md(), net);
    const auto hc_matrix = transfer_matrix(KernelSpec::hc(), net);
    for (ItemId b = 0; b < net.n_items(); ++b) {
      if (bip.item_degree(b) == 0) continue;
      stochastic.deviation(std::abs(md_matrix.col_sum(b) - 1.0), [&] {
        return "instance seed " + std::to_string(seed) + ", MD column " + std::to_string(b);
      });
    }
    for (ItemId a = 0; a < net.n_items(); ++a) {
      if (bip.item_degree(a) == 0) continue;
      stochastic.deviation(std::abs(hc_matrix.row_sum(a) - 1.0), [&] {
        return "instance seed " + std::to_string(seed) + ", HC row " + std::to_string(a);
      });
    }

    const auto grm_first = grm_scores(bip, 0).scores;
    std::vector<RecommendationList> lists;

    for (UserId u = 0; u < net.n_users(); ++u) {
      const auto f = initial_resource(bip, u);
      const auto k_u = static_cast<double>(bip.user_degree(u));
      for (std::size_t s = 0; s < oracle_specs.size(); ++s) {
        const auto implicit = compute_scores(oracle_specs[s], net, u);
        oracle.deviation(max_abs_diff(implicit.scores, matrices[s].apply(f)),
                         [&] { return at(seed, u, oracle_specs[s].describe()); });
        nonneg.require(std::all_of(implicit.scores.begin(), implicit.scores.end(),
                                   [](double x) { return x >= 0.0 && std::isfinite(x); }),
                       [&] { return at(seed, u, oracle_specs[s].describe()); });
      }

      const auto md = md_scores(bip, u);
      const auto hc = hc_scores(bip, u);
      degeneracy.deviation(max_abs_diff(smd_scores(net, u, 1.0).scores, md.scores),
                           [&] { return at(seed, u, "smd(p=1) vs md"); });
      degeneracy.deviation(max_abs_diff(smd_scores(net, u, 1.0, 3).scores, md.scores),
                           [&] { return at(seed, u, "smd(p=1,steps=3) vs md"); });
      degeneracy.deviation(max_abs_diff(hybrid_scores(bip, u, 1.0).scores, md.scores),
                           [&] { return at(seed, u, "hybrid(1) vs md"); });
      degeneracy.deviation(max_abs_diff(hybrid_scores(bip, u, 0.0).scores, hc.scores),
                           [&] { return at(seed, u, "hybrid(0) vs hc"); });

      conservation.deviation(std::abs(md.total() - k_u) / k_u,
                             [&] { return at(seed, u, "md total " + fmt(md.total())); });
      for (double p : {0.0, 0.3, 0.7}) {
        const auto smd = smd_scores(net, u, p, 1, options.conservation_rule);
        conservation.deviation(std::abs(smd.total() - k_u) / k_u, [&] {
          return at(seed, u,
                    "smd(p=" + fmt(p) + ", " + std::string(to_string(options.conservation_rule)) +
                        ") total " + fmt(smd.total()) + ", lost mass " + fmt(smd.lost_mass));
        });
        if (p > 0.0) {
          const auto retained = smd_scores(net, u, p);
          bool covers = true;
          for (ItemId a = 0; a < net.n_items(); ++a)
            if (md.scores[a] > 0.0 && !(retained.scores[a] > 0.0)) covers = false;
          support.require(covers, [&] { return at(seed, u, "smd(p=" + fmt(p) + ")"); });
        }
      }

      grm.require(grm_scores(bip, u).scores == grm_first, [&] { return at(seed, u, "grm"); });

      // Metric properties on this user's MD scores.
      const auto profile = bip.items_of(u);
      std::vector<ItemId> uncollected;
      for (ItemId a = 0; a < net.n_items(); ++a)
        if (!bip.has_edge(u, a)) uncollected.push_back(a);
      if (uncollected.empty()) continue;
      const std::vector<ItemId> probe(uncollected.begin(),
                                      uncollected.begin() + (uncollected.size() + 1) / 2);
      ScoreVector transformed = md;
      for (auto& x : transformed.scores) x = std::exp(3.0 * x) + 0.5;
      rank_invariance.deviation(std::abs(ranking_score_user(md, profile, probe) -
                                         ranking_score_user(transformed, profile, probe)),
                                [&] { return at(seed, u, "exp transform"); });
      ScoreVector zeros{u, std::vector<double>(net.n_items(), 0.0)};
      const auto big_u = static_cast<double>(uncollected.size());
      midrank.deviation(std::abs(ranking_score_user(zeros, profile, probe) -
                                 (big_u + 1.0) / (2.0 * big_u)),
                        [&] { return at(seed, u, "all-zero scores"); });

      // Reversing item order must not change RS.
      const auto m = net.n_items();
      ScoreVector reversed{u, std::vector<double>(m)};
      for (ItemId a = 0; a < m; ++a) reversed.scores[m - 1 - a] = md.scores[a];
      std::vector<ItemId> rprofile, rprobe;
      for (ItemId a : profile) rprofile.push_back(static_cast<ItemId>(m - 1 - a));
      for (ItemId a : probe) rprobe.push_back(static_cast<ItemId>(m - 1 - a));
      std::sort(rprofile.begin(), rprofile.end());
      std::sort(rprobe.begin(), rprobe.end());
      permutation.deviation(std::abs(ranking_score_user(md, profile, probe) -
                                     ranking_score_user(reversed, rprofile, rprobe)),
                            [&] { return at(seed, u, "item reversal"); });

      lists.push_back(top_l(md, profile, 1));
    }

    std::vector<double> constant(net.n_items(), 3.0);
    gini_const.deviation(std::abs(gini_coefficient(constant)), [&] {
      return "instance seed " + std::to_string(seed) + ", constant counts";
    });

    if (lists.size() >= 2) {
      const double exact = inter_diversity(lists, 1);
      const auto sampled = inter_diversity_sampled(lists, 1, 4000, seed);
      const double bound = 3.0 * sampled.standard_error + 1e-12;
      sampling.require(std::abs(sampled.mean - exact) <= bound, [&] {
        return "instance seed " + std::to_string(seed) + ", exact " + fmt(exact) + " vs sampled " +
               fmt(sampled.mean) + " +- " + fmt(sampled.standard_error);
      });
    }
  }

  std::vector<PropertyCheck> out;
  for (auto* r : {&oracle, &degeneracy, &conservation, &support, &nonneg, &grm, &stochastic,
                  &rank_invariance, &midrank, &gini_const, &permutation, &sampling})
    out.push_back(r->take());
  return out;
}

}  // namespace socdiff
