#include <doctest.h>

#include <cmath>

#include "socdiff/diffusion.hpp"
#include "socdiff/errors.hpp"
#include "socdiff/verify.hpp"
#include "toy_networks.hpp"

using namespace socdiff;
using doctest::Approx;

namespace {

void check_scores(const ScoreVector& got, std::vector<double> expected, double eps = 1e-12) {
  REQUIRE(got.scores.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(i);
    CHECK(got.scores[i] == Approx(expected[i]).epsilon(eps));
  }
}

double max_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

}  // namespace

TEST_CASE("MD on TOY1") {
  const auto net = testing::toy1();
  const auto s = md_scores(net, 0);
  check_scores(s, {0.75, 1.0, 0.25});
  CHECK(s.total() == Approx(2.0));
  CHECK(s.lost_mass == 0.0);
}

TEST_CASE("MD closed loop") {
  const std::vector<UserItemEdge> edges{{0, 0}};
  const auto net = build_bipartite(edges, 1, 3);
  check_scores(md_scores(net, 0), {1.0, 0.0, 0.0});
}

TEST_CASE("MD rejects users without a profile") {
  const std::vector<UserItemEdge> edges{{0, 0}};
  const auto net = build_bipartite(edges, 2, 1);
  CHECK_THROWS_AS(md_scores(net, 1), NoProfileError);
  CHECK_THROWS_AS(hc_scores(net, 1), NoProfileError);
  CHECK_THROWS_AS(md_scores(net, 9), ParameterError);
}

TEST_CASE("HC on TOY1") {
  const auto net = testing::toy1();
  check_scores(hc_scores(net, 0), {1.0, 0.75, 0.5});
  const std::vector<UserItemEdge> single{{0, 0}};
  check_scores(hc_scores(build_bipartite(single, 1, 1), 0), {1.0});
}

TEST_CASE("HC preserves constants on a connected graph where the target holds every item") {
  const std::vector<UserItemEdge> edges{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 1}};
  const auto net = build_bipartite(edges, 3, 3);
  check_scores(hc_scores(net, 0), {1.0, 1.0, 1.0});
}

TEST_CASE("Hybrid endpoints and TOY1 at lambda 0.5") {
  const auto net = testing::toy1();
  const auto cnet = testing::toy1s();
  CHECK(max_diff(hybrid_scores(net, 0, 1.0).scores, md_scores(net, 0).scores) <= 1e-12);
  CHECK(max_diff(hybrid_scores(net, 0, 0.0).scores, hc_scores(net, 0).scores) <= 1e-12);

  // w(a<-b) = (1 / sqrt(k_a k_b)) sum_i a_ia a_ib / k_i with f = (1, 1, 0):
  // o0 = 1/2 + 1/(2 sqrt 2), o1 = 1/(2 sqrt 2) + 1/2, o2 = 1/(2 sqrt 2).
  const double r = 1.0 / (2.0 * std::sqrt(2.0));
  const auto s = hybrid_scores(net, 0, 0.5);
  check_scores(s, {0.5 + r, 0.5 + r, r});
  const auto w = transfer_matrix(KernelSpec::hybrid(0.5), cnet);
  CHECK(max_diff(s.scores, w.apply(initial_resource(net, 0))) <= 1e-12);

  CHECK_THROWS_AS(hybrid_scores(net, 0, 1.5), ParameterError);
  CHECK_THROWS_AS(hybrid_scores(net, 0, -0.1), ParameterError);
}

TEST_CASE("SMD on TOY1+S and TOY2") {
  const auto toy = testing::toy1s();
  check_scores(smd_scores(toy, 0, 0.5), {0.5, 1.0, 0.5});
  check_scores(smd_scores(testing::toy2(), 0, 0.5), {0.5, 0.5, 0.0});
}

TEST_CASE("SMD with p = 1 reproduces MD bit for bit") {
  const auto toy = testing::toy1s();
  for (int steps : {1, 2, 5}) CHECK(smd_scores(toy, 0, 1.0, steps).scores == md_scores(toy.bipartite(), 0).scores);
}

TEST_CASE("SMD parameter errors") {
  const auto toy = testing::toy1s();
  CHECK_THROWS_AS(smd_scores(toy, 0, 1.2), ParameterError);
  CHECK_THROWS_AS(smd_scores(toy, 0, 0.5, 0), ParameterError);
}

TEST_CASE("friendless holders: retain conserves, drop loses the passed-on share") {
  // u0 {o0, o1}, u1 {o1}, u2 {o0} with only u0 - u2 friends: u1 is friendless.
  const std::vector<UserItemEdge> edges{{0, 0}, {0, 1}, {1, 1}, {2, 0}};
  const std::vector<UserUserEdge> friends{{0, 2}};
  const auto net = combine(build_bipartite(edges, 3, 2), build_social(friends, 3));
  const auto retain = smd_scores(net, 0, 0.25);
  CHECK(retain.total() == Approx(2.0).epsilon(1e-12));
  CHECK(retain.lost_mass == 0.0);

  const auto drop = smd_scores(net, 0, 0.25, 1, FriendlessRule::Drop);
  // After the first hop u1 holds 0.5 and would pass on 0.75 of it.
  CHECK(drop.lost_mass == Approx(0.375));
  CHECK(drop.total() == Approx(2.0 - 0.375));
}

TEST_CASE("coldstart scoring") {
  // u2 has no items and friends {u0, u1}; u0 {o0}, u1 {o1}.
  const std::vector<UserItemEdge> edges{{0, 0}, {1, 1}};
  const std::vector<UserUserEdge> friends{{2, 0}, {2, 1}};
  const auto net = combine(build_bipartite(edges, 3, 2), build_social(friends, 3));
  const auto s = coldstart_scores(net, 2, 0.5);
  check_scores(s, {0.5, 0.5});
  CHECK(s.lost_mass == 0.0);

  SUBCASE("single friend with three items") {
    const std::vector<UserItemEdge> e{{0, 0}, {0, 1}, {0, 2}};
    const std::vector<UserUserEdge> f{{1, 0}};
    const auto n2 = combine(build_bipartite(e, 2, 3), build_social(f, 2));
    check_scores(coldstart_scores(n2, 1, 0.3), {1.0 / 3, 1.0 / 3, 1.0 / 3});
  }
  SUBCASE("only friend has no items") {
    const std::vector<UserUserEdge> f{{1, 0}};
    const auto n2 = combine(build_bipartite({}, 2, 2), build_social(f, 2));
    const auto z = coldstart_scores(n2, 1, 0.5);
    check_scores(z, {0.0, 0.0});
    CHECK(z.lost_mass == Approx(1.0));
  }
  SUBCASE("no friends and no items") {
    const auto n2 = combine(build_bipartite({}, 2, 2), build_social({}, 2));
    CHECK_THROWS_AS(coldstart_scores(n2, 1, 0.5), UnreachableUserError);
  }
  SUBCASE("two social steps keep p on every holder after the first round") {
    // Round 1: u0 = u1 = 0.5 (u2 gave everything away).
    // Round 2 with p = 0.5: u0 keeps 0.25 and passes 0.25 to u2; same for u1.
    // u2 ends with 0.5 and no items, so half the unit is lost.
    const auto two = coldstart_scores(net, 2, 0.5, 2);
    check_scores(two, {0.25, 0.25});
    CHECK(two.lost_mass == Approx(0.5));
  }
}

TEST_CASE("GRM scores are item degrees") {
  const auto net = testing::toy1();
  check_scores(grm_scores(net, 0), {1.0, 2.0, 1.0});
  CHECK(grm_scores(net, 0).scores == grm_scores(net, 1).scores);
  check_scores(grm_scores(build_bipartite({}, 2, 3)), {0.0, 0.0, 0.0});
}

TEST_CASE("transfer matrix stochasticity and SMD(p=1) identity on TOY1") {
  const auto toy = testing::toy1s();
  const auto md = transfer_matrix(KernelSpec::md(), toy);
  const auto hc = transfer_matrix(KernelSpec::hc(), toy);
  for (std::size_t c = 0; c < 3; ++c) CHECK(md.col_sum(c) == Approx(1.0));
  for (std::size_t r = 0; r < 3; ++r) CHECK(hc.row_sum(r) == Approx(1.0));
  CHECK(transfer_matrix(KernelSpec::smd(1.0), toy).data == md.data);
}

TEST_CASE("transfer matrix refusals") {
  const auto toy = testing::toy1s();
  CHECK_THROWS_AS(transfer_matrix(KernelSpec::md(), toy, 2), ParameterError);
  CHECK_THROWS_AS(transfer_matrix(KernelSpec::grm(), toy), ParameterError);
}

TEST_CASE("kernel spec validation") {
  CHECK_NOTHROW(KernelSpec::smd(0.5).validate());
  KernelSpec bad = KernelSpec::md();
  bad.p = 0.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  KernelSpec missing{.method = Method::Hybrid};
  CHECK_THROWS_AS(missing.validate(), ParameterError);
  CHECK(parse_method("SMD") == Method::SMD);
  CHECK_THROWS_AS(parse_method("probs"), ParameterError);
  CHECK(KernelSpec::smd(0.5).with_parameter(0.25).p == 0.25);
  CHECK_THROWS_AS(KernelSpec::md().with_parameter(0.3), ParameterError);
}

TEST_CASE("implicit propagation matches the dense oracle on random instances") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto net = random_instance(seed);
    for (const auto& spec : {KernelSpec::md(), KernelSpec::hc(), KernelSpec::hybrid(0.3),
                             KernelSpec::smd(0.5, 1, FriendlessRule::Drop),
                             KernelSpec::smd(0.5, 1, FriendlessRule::Retain),
                             KernelSpec::smd(0.2, 4, FriendlessRule::Drop)}) {
      const auto w = transfer_matrix(spec, net);
      for (UserId u = 0; u < net.n_users(); ++u) {
        const auto implicit = compute_scores(spec, net, u);
        CHECK(max_diff(implicit.scores, w.apply(initial_resource(net.bipartite(), u))) <= 1e-10);
      }
    }
  }
}

TEST_CASE("SMD support contains MD support for 0 < p < 1") {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    const auto net = random_instance(seed);
    for (UserId u = 0; u < net.n_users(); ++u) {
      const auto md = md_scores(net.bipartite(), u);
      const auto smd = smd_scores(net, u, 0.6);
      for (std::size_t a = 0; a < md.scores.size(); ++a)
        if (md.scores[a] > 0) CHECK(smd.scores[a] > 0);
    }
  }
}
