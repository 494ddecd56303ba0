#include "socdiff/diffusion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "socdiff/errors.hpp"

namespace socdiff {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Shortest of %.15g / %.17g that reads back as the same double.
std::string fmt_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParameterError(std::string(name) + " must lie in [0, 1], got " + fmt_param(v));
  }
}

void check_target(std::size_t n_users, UserId target) {
  if (target >= n_users) {
    throw ParameterError("target user " + std::to_string(target) + " out of range for " +
                         std::to_string(n_users) + " users");
  }
}

void require_profile(const BipartiteNetwork& net, UserId target) {
  check_target(net.n_users(), target);
  if (net.user_degree(target) == 0) {
    throw NoProfileError("user " + std::to_string(target) +
                         " has no collected items; use coldstart scoring");
  }
}

// Item -> user hop of mass diffusion: every collected item splits its unit
// evenly over its collectors.
std::vector<double> spread_to_users(const BipartiteNetwork& net, UserId target) {
  std::vector<double> resource(net.n_users(), 0.0);
  for (ItemId beta : net.items_of(target)) {
    const double share = 1.0 / static_cast<double>(net.item_degree(beta));
    for (UserId i : net.users_of(beta)) resource[i] += share;
  }
  return resource;
}

// User -> item hop: every holder splits its resource over its items. Holders
// without items contribute to lost mass.
void spread_to_items(const BipartiteNetwork& net, const std::vector<double>& resource,
                     ScoreVector& out) {
  for (UserId i = 0; i < resource.size(); ++i) {
    const double r = resource[i];
    if (r == 0.0) continue;
    const auto items = net.items_of(i);
    if (items.empty()) {
      out.lost_mass += r;
      continue;
    }
    const double share = r / static_cast<double>(items.size());
    for (ItemId a : items) out.scores[a] += share;
  }
}

// One round on the friendship graph: keep p, spread (1 - p) evenly to friends.
std::vector<double> social_round(const SocialNetwork& social, const std::vector<double>& resource,
                                 double p, FriendlessRule rule, double& lost) {
  std::vector<double> next(resource.size(), 0.0);
  for (UserId i = 0; i < resource.size(); ++i) {
    const double r = resource[i];
    if (r == 0.0) continue;
    const auto friends = social.friends_of(i);
    if (friends.empty()) {
      if (rule == FriendlessRule::Retain) {
        next[i] += r;
      } else {
        next[i] += p * r;
        lost += r - p * r;
      }
      continue;
    }
    next[i] += p * r;
    const double share = (1.0 - p) * r / static_cast<double>(friends.size());
    for (UserId j : friends) next[j] += share;
  }
  return next;
}

void check_steps(int social_steps) {
  if (social_steps < 1) {
    throw ParameterError("social_steps must be a positive integer, got " +
                         std::to_string(social_steps));
  }
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::MD: return "md";
    case Method::HC: return "hc";
    case Method::Hybrid: return "hybrid";
    case Method::SMD: return "smd";
    case Method::GRM: return "grm";
  }
  return "unknown";
}

std::string_view to_string(FriendlessRule r) {
  return r == FriendlessRule::Retain ? "retain" : "drop";
}

Method parse_method(std::string_view name) {
  const auto s = lower(name);
  if (s == "md") return Method::MD;
  if (s == "hc") return Method::HC;
  if (s == "hybrid") return Method::Hybrid;
  if (s == "smd") return Method::SMD;
  if (s == "grm") return Method::GRM;
  throw ParameterError("unknown method '" + std::string(name) + "'");
}

FriendlessRule parse_friendless_rule(std::string_view name) {
  const auto s = lower(name);
  if (s == "retain") return FriendlessRule::Retain;
  if (s == "drop") return FriendlessRule::Drop;
  throw ParameterError("unknown friendless rule '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  const bool needs_lambda = method == Method::Hybrid;
  const bool needs_p = method == Method::SMD;
  if (needs_lambda != lambda.has_value()) {
    throw ParameterError(needs_lambda ? "hybrid requires lambda"
                                      : "lambda is only valid for hybrid");
  }
  if (needs_p != p.has_value()) {
    throw ParameterError(needs_p ? "smd requires p" : "p is only valid for smd");
  }
  if (lambda) check_unit_interval(*lambda, "lambda");
  if (p) check_unit_interval(*p, "p");
  check_steps(social_steps);
}

KernelSpec KernelSpec::with_parameter(double value) const {
  KernelSpec out = *this;
  if (method == Method::Hybrid) {
    out.lambda = value;
  } else if (method == Method::SMD) {
    out.p = value;
  } else {
    throw ParameterError(std::string(to_string(method)) + " has no tunable parameter");
  }
  return out;
}

std::string KernelSpec::describe() const {
  std::string out(to_string(method));
  if (method == Method::Hybrid && lambda) out += "(lambda=" + fmt_param(*lambda) + ")";
  if (method == Method::SMD && p) {
    out += "(p=" + fmt_param(*p) + ",steps=" + std::to_string(social_steps) +
           ",friendless=" + std::string(to_string(friendless_rule)) + ")";
  }
  return out;
}

double ScoreVector::total() const {
  return std::accumulate(scores.begin(), scores.end(), 0.0);
}

std::vector<double> initial_resource(const BipartiteNetwork& net, UserId target) {
  check_target(net.n_users(), target);
  std::vector<double> f(net.n_items(), 0.0);
  for (ItemId a : net.items_of(target)) f[a] = 1.0;
  return f;
}

ScoreVector md_scores(const BipartiteNetwork& net, UserId target) {
  require_profile(net, target);
  ScoreVector out{target, std::vector<double>(net.n_items(), 0.0)};
  spread_to_items(net, spread_to_users(net, target), out);
  return out;
}

ScoreVector hc_scores(const BipartiteNetwork& net, UserId target) {
  require_profile(net, target);
  // A user's temperature is the mean over its items of the initial values.
  std::vector<double> temperature(net.n_users(), 0.0);
  for (ItemId beta : net.items_of(target))
    for (UserId i : net.users_of(beta)) temperature[i] += 1.0;
  for (UserId i = 0; i < net.n_users(); ++i)
    if (temperature[i] != 0.0) temperature[i] /= static_cast<double>(net.user_degree(i));

  ScoreVector out{target, std::vector<double>(net.n_items(), 0.0)};
  for (ItemId a = 0; a < net.n_items(); ++a) {
    const auto users = net.users_of(a);
    if (users.empty()) continue;
    double sum = 0.0;
    for (UserId i : users) sum += temperature[i];
    out.scores[a] = sum / static_cast<double>(users.size());
  }
  return out;
}

ScoreVector hybrid_scores(const BipartiteNetwork& net, UserId target, double lambda) {
  check_unit_interval(lambda, "lambda");
  require_profile(net, target);
  std::vector<double> resource(net.n_users(), 0.0);
  for (ItemId beta : net.items_of(target)) {
    const double share = std::pow(static_cast<double>(net.item_degree(beta)), -lambda);
    for (UserId i : net.users_of(beta)) resource[i] += share;
  }
  ScoreVector out{target, std::vector<double>(net.n_items(), 0.0)};
  spread_to_items(net, resource, out);
  for (ItemId a = 0; a < net.n_items(); ++a) {
    if (out.scores[a] == 0.0) continue;
    out.scores[a] *= std::pow(static_cast<double>(net.item_degree(a)), lambda - 1.0);
  }
  return out;
}

ScoreVector smd_scores(const CombinedNetwork& net, UserId target, double p, int social_steps,
                       FriendlessRule rule) {
  check_unit_interval(p, "p");
  check_steps(social_steps);
  require_profile(net.bipartite(), target);
  ScoreVector out{target, std::vector<double>(net.n_items(), 0.0)};
  auto resource = spread_to_users(net.bipartite(), target);
  for (int step = 0; step < social_steps; ++step)
    resource = social_round(net.social(), resource, p, rule, out.lost_mass);
  spread_to_items(net.bipartite(), resource, out);
  return out;
}

ScoreVector coldstart_scores(const CombinedNetwork& net, UserId target, double p,
                             int social_steps, FriendlessRule rule) {
  check_unit_interval(p, "p");
  check_steps(social_steps);
  check_target(net.n_users(), target);
  const auto friends = net.social().friends_of(target);
  if (friends.empty()) {
    throw UnreachableUserError(
        "user " + std::to_string(target) + " has no friends" +
        (net.bipartite().user_degree(target) == 0 ? " and no items; only the popularity baseline applies"
                                                  : "; coldstart scoring needs a social link"));
  }
  ScoreVector out{target, std::vector<double>(net.n_items(), 0.0)};
  std::vector<double> resource(net.n_users(), 0.0);
  const double share = 1.0 / static_cast<double>(friends.size());
  for (UserId j : friends) resource[j] += share;
  for (int step = 1; step < social_steps; ++step)
    resource = social_round(net.social(), resource, p, rule, out.lost_mass);
  spread_to_items(net.bipartite(), resource, out);
  return out;
}

ScoreVector grm_scores(const BipartiteNetwork& net, UserId target) {
  ScoreVector out{target, std::vector<double>(net.n_items(), 0.0)};
  for (ItemId a = 0; a < net.n_items(); ++a)
    out.scores[a] = static_cast<double>(net.item_degree(a));
  return out;
}

ScoreVector compute_scores(const KernelSpec& spec, const CombinedNetwork& net, UserId target) {
  switch (spec.method) {
    case Method::MD: return md_scores(net.bipartite(), target);
    case Method::HC: return hc_scores(net.bipartite(), target);
    case Method::Hybrid: return hybrid_scores(net.bipartite(), target, spec.lambda.value());
    case Method::SMD:
      return smd_scores(net, target, spec.p.value(), spec.social_steps, spec.friendless_rule);
    case Method::GRM:
      check_target(net.n_users(), target);
      return grm_scores(net.bipartite(), target);
  }
  throw ParameterError("unknown method");
}

std::vector<double> DenseMatrix::apply(const std::vector<double>& v) const {
  std::vector<double> out(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

double DenseMatrix::row_sum(std::size_t r) const {
  double s = 0.0;
  for (std::size_t c = 0; c < cols; ++c) s += (*this)(r, c);
  return s;
}

double DenseMatrix::col_sum(std::size_t c) const {
  double s = 0.0;
  for (std::size_t r = 0; r < rows; ++r) s += (*this)(r, c);
  return s;
}

namespace {

DenseMatrix multiply(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix out(x.rows, y.cols);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const double v = x(r, k);
      if (v == 0.0) continue;
      for (std::size_t c = 0; c < y.cols; ++c) out(r, c) += v * y(k, c);
    }
  return out;
}

struct DenseView {
  std::size_t n = 0, m = 0;
  DenseMatrix a;       // n x m collection indicator
  DenseMatrix s;       // n x n friendship indicator
  std::vector<double> k_user, k_item, k_social;
};

DenseView dense_view(const CombinedNetwork& net) {
  DenseView v;
  v.n = net.n_users();
  v.m = net.n_items();
  v.a = DenseMatrix(v.n, v.m);
  v.s = DenseMatrix(v.n, v.n);
  v.k_user.assign(v.n, 0.0);
  v.k_item.assign(v.m, 0.0);
  v.k_social.assign(v.n, 0.0);
  for (const auto& e : net.bipartite().edges()) v.a(e.user, e.item) = 1.0;
  for (const auto& e : net.social().edges()) {
    v.s(e.a, e.b) = 1.0;
    v.s(e.b, e.a) = 1.0;
  }
  for (std::size_t i = 0; i < v.n; ++i)
    for (std::size_t a = 0; a < v.m; ++a) {
      v.k_user[i] += v.a(i, a);
      v.k_item[a] += v.a(i, a);
    }
  for (std::size_t i = 0; i < v.n; ++i)
    for (std::size_t j = 0; j < v.n; ++j) v.k_social[i] += v.s(i, j);
  return v;
}

// sum_i a_{i alpha} a_{i beta} / k_i
double co_collection(const DenseView& v, std::size_t alpha, std::size_t beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.n; ++i)
    if (v.k_user[i] > 0.0) s += v.a(i, alpha) * v.a(i, beta) / v.k_user[i];
  return s;
}

// sum_i sum_j a_{i alpha} A_ij a_{j beta} / (k_i K_j), plus the self term that
// friendless holders contribute under the retain rule.
double social_co_collection(const DenseView& v, std::size_t alpha, std::size_t beta,
                            FriendlessRule rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.n; ++i) {
    if (v.a(i, alpha) == 0.0) continue;
    for (std::size_t j = 0; j < v.n; ++j) {
      if (v.a(j, beta) == 0.0) continue;
      if (v.k_social[j] > 0.0) {
        s += v.a(i, alpha) * v.s(i, j) * v.a(j, beta) / (v.k_user[i] * v.k_social[j]);
      } else if (rule == FriendlessRule::Retain && i == j) {
        s += v.a(i, alpha) * v.a(j, beta) / v.k_user[i];
      }
    }
  }
  return s;
}

}  // namespace

DenseMatrix transfer_matrix(const KernelSpec& spec, const CombinedNetwork& net,
                            std::size_t max_items) {
  spec.validate();
  if (spec.method == Method::GRM) {
    throw ParameterError("grm has no transfer matrix: its scores do not depend on the profile");
  }
  if (net.n_items() > max_items) {
    throw ParameterError("transfer matrix refused: " + std::to_string(net.n_items()) +
                         " items exceeds the oracle cap of " + std::to_string(max_items));
  }
  const auto v = dense_view(net);
  DenseMatrix w(v.m, v.m);

  if (spec.method == Method::SMD && spec.social_steps > 1) {
    // W = F * S^t * D with D: item -> user, S: one social round, F: user -> item.
    const double p = *spec.p;
    DenseMatrix d(v.n, v.m), s(v.n, v.n), f(v.m, v.n);
    for (std::size_t i = 0; i < v.n; ++i)
      for (std::size_t b = 0; b < v.m; ++b)
        if (v.a(i, b) != 0.0) {
          d(i, b) = 1.0 / v.k_item[b];
          f(b, i) = 1.0 / v.k_user[i];
        }
    for (std::size_t j = 0; j < v.n; ++j) {
      if (v.k_social[j] == 0.0) {
        s(j, j) = spec.friendless_rule == FriendlessRule::Retain ? 1.0 : p;
        continue;
      }
      s(j, j) = p;
      for (std::size_t i = 0; i < v.n; ++i)
        if (v.s(i, j) != 0.0) s(i, j) += (1.0 - p) / v.k_social[j];
    }
    DenseMatrix chain = d;
    for (int t = 0; t < spec.social_steps; ++t) chain = multiply(s, chain);
    return multiply(f, chain);
  }

  for (std::size_t alpha = 0; alpha < v.m; ++alpha) {
    for (std::size_t beta = 0; beta < v.m; ++beta) {
      if (v.k_item[alpha] == 0.0 || v.k_item[beta] == 0.0) continue;
      const double base = co_collection(v, alpha, beta);
      switch (spec.method) {
        case Method::MD:
          w(alpha, beta) = base / v.k_item[beta];
          break;
        case Method::HC:
          w(alpha, beta) = base / v.k_item[alpha];
          break;
        case Method::Hybrid: {
          const double lambda = *spec.lambda;
          w(alpha, beta) =
              base / (std::pow(v.k_item[alpha], 1.0 - lambda) * std::pow(v.k_item[beta], lambda));
          break;
        }
        case Method::SMD: {
          const double p = *spec.p;
          w(alpha, beta) = p * base / v.k_item[beta] +
                           (1.0 - p) / v.k_item[beta] *
                               social_co_collection(v, alpha, beta, spec.friendless_rule);
          break;
        }
        case Method::GRM:
          break;
      }
    }
  }
  return w;
}

}  // namespace socdiff
