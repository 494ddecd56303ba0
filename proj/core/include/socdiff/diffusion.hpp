#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socdiff/network.hpp"

namespace socdiff {

enum class Method { MD, HC, Hybrid, SMD, GRM };

// What a user with no friends does with the share it would pass on during a
// social round. Retain keeps it (mass-conserving); Drop discards it, which is
// the literal behaviour of the closed-form SMD transfer matrix.
enum class FriendlessRule { Retain, Drop };

std::string_view to_string(Method m);
std::string_view to_string(FriendlessRule r);
// Case-insensitive; throws ParameterError for unknown names.
Method parse_method(std::string_view name);
FriendlessRule parse_friendless_rule(std::string_view name);

struct KernelSpec {
  Method method = Method::MD;
  std::optional<double> lambda{};  // Hybrid only
  std::optional<double> p{};       // SMD only
  int social_steps = 1;
  FriendlessRule friendless_rule = FriendlessRule::Retain;

  static KernelSpec md() { return {}; }
  static KernelSpec hc() { return {.method = Method::HC}; }
  static KernelSpec hybrid(double lambda) { return {.method = Method::Hybrid, .lambda = lambda}; }
  static KernelSpec smd(double p, int social_steps = 1,
                        FriendlessRule rule = FriendlessRule::Retain) {
    return {.method = Method::SMD, .p = p, .social_steps = social_steps, .friendless_rule = rule};
  }
  static KernelSpec grm() { return {.method = Method::GRM}; }

  // Throws ParameterError unless each parameter is present exactly when the
  // method needs it and lies in [0, 1].
  void validate() const;

  // Same kernel with its tunable parameter (p or lambda) replaced.
  KernelSpec with_parameter(double value) const;
  bool has_parameter() const { return method == Method::Hybrid || method == Method::SMD; }

  // e.g. "md", "hybrid(lambda=0.5)", "smd(p=0.71,steps=1,friendless=retain)".
  std::string describe() const;
};

struct ScoreVector {
  UserId target = 0;
  std::vector<double> scores;
  // Resource that reached a holder with no outlet (an itemless user in the
  // final step, or a friendless user under FriendlessRule::Drop).
  double lost_mass = 0.0;

  double total() const;
};

// Indicator vector f of the target's collected items.
std::vector<double> initial_resource(const BipartiteNetwork& net, UserId target);

// Mass diffusion: items -> collectors -> their items, equal splits at each hop.
ScoreVector md_scores(const BipartiteNetwork& net, UserId target);

// Heat conduction: each hop takes the average over neighbours.
ScoreVector hc_scores(const BipartiteNetwork& net, UserId target);

// MD/HC interpolation with normaliser k_alpha^(1-lambda) k_beta^lambda.
ScoreVector hybrid_scores(const BipartiteNetwork& net, UserId target, double lambda);

// Social mass diffusion. After the first hop every holder keeps a fraction p
// and spreads the rest evenly over its friends, repeated social_steps times,
// before the final user -> item hop.
ScoreVector smd_scores(const CombinedNetwork& net, UserId target, double p, int social_steps = 1,
                       FriendlessRule rule = FriendlessRule::Retain);

// SMD for a user without a usable profile: one unit starts on the target,
// which hands all of it to its friends. Later rounds (social_steps > 1) apply
// the usual keep-p rule. Itemless holders at the end are counted as lost mass.
ScoreVector coldstart_scores(const CombinedNetwork& net, UserId target, double p,
                             int social_steps = 1,
                             FriendlessRule rule = FriendlessRule::Retain);

// Global ranking: item popularity, identical for every target.
ScoreVector grm_scores(const BipartiteNetwork& net, UserId target = 0);

// Dispatches on spec.method. Users without training items raise NoProfileError
// for every method except GRM.
ScoreVector compute_scores(const KernelSpec& spec, const CombinedNetwork& net, UserId target);

// Row-major dense matrix; only used for small oracle instances.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::vector<double> apply(const std::vector<double>& v) const;
  double row_sum(std::size_t r) const;
  double col_sum(std::size_t c) const;
};

inline constexpr std::size_t kDefaultOracleCap = 500;

// Explicit m x m transfer matrix W with W(alpha, beta) = w_{alpha <- beta},
// built term by term from the closed-form sums. Refuses (ParameterError) when
// m exceeds max_items or the method is GRM, which is not a linear transfer.
DenseMatrix transfer_matrix(const KernelSpec& spec, const CombinedNetwork& net,
                            std::size_t max_items = kDefaultOracleCap);

}  // namespace socdiff
