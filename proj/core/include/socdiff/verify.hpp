#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "socdiff/diffusion.hpp"
#include "socdiff/network.hpp"

namespace socdiff {

// Small random instance for oracle checks: 2..max_users users, 2..max_items
// items, every user-item and user-user pair present with edge_probability.
// Users left without items receive one random item so that every user can be
// a diffusion target and every holder has an outlet.
CombinedNetwork random_instance(std::uint64_t seed, std::size_t max_users = 15,
                                std::size_t max_items = 20, double edge_probability = 0.3);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  double worst = 0.0;          // largest deviation seen
  std::string counterexample;  // first failure, with the seed that reproduces it
};

struct VerifyOptions {
  std::size_t instances = 50;
  std::uint64_t seed = 1;
  // Rule used by the mass-conservation property. Drop is expected to fail.
  FriendlessRule conservation_rule = FriendlessRule::Retain;
};

// Dense-matrix oracle comparison plus the algebraic and metric properties of
// the kernels, on `instances` random instances.
std::vector<PropertyCheck> run_oracle_suite(const VerifyOptions& options);

}  // namespace socdiff
