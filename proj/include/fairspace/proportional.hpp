#pragma once

#include <cstdint>
#include <vector>

#include "fairspace/envyfree_convex.hpp"

namespace fairspace {

/// n = m*s with m the largest prime-power divisor; leaf when n itself is a
/// prime power (or 1), then m = n, s = 1
struct PrimePowerFactor {
  bool leaf = true;
  long m = 1;
  long s = 1;
};

PrimePowerFactor prime_power_factor(long n);

/// levels of the factor recursion: 1 for a leaf, else 1 + depth(s)
int recursion_depth(long n);

struct NodeReport {
  bool feasible = false;
  bool guaranteed = false;
  bool stable = true;
  double eps_final = 0.0;
  double residual = 0.0;
  double tol_eq = 0.0;
  Vec residual_trace;
};

struct RecursionNode {
  int n = 1;
  int m = 1;
  int s = 1;
  bool leaf = true;
  Partition cells;                     // cells cut at this node (m of them)
  std::vector<std::vector<int>> maps;  // per group: local measure -> cell here
  NodeReport report;
  std::vector<RecursionNode> children;  // one per cell when internal
};

struct ProportionalOptions {
  double eps_total = 0.05;  // split equally across recursion levels
  double tol_eq = 0.0;
  double mass_tol = 1e-4;
  int restarts = 8;
  int max_evals = 250;
  long equalize_iters = 5000;
  std::uint64_t seed = 0;
};

struct ProportionalResult {
  Partition cells;                     // n cells; empty when a level failed
  std::vector<std::vector<int>> maps;  // per group: measure -> cell (bijection)
  std::vector<Vec> bounds;             // composed mass guarantee per group/measure
  bool feasible = false;
  bool guaranteed = false;
  bool complete = false;  // every level produced cells and maps
  int depth = 1;
  double eps_total = 0.0;
  double eps_level = 0.0;
  RecursionNode tree;
};

/// proportional partition for arbitrary n: prime-power leaves solve the
/// simultaneous envy-free problem (envy-free implies proportional), composite
/// levels allocate groups of n measures into m cells and recurse on each cell
/// with the restricted measures; bounds compose multiplicatively
ProportionalResult solve_proportional(const Measure& mu,
                                      const std::vector<std::vector<Measure>>& groups, int n,
                                      const ProportionalOptions& opts);

}  // namespace fairspace
