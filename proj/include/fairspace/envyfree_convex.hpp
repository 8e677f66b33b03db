#pragma once

#include <cstdint>
#include <vector>

#include "fairspace/combinatorics.hpp"
#include "fairspace/equalize.hpp"

namespace fairspace {

/// Instance of the simultaneous-equalization problem: a base measure whose
/// equal-measure power partitions form the search space, plus dim-1 groups of
/// preference measures (n each, or n-1 when one is withheld per group).
struct GroupInstance {
  Measure base;
  std::vector<std::vector<Measure>> groups;
  int n = 0;
  bool secretive = false;
};

void validate(const GroupInstance& inst);

/// approval-mass matrix, rows = cells, cols = measures:
/// g[i][j] = max(0, mu_j(C_i) - (max_i' mu_j(C_i') - eps)); with n-1 measures
/// the final column is the constant 1/n slot of the withheld measure
std::vector<Vec> g_matrix_envy(const Partition& cells, const std::vector<Measure>& group,
                               double eps, int n);

/// threshold-mass variant for allocation into m cells:
/// g[i][j] = max(0, mu_j(C_i) - (1/m - eps))
std::vector<Vec> g_matrix_threshold(const Partition& cells, const std::vector<Measure>& group,
                                    double eps, int m);

/// scale each column to sum column_target exactly
StochasticMatrix normalize_columns(const std::vector<Vec>& g, double column_target);

struct SimultaneousOptions {
  Vec eps_schedule;         // empty = default 0.1 * 2^-k, 6 steps
  double tol_eq = 0.0;      // residual acceptance; 0 = auto 1e-3*n
  double mass_tol = 1e-4;   // inner equalizer target (floored by sample weights)
  int restarts = 8;
  int max_evals = 250;      // outer evals per restart
  long equalize_iters = 5000;
  std::uint64_t seed = 0;
};

/// snapshot of the outer search at one eps: sites, equalizing weights, the
/// column-normalized matrices and their row-sum residual
struct EqualizerState {
  std::vector<Vec> sites;
  EmpPoint emp;
  double eps = 0.0;
  std::vector<StochasticMatrix> matrices;
  double residual = 0.0;
};

double state_residual(const std::vector<StochasticMatrix>& matrices);

struct SimultaneousResult {
  Partition cells;
  EqualizerState state;
  std::vector<ValueTable> tables;  // per group, rows = measures, cols = cells
  Vec base_masses;
  bool feasible = false;
  bool guaranteed = false;  // piece count is a prime power
  bool stable = true;       // permutation family constant over the last two eps steps
  double eps_final = 0.0;
  double tol_eq = 0.0;
  Vec residual_trace;  // best residual per eps step
  // full mode: per group, measure -> cell
  std::vector<std::vector<int>> assignments;
  // secretive mode: per group, per possible favorite cell i' of the hidden
  // measure, a permutation (columns incl. the hidden slot) -> cells
  std::vector<std::vector<std::vector<int>>> witness_families;
};

/// outer Nelder-Mead over site tuples, inner weight equalization, objective =
/// sum of squared row-sum deviations of the normalized matrices; runs through
/// a decreasing eps schedule with warm starts and extracts the permutations
SimultaneousResult solve_simultaneous(const GroupInstance& inst,
                                      const SimultaneousOptions& opts);

struct GroupAllocationResult {
  Partition cells;  // m cells
  EqualizerState state;
  std::vector<ValueTable> tables;
  Vec base_masses;
  bool feasible = false;
  bool guaranteed = false;
  bool stable = true;
  double eps_final = 0.0;
  double tol_eq = 0.0;
  Vec residual_trace;
  std::vector<std::vector<int>> maps;  // per group: measure j -> cell, preimages n/m
};

/// threshold variant: equalize mu over m cells so that stacking the
/// normalized matrices yields doubly stochastic ones; the extracted
/// permutation reduced mod m gives allocation maps with exact preimage sizes
GroupAllocationResult solve_group_allocation(const Measure& mu,
                                             const std::vector<std::vector<Measure>>& groups,
                                             int m, const SimultaneousOptions& opts);

bool is_prime_power(long n);

}  // namespace fairspace
