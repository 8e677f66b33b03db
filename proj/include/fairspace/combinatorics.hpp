#pragma once

#include <map>
#include <vector>

#include "fairspace/measure.hpp"

namespace fairspace {

/// Masses of every piece under every measure: V[j][i] = mu_j(C_i),
/// rows = measures, cols = pieces.
struct ValueTable {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major

  double& at(int j, int i) { return values[static_cast<std::size_t>(j) * cols + i]; }
  double at(int j, int i) const { return values[static_cast<std::size_t>(j) * cols + i]; }
  double row_max(int j) const;
};

ValueTable make_table(int rows, int cols);
/// rows must sum to <= 1 + 1e-6 (closed cells may share boundary atoms)
void validate(const ValueTable& V);
ValueTable value_table(const std::vector<Measure>& measures, const Partition& cells);

/// Nonnegative matrix whose columns each sum to column_target.
/// Orientation follows the extraction pipeline: rows = pieces, cols = measures,
/// and permutations map columns to rows.
struct StochasticMatrix {
  int rows = 0;
  int cols = 0;
  double column_target = 1.0;
  std::vector<double> values;  // row-major

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }
};

StochasticMatrix make_stochastic(int rows, int cols, double column_target);
void validate(const StochasticMatrix& M, double tol = 1e-9);

/// maximum-cardinality bipartite matching (augmenting paths, deterministic:
/// rows in order, columns in increasing order); result[row] = col or -1
std::vector<int> max_matching(const std::vector<std::vector<char>>& adj);

struct BottleneckResult {
  std::vector<int> assignment;  // measure j -> piece assignment[j]
  double envy = 0.0;            // max_j (row_max_j - V[j][assignment[j]])
};

/// permutation minimizing the largest per-measure envy, ties broken
/// lexicographically; binary search over the n^2 candidate thresholds
BottleneckResult bottleneck_assignment(const ValueTable& V);

/// same objective over injections rows -> allowed cols (generic helper for
/// the translated-cones solver); cost[j][i] >= 0
BottleneckResult bottleneck_min_max(const std::vector<std::vector<double>>& cost,
                                    const std::vector<char>& col_allowed);

struct SecretiveResult {
  bool feasible = false;
  // excluded piece -> piece chosen for each measure row (size n-1, all != excluded)
  std::map<int, std::vector<int>> witnesses;
};

/// n-1 measures, n pieces: every piece must be excludable with the remaining
/// pieces still covering all measures by approval matching. Approval means
/// V[j][i] >= row_max_j - eps.
SecretiveResult secretive_feasible(const ValueTable& V, double eps);

/// smallest eps that makes one exclusion feasible / all exclusions feasible
double secretive_exclusion_eps(const ValueTable& V, int excluded);

struct BirkhoffTerm {
  double coeff = 0.0;
  std::vector<int> perm;  // col -> row
};

/// greedy Birkhoff: repeatedly match the positive support and subtract the
/// minimal matched entry; coefficients sum to column_target and
/// sum_k coeff_k * P_k reconstructs M within tol
std::vector<BirkhoffTerm> birkhoff_decompose(const StochasticMatrix& M, double tol = 1e-9);

/// lexicographically least permutation (col -> row) with all chosen entries
/// positive; exists for any (scaled) doubly stochastic matrix
std::vector<int> positive_support_permutation(const StochasticMatrix& M,
                                              double support_tol = 1e-12);

/// positive-support permutation through the forced (row, col) entry;
/// exists whenever M is doubly stochastic and M[row][col] > 0
std::vector<int> forced_column_permutation(const StochasticMatrix& M, int forced_row,
                                           int forced_col, double support_tol = 1e-12);

/// n/m vertical copies of an m x n matrix with rows summing 1 and columns
/// summing m/n; the result is doubly stochastic (asserted within tol, which
/// callers widen when the input rows carry solver residual)
StochasticMatrix stack_matrix(const StochasticMatrix& M, int copies, double tol = 1e-6);

}  // namespace fairspace
