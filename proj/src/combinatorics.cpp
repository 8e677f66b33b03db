#include "fairspace/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fairspace {

double ValueTable::row_max(int j) const {
  double m = -kInf;
  for (int i = 0; i < cols; ++i) m = std::max(m, at(j, i));
  return m;
}

ValueTable make_table(int rows, int cols) {
  require(rows >= 1 && cols >= 1, "bad-table", "value table needs positive shape");
  ValueTable V;
  V.rows = rows;
  V.cols = cols;
  V.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  return V;
}

void validate(const ValueTable& V) {
  require(V.values.size() == static_cast<std::size_t>(V.rows) * V.cols, "bad-table",
          "value table shape/storage mismatch");
  for (int j = 0; j < V.rows; ++j) {
    double s = 0.0;
    for (int i = 0; i < V.cols; ++i) {
      double v = V.at(j, i);
      require(v >= 0.0 && v <= 1.0 + 1e-9, "bad-table", "table entries must lie in [0,1]");
      s += v;
    }
    require(s <= 1.0 + 1e-6, "bad-table", "table row exceeds total mass 1");
  }
}

ValueTable value_table(const std::vector<Measure>& measures, const Partition& cells) {
  require(!measures.empty() && !cells.empty(), "bad-table", "need measures and cells");
  ValueTable V = make_table(static_cast<int>(measures.size()), static_cast<int>(cells.size()));
  for (int j = 0; j < V.rows; ++j)
    for (int i = 0; i < V.cols; ++i) V.at(j, i) = cell_mass(measures[j], cells[i]);
  return V;
}

StochasticMatrix make_stochastic(int rows, int cols, double column_target) {
  require(rows >= 1 && cols >= 1, "bad-matrix", "matrix needs positive shape");
  require(column_target > 0.0, "bad-matrix", "column target must be positive");
  StochasticMatrix M;
  M.rows = rows;
  M.cols = cols;
  M.column_target = column_target;
  M.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  return M;
}

void validate(const StochasticMatrix& M, double tol) {
  require(M.values.size() == static_cast<std::size_t>(M.rows) * M.cols, "bad-matrix",
          "matrix shape/storage mismatch");
  for (int j = 0; j < M.cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < M.rows; ++i) {
      require(M.at(i, j) >= -1e-12, "bad-matrix", "matrix entries must be >= 0");
      s += M.at(i, j);
    }
    require(std::abs(s - M.column_target) <= tol, "bad-matrix",
            "column sum deviates from target");
  }
}

namespace {

// Kuhn's augmenting-path matching; rows scanned in order, columns ascending,
// so the result is deterministic.
struct Matcher {
  const std::vector<std::vector<char>>& adj;
  std::vector<int> col_row;
  std::vector<char> seen;

  explicit Matcher(const std::vector<std::vector<char>>& a)
      : adj(a), col_row(a.empty() ? 0 : a[0].size(), -1) {}

  bool augment(int r) {
    for (int c = 0; c < static_cast<int>(adj[r].size()); ++c) {
      if (!adj[r][c] || seen[c]) continue;
      seen[c] = 1;
      if (col_row[c] < 0 || augment(col_row[c])) {
        col_row[c] = r;
        return true;
      }
    }
    return false;
  }

  int solve() {
    int size = 0;
    for (int r = 0; r < static_cast<int>(adj.size()); ++r) {
      seen.assign(col_row.size(), 0);
      if (augment(r)) ++size;
    }
    return size;
  }
};

}  // namespace

std::vector<int> max_matching(const std::vector<std::vector<char>>& adj) {
  if (adj.empty()) return {};
  Matcher m(adj);
  m.solve();
  std::vector<int> row_col(adj.size(), -1);
  for (int c = 0; c < static_cast<int>(m.col_row.size()); ++c)
    if (m.col_row[c] >= 0) row_col[m.col_row[c]] = c;
  return row_col;
}

namespace {

int matching_size(const std::vector<std::vector<char>>& adj) {
  Matcher m(adj);
  return m.solve();
}

// lexicographically smallest row->col injection saturating all rows of adj,
// or empty if none exists
std::vector<int> lex_min_saturating(const std::vector<std::vector<char>>& adj) {
  int R = static_cast<int>(adj.size());
  int C = R ? static_cast<int>(adj[0].size()) : 0;
  std::vector<std::vector<char>> work = adj;
  if (matching_size(work) < R) return {};
  std::vector<int> pick(R, -1);
  std::vector<char> used(C, 0);
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      if (!adj[r][c] || used[c]) continue;
      // freeze r->c, test that the remaining rows still saturate
      std::vector<std::vector<char>> rest;
      rest.reserve(R - r - 1);
      for (int rr = r + 1; rr < R; ++rr) {
        std::vector<char> row = adj[rr];
        for (int cc = 0; cc < C; ++cc)
          if (used[cc] || cc == c) row[cc] = 0;
        rest.push_back(std::move(row));
      }
      if (matching_size(rest) == R - r - 1) {
        pick[r] = c;
        used[c] = 1;
        break;
      }
    }
    if (pick[r] < 0) return {};  // cannot happen when the initial test passed
  }
  return pick;
}

}  // namespace

BottleneckResult bottleneck_min_max(const std::vector<std::vector<double>>& cost,
                                    const std::vector<char>& col_allowed) {
  int R = static_cast<int>(cost.size());
  require(R >= 1, "bad-arg", "bottleneck needs rows");
  int C = static_cast<int>(cost[0].size());
  require(static_cast<int>(col_allowed.size()) == C, "bad-arg", "col mask size mismatch");

  std::vector<double> cand;
  for (int j = 0; j < R; ++j)
    for (int i = 0; i < C; ++i)
      if (col_allowed[i]) cand.push_back(cost[j][i]);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  auto adj_at = [&](double e) {
    std::vector<std::vector<char>> adj(R, std::vector<char>(C, 0));
    for (int j = 0; j < R; ++j)
      for (int i = 0; i < C; ++i)
        adj[j][i] = col_allowed[i] && cost[j][i] <= e + 1e-15;
    return adj;
  };

  int lo = 0, hi = static_cast<int>(cand.size()) - 1;
  require(hi >= 0, "bad-arg", "no admissible columns");
  require(matching_size(adj_at(cand[hi])) == R, "infeasible-assignment",
          "not enough admissible columns to saturate rows");
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (matching_size(adj_at(cand[mid])) == R)
      hi = mid;
    else
      lo = mid + 1;
  }

  BottleneckResult res;
  res.assignment = lex_min_saturating(adj_at(cand[lo]));
  res.envy = 0.0;
  for (int j = 0; j < R; ++j) res.envy = std::max(res.envy, cost[j][res.assignment[j]]);
  return res;
}

BottleneckResult bottleneck_assignment(const ValueTable& V) {
  require(V.rows == V.cols, "bad-table", "bottleneck assignment needs a square table");
  std::vector<std::vector<double>> cost(V.rows, std::vector<double>(V.cols));
  for (int j = 0; j < V.rows; ++j) {
    double m = V.row_max(j);
    for (int i = 0; i < V.cols; ++i) cost[j][i] = m - V.at(j, i);
  }
  return bottleneck_min_max(cost, std::vector<char>(V.cols, 1));
}

namespace {

std::vector<std::vector<char>> approval_graph(const ValueTable& V, double eps, int excluded) {
  std::vector<std::vector<char>> adj(V.rows, std::vector<char>(V.cols, 0));
  for (int j = 0; j < V.rows; ++j) {
    double m = V.row_max(j);
    for (int i = 0; i < V.cols; ++i)
      adj[j][i] = i != excluded && V.at(j, i) >= m - eps - 1e-15;
  }
  return adj;
}

}  // namespace

SecretiveResult secretive_feasible(const ValueTable& V, double eps) {
  require(V.rows == V.cols - 1, "bad-table", "secretive table needs n-1 rows, n cols");
  SecretiveResult res;
  res.feasible = true;
  for (int excl = 0; excl < V.cols; ++excl) {
    auto pick = lex_min_saturating(approval_graph(V, eps, excl));
    if (pick.empty()) {
      res.feasible = false;
      continue;
    }
    res.witnesses[excl] = std::move(pick);
  }
  return res;
}

double secretive_exclusion_eps(const ValueTable& V, int excluded) {
  require(V.rows == V.cols - 1, "bad-table", "secretive table needs n-1 rows, n cols");
  std::vector<std::vector<double>> cost(V.rows, std::vector<double>(V.cols));
  for (int j = 0; j < V.rows; ++j) {
    double m = V.row_max(j);
    for (int i = 0; i < V.cols; ++i) cost[j][i] = m - V.at(j, i);
  }
  std::vector<char> allowed(V.cols, 1);
  allowed[excluded] = 0;
  return bottleneck_min_max(cost, allowed).envy;
}

std::vector<BirkhoffTerm> birkhoff_decompose(const StochasticMatrix& M, double tol) {
  require(M.rows == M.cols, "bad-matrix", "decomposition needs a square matrix");
  validate(M, std::max(tol, 1e-9));
  int n = M.rows;
  // row sums must also hit the target, otherwise no permutation cover exists
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += M.at(i, j);
    require(std::abs(s - M.column_target) <= std::max(tol, 1e-9) * n,
            "not-doubly-stochastic", "row sum deviates from column target");
  }

  double scale = 1.0 / M.column_target;
  std::vector<double> R(M.values);
  for (double& v : R) v *= scale;

  std::vector<BirkhoffTerm> terms;
  auto residual_max = [&] {
    double m = 0.0;
    for (double v : R) m = std::max(m, v);
    return m;
  };

  int guard = n * n - 2 * n + 2 + 2;
  for (int step = 0; step < guard; ++step) {
    if (residual_max() < tol * scale + 1e-15) return terms;
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        adj[j][i] = R[static_cast<std::size_t>(i) * n + j] > 1e-12;  // row of adj = col of R
    auto pick = lex_min_saturating(adj);  // pick[col] = row
    if (pick.empty())
      fail("not-doubly-stochastic", "support admits no permutation before residual vanished");
    double theta = kInf;
    for (int j = 0; j < n; ++j)
      theta = std::min(theta, R[static_cast<std::size_t>(pick[j]) * n + j]);
    for (int j = 0; j < n; ++j) R[static_cast<std::size_t>(pick[j]) * n + j] -= theta;
    BirkhoffTerm t;
    t.coeff = theta * M.column_target;
    t.perm = std::move(pick);
    terms.push_back(std::move(t));
  }
  if (residual_max() < tol * scale + 1e-15) return terms;
  fail("not-doubly-stochastic", "residual did not vanish within the step bound");
}

std::vector<int> positive_support_permutation(const StochasticMatrix& M, double support_tol) {
  require(M.rows == M.cols, "bad-matrix", "support permutation needs a square matrix");
  int n = M.rows;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) adj[j][i] = M.at(i, j) > support_tol;
  auto pick = lex_min_saturating(adj);
  if (pick.empty())
    fail("no-support-permutation", "positive support admits no permutation");
  return pick;
}

std::vector<int> forced_column_permutation(const StochasticMatrix& M, int forced_row,
                                           int forced_col, double support_tol) {
  require(M.rows == M.cols, "bad-matrix", "forced completion needs a square matrix");
  int n = M.rows;
  require(forced_row >= 0 && forced_row < n && forced_col >= 0 && forced_col < n,
          "bad-index", "forced entry out of range");
  if (M.at(forced_row, forced_col) <= support_tol)
    fail("forced-entry-zero", "forced entry has no support");

  // minor without the forced row/col; adj rows = remaining columns
  std::vector<int> rows, cols;
  for (int i = 0; i < n; ++i)
    if (i != forced_row) rows.push_back(i);
  for (int j = 0; j < n; ++j)
    if (j != forced_col) cols.push_back(j);
  std::vector<std::vector<char>> adj(n - 1, std::vector<char>(n - 1, 0));
  for (int cj = 0; cj < n - 1; ++cj)
    for (int ri = 0; ri < n - 1; ++ri)
      adj[cj][ri] = M.at(rows[ri], cols[cj]) > support_tol;
  auto pick = lex_min_saturating(adj);
  if (pick.empty())
    fail("no-forced-completion", "support admits no completion through the forced entry");

  std::vector<int> perm(n, -1);
  perm[forced_col] = forced_row;
  for (int cj = 0; cj < n - 1; ++cj) perm[cols[cj]] = rows[pick[cj]];
  return perm;
}

StochasticMatrix stack_matrix(const StochasticMatrix& M, int copies, double tol) {
  require(copies >= 1, "bad-arg", "need at least one copy");
  require(tol > 0.0, "bad-arg", "tolerance must be positive");
  int m = M.rows, n = M.cols;
  require(m * copies == n, "bad-matrix", "copies * rows must equal cols");
  require(std::abs(M.column_target - static_cast<double>(m) / n) <= 1e-9, "bad-matrix",
          "stacking expects column target m/n");
  validate(M, tol);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += M.at(i, j);
    require(std::abs(s - 1.0) <= tol, "bad-matrix", "stacking expects unit row sums");
  }

  StochasticMatrix out = make_stochastic(n, n, 1.0);
  for (int c = 0; c < copies; ++c)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out.at(c * m + i, j) = M.at(i, j);
  validate(out, tol);
  return out;
}

}  // namespace fairspace
