#include "fairspace/proportional.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <utility>

namespace fairspace {

PrimePowerFactor prime_power_factor(long n) {
  require(n >= 1, "bad-arity", "need a positive piece count");
  if (n == 1 || is_prime_power(n)) return {true, n, 1};
  long best = 1;
  long rest = n;
  for (long p = 2; p * p <= rest; ++p) {
    if (rest % p) continue;
    long pp = 1;
    while (rest % p == 0) {
      rest /= p;
      pp *= p;
    }
    best = std::max(best, pp);
  }
  if (rest > 1) best = std::max(best, rest);  // leftover prime factor
  return {false, best, n / best};
}

int recursion_depth(long n) {
  int depth = 1;
  for (auto f = prime_power_factor(n); !f.leaf; f = prime_power_factor(f.s)) ++depth;
  return depth;
}

namespace {

// decreasing schedule that ends exactly at the per-level budget
Vec level_schedule(double eps_level) {
  Vec v;
  double e = 0.1;
  while (e > eps_level * 1.0000001 && v.size() < 5) {
    v.push_back(e);
    e *= 0.5;
  }
  v.push_back(eps_level);
  return v;
}

SimultaneousOptions level_options(const ProportionalOptions& opts, double eps_level,
                                  std::uint64_t seed) {
  SimultaneousOptions so;
  so.eps_schedule = level_schedule(eps_level);
  so.tol_eq = opts.tol_eq;
  so.mass_tol = opts.mass_tol;
  so.restarts = opts.restarts;
  so.max_evals = opts.max_evals;
  so.equalize_iters = opts.equalize_iters;
  so.seed = seed;
  return so;
}

std::uint64_t child_seed(std::uint64_t seed, int j) {
  return seed * 6364136223846793005ULL + 1442695040888963407ULL + static_cast<std::uint64_t>(j);
}

ProportionalResult solve_node(const Measure& mu, const std::vector<std::vector<Measure>>& groups,
                              int n, const ProportionalOptions& opts, double eps_level,
                              std::uint64_t seed);

std::optional<ProportionalResult> solve_child(const Measure& mu,
                                              const std::vector<std::vector<Measure>>& groups,
                                              const ConvexCell& cell,
                                              const std::vector<std::vector<int>>& classes, int s,
                                              const ProportionalOptions& opts, double eps_level,
                                              std::uint64_t seed) {
  try {
    Measure base = restrict(mu, cell);
    std::vector<std::vector<Measure>> sub(groups.size());
    for (size_t r = 0; r < groups.size(); ++r) {
      sub[r].reserve(classes[r].size());
      for (int i : classes[r]) sub[r].push_back(restrict(groups[r][i], cell));
    }
    return solve_node(base, sub, s, opts, eps_level, seed);
  } catch (const Error&) {
    return std::nullopt;  // empty restriction; the level is reported infeasible
  }
}

ProportionalResult solve_node(const Measure& mu, const std::vector<std::vector<Measure>>& groups,
                              int n, const ProportionalOptions& opts, double eps_level,
                              std::uint64_t seed) {
  int R = static_cast<int>(groups.size());
  ProportionalResult res;
  res.eps_level = eps_level;

  if (n == 1) {
    res.cells = {whole_space(mu.dim)};
    res.maps.assign(R, std::vector<int>{0});
    res.bounds.assign(R, Vec{1.0});
    res.feasible = res.guaranteed = res.complete = true;
    res.tree = RecursionNode{};
    res.tree.cells = res.cells;
    res.tree.maps = res.maps;
    res.tree.report = NodeReport{true, true, true, 0.0, 0.0, 0.0, {}};
    return res;
  }

  auto factor = prime_power_factor(n);
  if (factor.leaf) {
    GroupInstance inst{mu, groups, n, false};
    auto sim = solve_simultaneous(inst, level_options(opts, eps_level, seed));
    res.cells = sim.cells;
    res.maps = sim.assignments;
    res.bounds.assign(R, Vec(n, 1.0 / n - sim.eps_final));
    res.complete = static_cast<int>(sim.assignments.size()) == R &&
                   static_cast<int>(sim.cells.size()) == n;
    res.feasible = sim.feasible && res.complete;
    res.guaranteed = sim.guaranteed;
    res.tree.n = n;
    res.tree.m = n;
    res.tree.s = 1;
    res.tree.leaf = true;
    res.tree.cells = sim.cells;
    res.tree.maps = sim.assignments;
    res.tree.report = NodeReport{sim.feasible,        sim.guaranteed, sim.stable,
                                 sim.eps_final,       sim.state.residual, sim.tol_eq,
                                 sim.residual_trace};
    if (!res.complete) {
      res.cells.clear();
      res.maps.clear();
      res.bounds.clear();
    }
    return res;
  }

  int m = static_cast<int>(factor.m), s = static_cast<int>(factor.s);
  auto alloc = solve_group_allocation(mu, groups, m, level_options(opts, eps_level, seed));
  res.tree.n = n;
  res.tree.m = m;
  res.tree.s = s;
  res.tree.leaf = false;
  res.tree.cells = alloc.cells;
  res.tree.maps = alloc.maps;
  res.tree.report = NodeReport{alloc.feasible,        alloc.guaranteed, alloc.stable,
                               alloc.eps_final,       alloc.state.residual, alloc.tol_eq,
                               alloc.residual_trace};
  if (static_cast<int>(alloc.maps.size()) != R || static_cast<int>(alloc.cells.size()) != m)
    return res;  // no extraction, nothing to recurse on

  // index classes per cell and group, ascending; preimage sizes are exact
  std::vector<std::vector<std::vector<int>>> classes(m,
                                                     std::vector<std::vector<int>>(R));
  for (int r = 0; r < R; ++r)
    for (int i = 0; i < n; ++i) classes[alloc.maps[r][i]][r].push_back(i);
  for (int j = 0; j < m; ++j)
    for (int r = 0; r < R; ++r)
      require(static_cast<int>(classes[j][r].size()) == s, "bad-preimage",
              "allocation preimages must have n/m elements");

  std::vector<std::optional<ProportionalResult>> kids(m);
  int workers = thread_budget(m);
  if (workers > 1) {
    std::vector<std::future<std::optional<ProportionalResult>>> futs;
    futs.reserve(m);
    for (int j = 0; j < m; ++j)
      futs.push_back(std::async(std::launch::async, solve_child, std::cref(mu), std::cref(groups),
                                std::cref(alloc.cells[j]), std::cref(classes[j]), s,
                                std::cref(opts), eps_level, child_seed(seed, j)));
    for (int j = 0; j < m; ++j) kids[j] = futs[j].get();
  } else {
    for (int j = 0; j < m; ++j)
      kids[j] = solve_child(mu, groups, alloc.cells[j], classes[j], s, opts, eps_level,
                            child_seed(seed, j));
  }

  res.complete = true;
  res.feasible = alloc.feasible;
  res.guaranteed = alloc.guaranteed;
  res.tree.children.resize(m);
  for (int j = 0; j < m; ++j) {
    if (!kids[j]) {
      res.complete = false;
      res.feasible = false;
      continue;
    }
    res.tree.children[j] = kids[j]->tree;
    res.complete = res.complete && kids[j]->complete;
    res.feasible = res.feasible && kids[j]->feasible;
    res.guaranteed = res.guaranteed && kids[j]->guaranteed;
  }
  if (!res.complete) return res;

  double parent_bound = 1.0 / m - alloc.eps_final;
  res.cells.assign(n, empty_cell(mu.dim));
  res.maps.assign(R, std::vector<int>(n, 0));
  res.bounds.assign(R, Vec(n, 0.0));
  for (int j = 0; j < m; ++j) {
    const auto& kid = *kids[j];
    for (int h = 0; h < s; ++h) res.cells[s * j + h] = intersect_cells(alloc.cells[j], kid.cells[h]);
    for (int r = 0; r < R; ++r)
      for (int rank = 0; rank < s; ++rank) {
        int i = classes[j][r][rank];
        int h = kid.maps[r][rank];
        res.maps[r][i] = s * j + h;
        res.bounds[r][i] = parent_bound * kid.bounds[r][rank];
      }
  }
  return res;
}

}  // namespace

ProportionalResult solve_proportional(const Measure& mu,
                                      const std::vector<std::vector<Measure>>& groups, int n,
                                      const ProportionalOptions& opts) {
  validate(mu);
  require(n >= 1, "bad-arity", "need a positive piece count");
  require(static_cast<int>(groups.size()) == mu.dim - 1, "bad-arity",
          "need dim-1 preference groups");
  for (const auto& group : groups) {
    require(static_cast<int>(group.size()) == n, "bad-arity", "each group needs n measures");
    for (const auto& nu : group) {
      require(nu.dim == mu.dim, "dim-mismatch", "group measure dimension differs from the base");
      validate(nu);
    }
  }
  require(opts.eps_total > 0.0, "bad-arg", "eps budget must be positive");

  int depth = recursion_depth(n);
  double eps_level = opts.eps_total / depth;
  ProportionalResult res = solve_node(mu, groups, n, opts, eps_level, opts.seed);
  res.depth = depth;
  res.eps_total = opts.eps_total;
  res.eps_level = eps_level;
  return res;
}

}  // namespace fairspace
