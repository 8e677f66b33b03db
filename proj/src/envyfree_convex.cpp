#include "fairspace/envyfree_convex.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <utility>

#include "fairspace/nelder_mead.hpp"
#include "fairspace/rng.hpp"

namespace fairspace {

void validate(const GroupInstance& inst) {
  require(inst.n >= 2, "bad-arity", "need at least two pieces");
  validate(inst.base);
  int d = inst.base.dim;
  require(static_cast<int>(inst.groups.size()) == d - 1, "bad-arity",
          "need dim-1 preference groups");
  int expected = inst.secretive ? inst.n - 1 : inst.n;
  for (const auto& group : inst.groups) {
    require(static_cast<int>(group.size()) == expected, "bad-arity",
            "group size must match the piece count (minus one when withheld)");
    for (const auto& mu : group) {
      require(mu.dim == d, "dim-mismatch", "group measure dimension differs from the base");
      validate(mu);
    }
  }
}

namespace {

std::vector<Vec> g_from_table_envy(const ValueTable& table, double eps, int n) {
  std::vector<Vec> g(n, Vec(n, 0.0));
  for (int j = 0; j < table.rows; ++j) {
    double cut = table.row_max(j) - eps;
    for (int i = 0; i < n; ++i) g[i][j] = std::max(0.0, table.at(j, i) - cut);
  }
  if (table.rows == n - 1)
    for (int i = 0; i < n; ++i) g[i][n - 1] = 1.0 / n;
  return g;
}

std::vector<Vec> g_from_table_threshold(const ValueTable& table, double eps, int m) {
  double cut = 1.0 / m - eps;
  std::vector<Vec> g(m, Vec(table.rows, 0.0));
  for (int j = 0; j < table.rows; ++j) {
    bool any = false;
    for (int i = 0; i < m; ++i) {
      g[i][j] = std::max(0.0, table.at(j, i) - cut);
      any = any || g[i][j] > 0.0;
    }
    require(any, "column-anomaly", "a measure clears the 1/m - eps threshold nowhere");
  }
  return g;
}

}  // namespace

std::vector<Vec> g_matrix_envy(const Partition& cells, const std::vector<Measure>& group,
                               double eps, int n) {
  require(eps > 0.0, "bad-arg", "eps must be positive");
  require(static_cast<int>(cells.size()) == n, "bad-arity", "need n cells");
  int rows = static_cast<int>(group.size());
  require(rows == n || rows == n - 1, "bad-arity", "need n or n-1 group measures");
  return g_from_table_envy(value_table(group, cells), eps, n);
}

std::vector<Vec> g_matrix_threshold(const Partition& cells, const std::vector<Measure>& group,
                                    double eps, int m) {
  require(eps > 0.0, "bad-arg", "eps must be positive");
  require(static_cast<int>(cells.size()) == m, "bad-arity", "need m cells");
  require(!group.empty(), "bad-arity", "need at least one group measure");
  return g_from_table_threshold(value_table(group, cells), eps, m);
}

StochasticMatrix normalize_columns(const std::vector<Vec>& g, double column_target) {
  int rows = static_cast<int>(g.size());
  require(rows > 0, "bad-matrix", "empty matrix");
  int cols = static_cast<int>(g[0].size());
  require(cols > 0, "bad-matrix", "empty matrix");
  require(column_target > 0.0, "bad-arg", "column target must be positive");
  StochasticMatrix M = make_stochastic(rows, cols, column_target);
  for (int j = 0; j < cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < rows; ++i) {
      require(static_cast<int>(g[i].size()) == cols, "bad-matrix", "ragged matrix");
      require(g[i][j] >= 0.0, "bad-matrix", "negative entry");
      s += g[i][j];
    }
    require(s > 0.0, "zero-column", "cannot normalize an all-zero column");
    int heaviest = 0;
    double got = 0.0;
    for (int i = 0; i < rows; ++i) {
      M.at(i, j) = column_target * g[i][j] / s;
      got += M.at(i, j);
      if (g[i][j] > g[heaviest][j]) heaviest = i;
    }
    M.at(heaviest, j) += column_target - got;  // sweep the fp residue
  }
  validate(M, 1e-12);
  return M;
}

double state_residual(const std::vector<StochasticMatrix>& matrices) {
  double res = 0.0;
  for (const auto& M : matrices) {
    double total = 0.0;
    Vec f(M.rows, 0.0);
    for (int i = 0; i < M.rows; ++i) {
      for (int j = 0; j < M.cols; ++j) f[i] += M.at(i, j);
      total += f[i];
    }
    double mean = total / M.rows;
    for (double fi : f) res += (fi - mean) * (fi - mean);
  }
  return res;
}

bool is_prime_power(long n) {
  if (n < 2) return false;
  long p = 0;
  for (long q = 2; q * q <= n; ++q)
    if (n % q == 0) {
      p = q;
      break;
    }
  if (p == 0) return true;  // prime
  while (n % p == 0) n /= p;
  return n == 1;
}

namespace {

constexpr double kCollisionPenalty = 1e6;
constexpr double kNonConvergedPenalty = 50.0;
constexpr double kAnomalyPenalty = 25.0;

struct VariantSpec {
  const Measure* base = nullptr;
  const std::vector<std::vector<Measure>>* groups = nullptr;
  int cells = 0;  // power cells searched over
  int n = 0;      // measures per full group
  bool threshold = false;
  bool secretive = false;
  double column_target = 1.0;
};

struct StateBundle {
  bool valid = false;
  double value = std::numeric_limits<double>::infinity();
  EqualizerState state;
  std::vector<ValueTable> tables;
  Partition cells;
};

std::vector<Vec> unflatten(const Vec& flat, int k, int d) {
  std::vector<Vec> sites(k, Vec(d, 0.0));
  for (int i = 0; i < k; ++i)
    for (int a = 0; a < d; ++a) sites[i][a] = flat[i * d + a];
  return sites;
}

Vec flatten(const std::vector<Vec>& sites) {
  Vec flat;
  for (const auto& s : sites) flat.insert(flat.end(), s.begin(), s.end());
  return flat;
}

double min_site_dist2(const std::vector<Vec>& sites) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sites.size(); ++i)
    for (size_t j = i + 1; j < sites.size(); ++j) best = std::min(best, dist2(sites[i], sites[j]));
  return best;
}

// one search trajectory: owns the warm weight vector shared across its evals
struct Evaluator {
  const VariantSpec* vs;
  double eps;
  double mass_tol;
  long equalize_iters;
  Vec warm;

  double operator()(const Vec& flat) { return eval(flat, nullptr); }

  double eval(const Vec& flat, StateBundle* out) {
    auto sites = unflatten(flat, vs->cells, vs->base->dim);
    if (vs->cells > 1 && min_site_dist2(sites) <= 4e-18) return kCollisionPenalty;
    EqualizeOptions eo;
    eo.max_iters = equalize_iters;
    eo.warm_lambdas = warm;
    EqualizeOutcome outcome;
    try {
      outcome = try_equalize_weights(*vs->base, sites, mass_tol, eo);
    } catch (const Error&) {
      return kCollisionPenalty;
    }
    warm = outcome.emp.lambdas;
    if (!outcome.converged) return kNonConvergedPenalty + outcome.max_dev;

    Partition cells = emp_partition(outcome.emp);
    std::vector<ValueTable> tables;
    std::vector<StochasticMatrix> matrices;
    tables.reserve(vs->groups->size());
    matrices.reserve(vs->groups->size());
    try {
      for (const auto& group : *vs->groups) {
        ValueTable table = value_table(group, cells);
        auto g = vs->threshold ? g_from_table_threshold(table, eps, vs->cells)
                               : g_from_table_envy(table, eps, vs->cells);
        matrices.push_back(normalize_columns(g, vs->column_target));
        tables.push_back(std::move(table));
      }
    } catch (const Error&) {
      return kAnomalyPenalty;
    }
    double res = state_residual(matrices);
    if (out) {
      out->valid = true;
      out->value = res;
      out->state = EqualizerState{sites, outcome.emp, eps, std::move(matrices), res};
      out->tables = std::move(tables);
      out->cells = std::move(cells);
    }
    return res;
  }
};

struct RunResult {
  double value = std::numeric_limits<double>::infinity();
  Vec flat;
  Vec warm;
  long evals = 0;
};

bool lex_less_vec(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// axis pattern sweep at shrinking scales; the objective is finely stepped in
// the sites (atoms hop cells), NM alone stalls on the plateaus
RunResult polish_run(Evaluator ev, RunResult in, double diam, int budget) {
  RunResult cur = std::move(in);
  long used = 0;
  for (double h = 0.05 * diam; h > 1e-6 * diam && used < budget; h *= 0.5) {
    bool improved = true;
    int sweeps = 0;
    while (improved && used < budget && sweeps < 12) {
      improved = false;
      ++sweeps;
      for (size_t k = 0; k < cur.flat.size() && used < budget; ++k) {
        for (double sgn : {1.0, -1.0}) {
          Vec cand = cur.flat;
          cand[k] += sgn * h;
          double v = ev.eval(cand, nullptr);
          ++used;
          if (v + 1e-15 < cur.value) {
            cur.value = v;
            cur.flat = std::move(cand);
            cur.warm = ev.warm;
            improved = true;
            break;
          }
        }
      }
    }
  }
  cur.evals += used;
  return cur;
}

RunResult single_run(const VariantSpec& vs, double eps, const SimultaneousOptions& opts,
                     const Vec& start_flat, const Vec& warm, double diam) {
  Evaluator ev{&vs, eps, opts.mass_tol, opts.equalize_iters, warm};
  NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.init_step = 0.1 * diam;
  nm.f_tol = 1e-14;
  nm.x_tol = 1e-12;
  auto r = nelder_mead([&ev](const Vec& x) { return ev(x); }, start_flat, nm);
  RunResult out;
  out.value = r.f;
  out.flat = r.x;
  out.warm = ev.warm;
  out.evals = r.evals;
  return polish_run(std::move(ev), std::move(out), diam, opts.max_evals / 2);
}

void merge_best(RunResult& best, RunResult&& cand) {
  if (cand.value < best.value ||
      (cand.value == best.value && lex_less_vec(cand.flat, best.flat)))
    best = std::move(cand);
}

struct StartPoint {
  Vec flat;
  Vec warm;
};

RunResult run_batch(const VariantSpec& vs, double eps, const SimultaneousOptions& opts,
                    const std::vector<StartPoint>& starts, double diam) {
  RunResult best;
  int count = static_cast<int>(starts.size());
  int workers = thread_budget(count);
  if (workers <= 1 || count <= 1) {
    for (const auto& s : starts) merge_best(best, single_run(vs, eps, opts, s.flat, s.warm, diam));
    return best;
  }
  std::vector<RunResult> results(count);
  std::atomic_int next{0};
  auto worker = [&]() {
    for (;;) {
      int idx = next.fetch_add(1);
      if (idx >= count) return;
      results[idx] = single_run(vs, eps, opts, starts[idx].flat, starts[idx].warm, diam);
    }
  };
  std::vector<std::future<void>> futs;
  futs.reserve(workers);
  for (int w = 0; w < workers; ++w) futs.push_back(std::async(std::launch::async, worker));
  for (auto& f : futs) f.get();
  for (auto& r : results) merge_best(best, std::move(r));
  return best;
}

Vec default_schedule() {
  Vec s;
  double eps = 0.1;
  for (int k = 0; k < 6; ++k, eps *= 0.5) s.push_back(eps);
  return s;
}

Vec checked_schedule(const Vec& given) {
  if (given.empty()) return default_schedule();
  for (size_t i = 0; i < given.size(); ++i) {
    require(given[i] > 0.0, "bad-arg", "eps values must be positive");
    if (i) require(given[i] < given[i - 1], "bad-arg", "eps schedule must decrease");
  }
  return given;
}

struct FamilySnapshot {
  bool ok = false;
  std::vector<std::vector<int>> assignments;
  std::vector<std::vector<std::vector<int>>> witnesses;
  std::vector<std::vector<int>> maps;

  bool operator==(const FamilySnapshot& other) const {
    return ok == other.ok && assignments == other.assignments && witnesses == other.witnesses &&
           maps == other.maps;
  }
};

FamilySnapshot extract_family(const VariantSpec& vs, const StateBundle& bundle, double tol_eq) {
  FamilySnapshot fam;
  if (!bundle.valid) return fam;
  try {
    if (vs.threshold) {
      int copies = vs.n / vs.cells;
      double stack_tol = std::max(1e-6, 2.0 * std::sqrt(tol_eq));
      for (const auto& M : bundle.state.matrices) {
        auto N = stack_matrix(M, copies, stack_tol);
        auto sigma = positive_support_permutation(N);
        std::vector<int> map(vs.n, 0);
        for (int j = 0; j < vs.n; ++j) map[j] = sigma[j] % vs.cells;
        fam.maps.push_back(std::move(map));
      }
    } else if (vs.secretive) {
      for (const auto& M : bundle.state.matrices) {
        std::vector<std::vector<int>> per_favorite;
        for (int fav = 0; fav < vs.cells; ++fav)
          per_favorite.push_back(forced_column_permutation(M, fav, vs.cells - 1));
        fam.witnesses.push_back(std::move(per_favorite));
      }
    } else {
      for (const auto& M : bundle.state.matrices)
        fam.assignments.push_back(positive_support_permutation(M));
    }
    fam.ok = true;
  } catch (const Error&) {
    fam = FamilySnapshot{};
  }
  return fam;
}

struct EngineOutput {
  StateBundle bundle;
  FamilySnapshot family;
  Vec trace;
  bool feasible = false;
  bool stable = true;
  double eps_final = 0.0;
  double tol_eq = 0.0;
};

EngineOutput run_engine(const VariantSpec& vs, const SimultaneousOptions& opts) {
  Vec schedule = checked_schedule(opts.eps_schedule);
  double tol_eq = opts.tol_eq > 0.0 ? opts.tol_eq : 1e-3 * vs.cells;
  Vec lo, hi;
  support_box(*vs.base, lo, hi);
  double diam = std::max(norm(sub(hi, lo)), 1e-6);

  int restarts = std::max(1, opts.restarts);
  RunResult best;
  std::vector<FamilySnapshot> families;
  EngineOutput out;
  out.tol_eq = tol_eq;

  for (size_t step = 0; step < schedule.size(); ++step) {
    double eps = schedule[step];
    std::vector<StartPoint> starts;
    if (step == 0) {
      for (int r = 0; r < restarts; ++r) {
        Rng rng(opts.seed + 1000003ULL * static_cast<std::uint64_t>(r));
        starts.push_back({flatten(kmeans_pp_sites(*vs.base, vs.cells, rng)), Vec{}});
      }
    } else {
      starts.push_back({best.flat, best.warm});
    }
    RunResult stage = run_batch(vs, eps, opts, starts, diam);
    if (step > 0 && stage.value > tol_eq) {
      // warm start stalled; rescue with fresh restarts at this eps
      std::vector<StartPoint> rescue;
      int extra = std::max(1, restarts / 2);
      for (int r = 0; r < extra; ++r) {
        Rng rng(opts.seed + 7919ULL * static_cast<std::uint64_t>(step) +
                1000003ULL * static_cast<std::uint64_t>(r) + 17ULL);
        rescue.push_back({flatten(kmeans_pp_sites(*vs.base, vs.cells, rng)), Vec{}});
      }
      merge_best(stage, run_batch(vs, eps, opts, rescue, diam));
    }
    best = stage;

    Evaluator ev{&vs, eps, opts.mass_tol, opts.equalize_iters, best.warm};
    StateBundle bundle;
    double val = ev.eval(best.flat, &bundle);
    out.trace.push_back(bundle.valid ? bundle.state.residual : val);

    FamilySnapshot fam = extract_family(vs, bundle, tol_eq);
    families.push_back(fam);
    if (step + 1 == schedule.size()) {
      out.bundle = std::move(bundle);
      out.family = std::move(fam);
      out.eps_final = eps;
      out.feasible = out.bundle.valid && out.bundle.state.residual <= tol_eq && out.family.ok;
    }
  }
  size_t L = families.size();
  out.stable =
      L < 2 || (families[L - 2].ok && families[L - 1].ok && families[L - 2] == families[L - 1]);
  return out;
}

Vec closed_cell_masses(const Measure& mu, const Partition& cells) {
  Vec masses;
  masses.reserve(cells.size());
  for (const auto& cell : cells) masses.push_back(cell_mass(mu, cell));
  return masses;
}

}  // namespace

SimultaneousResult solve_simultaneous(const GroupInstance& inst, const SimultaneousOptions& opts) {
  validate(inst);
  VariantSpec vs;
  vs.base = &inst.base;
  vs.groups = &inst.groups;
  vs.cells = inst.n;
  vs.n = inst.n;
  vs.threshold = false;
  vs.secretive = inst.secretive;
  vs.column_target = 1.0;

  EngineOutput eng = run_engine(vs, opts);
  SimultaneousResult res;
  res.state = std::move(eng.bundle.state);
  res.tables = std::move(eng.bundle.tables);
  res.cells = std::move(eng.bundle.cells);
  if (eng.bundle.valid) res.base_masses = closed_cell_masses(inst.base, res.cells);
  res.feasible = eng.feasible;
  res.guaranteed = inst.n == 1 || is_prime_power(inst.n);
  res.stable = eng.stable;
  res.eps_final = eng.eps_final;
  res.tol_eq = eng.tol_eq;
  res.residual_trace = std::move(eng.trace);
  res.assignments = std::move(eng.family.assignments);
  res.witness_families = std::move(eng.family.witnesses);
  return res;
}

GroupAllocationResult solve_group_allocation(const Measure& mu,
                                             const std::vector<std::vector<Measure>>& groups,
                                             int m, const SimultaneousOptions& opts) {
  validate(mu);
  require(m >= 1, "bad-arity", "need at least one cell");
  require(static_cast<int>(groups.size()) == mu.dim - 1, "bad-arity",
          "need dim-1 preference groups");
  int n = -1;
  for (const auto& group : groups) {
    if (n < 0) n = static_cast<int>(group.size());
    require(static_cast<int>(group.size()) == n, "bad-arity", "groups must share a size");
    for (const auto& nu : group) {
      require(nu.dim == mu.dim, "dim-mismatch", "group measure dimension differs from the base");
      validate(nu);
    }
  }
  if (n < 0) n = m;  // dim 1: no groups, pure equalization
  require(n >= 1 && n % m == 0, "bad-arity", "cell count must divide the group size");

  VariantSpec vs;
  vs.base = &mu;
  vs.groups = &groups;
  vs.cells = m;
  vs.n = n;
  vs.threshold = true;
  vs.secretive = false;
  vs.column_target = static_cast<double>(m) / n;

  EngineOutput eng = run_engine(vs, opts);
  GroupAllocationResult res;
  res.state = std::move(eng.bundle.state);
  res.tables = std::move(eng.bundle.tables);
  res.cells = std::move(eng.bundle.cells);
  if (eng.bundle.valid) res.base_masses = closed_cell_masses(mu, res.cells);
  res.feasible = eng.feasible;
  res.guaranteed = m == 1 || is_prime_power(m);
  res.stable = eng.stable;
  res.eps_final = eng.eps_final;
  res.tol_eq = eng.tol_eq;
  res.residual_trace = std::move(eng.trace);
  res.maps = std::move(eng.family.maps);
  return res;
}

}  // namespace fairspace
