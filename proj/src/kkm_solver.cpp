#include "fairspace/kkm_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>

#include "fairspace/nelder_mead.hpp"
#include "fairspace/rng.hpp"

namespace fairspace {

namespace {

SolveMode resolve_mode(int pieces, int n_measures, SolveMode requested) {
  SolveMode inferred;
  if (n_measures == pieces)
    inferred = SolveMode::Full;
  else if (n_measures == pieces - 1)
    inferred = SolveMode::Secretive;
  else
    fail("bad-arity", "need pieces or pieces-1 measures, got " + std::to_string(n_measures) +
                          " for " + std::to_string(pieces) + " pieces");
  if (requested != SolveMode::Auto && requested != inferred)
    fail("bad-arity", "requested mode contradicts the measure count");
  return inferred;
}

double table_objective(const ValueTable& V, SolveMode mode) {
  if (mode == SolveMode::Full) return bottleneck_assignment(V).envy;
  double total = 0.0;
  for (int excl = 0; excl < V.cols; ++excl) total += secretive_exclusion_eps(V, excl);
  return total;
}

}  // namespace

double envy_objective(const DeltaSpace& space, const std::vector<Measure>& measures,
                      const SimplexPoint& x, SolveMode mode) {
  SolveMode m = resolve_mode(space.pieces(), static_cast<int>(measures.size()), mode);
  return table_objective(value_table(measures, evaluate(space, x)), m);
}

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

// deterministic descent polish for plateaued (sampled-mass) objectives:
// axis and pairwise-diagonal steps on the chart at shrinking scales, strict
// improvement only; reruns the scale schedule while a full pass still improves
// so coarse moves stay available after fine moves unlock a new region
void pattern_polish(int n, const std::function<double(const SimplexPoint&)>& f,
                    SimplexPoint& x, double& val, long& evals) {
  if (n <= 1) return;
  Vec u = simplex_to_chart(x.coords);
  std::size_t m = u.size();
  std::vector<Vec> dirs;
  for (std::size_t k = 0; k < m; ++k) {
    Vec d(m, 0.0);
    d[k] = 1.0;
    dirs.push_back(std::move(d));
  }
  const double c = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j + 1 < m; ++j)
    for (std::size_t k = j + 1; k < m; ++k)
      for (double s : {c, -c}) {
        Vec d(m, 0.0);
        d[j] = c;
        d[k] = s;
        dirs.push_back(std::move(d));
      }
  for (int cycle = 0; cycle < 3; ++cycle) {
    bool cycle_improved = false;
    for (double h = 0.05; h >= 1e-7; h *= 0.5) {
      bool improved = true;
      int guard = 0;
      while (improved && guard++ < 40) {
        improved = false;
        for (const Vec& d : dirs) {
          for (double s : {h, -h}) {
            Vec cand = u;
            for (std::size_t k = 0; k < m; ++k) cand[k] += s * d[k];
            SimplexPoint xc = chart_to_simplex(cand);
            double fv = f(xc);
            ++evals;
            if (fv < val - 1e-15) {
              val = fv;
              u = simplex_to_chart(xc.coords);
              x = std::move(xc);
              improved = true;
              cycle_improved = true;
            }
          }
        }
      }
    }
    if (!cycle_improved) break;
  }
}

}  // namespace

MultistartResult multistart_simplex_minimize(int n,
                                             const std::function<double(const SimplexPoint&)>& f,
                                             const SolveOptions& opts) {
  require(n >= 1, "bad-arg", "need at least one coordinate");
  require(opts.restarts >= 1 && opts.max_evals >= 1, "bad-arg",
          "restarts and eval budget must be positive");

  struct Run {
    SimplexPoint x;
    double value = kInf;
    long evals = 0;
  };

  auto run_one = [&](int r) {
    SimplexPoint start = r == 0 ? simplex_point(Vec(n, 1.0 / n))
                                : lds_simplex_point(r - 1, n, opts.seed);
    NelderMeadOptions nm;
    nm.max_evals = opts.max_evals;
    nm.init_step = 0.15;
    auto wrapped = [&](const Vec& u) { return f(chart_to_simplex(u)); };
    NelderMeadResult res = nelder_mead(wrapped, simplex_to_chart(start.coords), nm);
    Run out;
    out.x = chart_to_simplex(res.x);
    out.value = res.f;
    out.evals = res.evals;
    // each restart gets its own polish; the merged best gets one more below
    pattern_polish(n, f, out.x, out.value, out.evals);
    return out;
  };

  std::vector<Run> runs(opts.restarts);
  int workers = thread_budget(opts.restarts);
  if (workers <= 1) {
    for (int r = 0; r < opts.restarts; ++r) runs[r] = run_one(r);
  } else {
    std::vector<std::future<void>> futs;
    std::atomic_int next{0};
    for (int w = 0; w < workers; ++w)
      futs.push_back(std::async(std::launch::async, [&] {
        for (int r = next.fetch_add(1); r < opts.restarts; r = next.fetch_add(1))
          runs[r] = run_one(r);
      }));
    for (auto& fu : futs) fu.get();
  }

  MultistartResult best;
  best.value = kInf;
  for (const auto& run : runs) {
    best.evals += run.evals;
    if (run.value < best.value ||
        (run.value == best.value && lex_less(run.x.coords, best.x.coords)))
      best.x = run.x, best.value = run.value;
  }
  pattern_polish(n, f, best.x, best.value, best.evals);
  return best;
}

namespace {

EnvyCertificate certify_table(const ValueTable& V, SolveMode mode, double eps_mass) {
  validate(V);
  EnvyCertificate cert;
  cert.table = V;
  cert.eps_used = eps_mass;
  if (mode == SolveMode::Full) {
    BottleneckResult b = bottleneck_assignment(V);
    cert.assignment = b.assignment;
    cert.envy = b.envy;
    cert.feasible = b.envy <= eps_mass;
    return cert;
  }
  cert.secretive = true;
  double worst = 0.0;
  for (int excl = 0; excl < V.cols; ++excl)
    worst = std::max(worst, secretive_exclusion_eps(V, excl));
  cert.envy = worst;
  SecretiveResult sec = secretive_feasible(V, eps_mass);
  cert.feasible = sec.feasible;
  cert.witnesses = std::move(sec.witnesses);
  return cert;
}

}  // namespace

SolveResult solve_envy_free(const DeltaSpace& space, const std::vector<Measure>& measures,
                            const SolveOptions& opts) {
  require(opts.eps_mass > 0.0, "bad-eps", "certificate tolerance must be positive");
  int n = space.pieces();
  SolveMode mode = resolve_mode(n, static_cast<int>(measures.size()), opts.mode);
  for (const auto& mu : measures)
    require(mu.dim == space.dim(), "bad-dim", "measure/space dimension mismatch");

  auto objective = [&](const SimplexPoint& x) {
    return table_objective(value_table(measures, evaluate(space, x)), mode);
  };

  MultistartResult best = multistart_simplex_minimize(n, objective, opts);

  SolveResult out;
  out.x = best.x;
  out.partition = evaluate(space, best.x);
  out.objective = best.value;
  out.evals = best.evals;
  out.cert = certify_table(value_table(measures, out.partition), mode, opts.eps_mass);
  return out;
}

OracleResult brute_force_oracle(const DeltaSpace& space, const std::vector<Measure>& measures,
                                int resolution) {
  int n = space.pieces();
  require(resolution >= 1, "bad-arg", "resolution must be positive");
  require(n <= 4 || resolution < 32, "oracle-budget",
          "grid oracle limited to 4 pieces at resolution >= 32");
  SolveMode mode = resolve_mode(n, static_cast<int>(measures.size()), SolveMode::Auto);

  OracleResult best;
  best.value = kInf;
  for (const auto& x : simplex_grid(n, resolution)) {
    double v = table_objective(value_table(measures, evaluate(space, x)), mode);
    if (v < best.value || (v == best.value && lex_less(x.coords, best.x.coords))) {
      best.value = v;
      best.x = x;
    }
  }
  return best;
}

namespace {

// deterministic unit directions for the tiling probe
std::vector<Vec> probe_directions(int dim, int count, std::uint64_t seed) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (dim == 1) {
    dirs.push_back(Vec{1.0});
    dirs.push_back(Vec{-1.0});
    return dirs;
  }
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      double a = 6.28318530717958647692 * (k + 0.382) / count;
      dirs.push_back(Vec{std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  Rng rng(seed ^ 0xD1CE5ull);
  while (static_cast<int>(dirs.size()) < count) {
    Vec v(dim);
    for (double& c : v) c = rng.normal();
    double nn = norm(v);
    if (nn > 1e-9) dirs.push_back(scaled(v, 1.0 / nn));
  }
  return dirs;
}

void check_cones(const std::vector<ConvexCell>& cones, int dim, std::uint64_t seed) {
  for (const auto& cone : cones) {
    require(cone.dim == dim, "bad-cone", "cones must share one dimension");
    require(!cone.ball, "bad-cone", "cones cannot carry ball constraints");
    require(!cone.constraints.empty(), "bad-cone", "cone needs at least one constraint");
    for (const auto& h : cone.constraints)
      require(std::abs(h.offset) <= 1e-9, "bad-cone", "cone facets must pass the origin");
  }
  for (const auto& dir : probe_directions(dim, 512, seed)) {
    bool covered = false;
    for (const auto& cone : cones)
      if (contains(cone, dir, 1e-9)) {
        covered = true;
        break;
      }
    require(covered, "cones-not-tiling", "probe ray escapes every cone");
  }
}

// halfspace {<y,u> <= 0} containing the cone: any nonnegative combination of
// the outward facet normals works, we take their sum
Vec cone_outer_normal(const ConvexCell& cone) {
  Vec u(cone.dim, 0.0);
  for (const auto& h : cone.constraints) {
    double sgn = h.sense == Sense::Ge ? -1.0 : 1.0;
    for (int k = 0; k < cone.dim; ++k) u[k] += sgn * h.normal[k];
  }
  require(norm(u) > 1e-9, "bad-cone", "cone facet normals cancel out");
  return normalized(u);
}

// solve the d x d system rows*x = rhs by Gaussian elimination
Vec solve_linear(std::vector<Vec> rows, Vec rhs) {
  int d = static_cast<int>(rhs.size());
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(rows[r][col]) > std::abs(rows[piv][col])) piv = r;
    require(std::abs(rows[piv][col]) > 1e-12, "degenerate-frame",
            "search simplex facets are linearly dependent");
    std::swap(rows[piv], rows[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      double f = rows[r][col] / rows[col][col];
      for (int c = col; c < d; ++c) rows[r][c] -= f * rows[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = rhs[i] / rows[i][i];
  return x;
}

void check_levi_arity(const std::vector<ConvexCell>& cones,
                      const std::vector<Measure>& measures, const Vec& alphas, int& dim,
                      SolveMode& mode) {
  require(!cones.empty(), "bad-arity", "need cones");
  dim = cones.front().dim;
  require(static_cast<int>(cones.size()) == dim + 1, "bad-arity",
          "need exactly dim+1 cones");
  int nm = static_cast<int>(measures.size());
  if (nm == dim + 1)
    mode = SolveMode::Full;
  else if (nm == dim)
    mode = SolveMode::Secretive;
  else
    fail("bad-arity", "need dim+1 (full) or dim (secretive) measures");
  require(alphas.size() == cones.size(), "bad-arity", "need one alpha per cone");
  double s = 0.0;
  for (double a : alphas) {
    require(a > 0.0, "bad-arg", "alphas must be positive");
    s += a;
  }
  require(std::abs(s - 1.0) <= 1e-9, "bad-arg", "alphas must sum to 1");
  for (const auto& mu : measures)
    require(mu.dim == dim, "bad-dim", "measure/cone dimension mismatch");
}

}  // namespace

LeviFrame build_levi_frame(const std::vector<ConvexCell>& cones,
                           const std::vector<Measure>& measures, const Vec& alphas) {
  int dim = 0;
  SolveMode mode = SolveMode::Full;
  check_levi_arity(cones, measures, alphas, dim, mode);

  LeviFrame frame;
  int n = dim + 1;
  frame.u.reserve(n);
  frame.c.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec u = cone_outer_normal(cones[i]);
    // push the covering halfspace outward until every measure leaves it
    double c = -1.0;
    bool ok = false;
    for (int step = 0; step < 60 && !ok; ++step, c *= 2.0) {
      ok = true;
      ConvexCell beyond = whole_space(dim);
      beyond.constraints.push_back(halfspace(u, c, Sense::Le));
      for (const auto& mu : measures)
        if (cell_mass(mu, beyond) >= alphas[i] - 1e-12) {
          ok = false;
          break;
        }
    }
    require(ok, "translation-failure", "could not push facet mass below alpha");
    frame.u.push_back(std::move(u));
    frame.c[i] = c / 2.0;  // undo the loop's trailing doubling
  }

  frame.vertices.resize(n);
  for (int k = 0; k < n; ++k) {
    std::vector<Vec> rows;
    Vec rhs;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      rows.push_back(frame.u[i]);
      rhs.push_back(frame.c[i]);
    }
    frame.vertices[k] = solve_linear(std::move(rows), std::move(rhs));
    double margin = dot(frame.vertices[k], frame.u[k]) - frame.c[k];
    require(margin >= -1e-7, "degenerate-frame",
            "facet halfspaces do not bound a simplex");
  }
  return frame;
}

namespace {

ValueTable levi_table(const std::vector<ConvexCell>& cones,
                      const std::vector<Measure>& measures, const Vec& x) {
  ValueTable V = make_table(static_cast<int>(measures.size()), static_cast<int>(cones.size()));
  for (int i = 0; i < V.cols; ++i) {
    ConvexCell moved = translate_cell(cones[i], x);
    for (int j = 0; j < V.rows; ++j) V.at(j, i) = cell_mass(measures[j], moved);
  }
  return V;
}

std::vector<std::vector<double>> levi_cost(const ValueTable& V, const Vec& alphas) {
  std::vector<std::vector<double>> cost(V.rows, std::vector<double>(V.cols));
  for (int j = 0; j < V.rows; ++j)
    for (int i = 0; i < V.cols; ++i) cost[j][i] = std::max(0.0, alphas[i] - V.at(j, i));
  return cost;
}

double levi_table_objective(const ValueTable& V, const Vec& alphas, SolveMode mode) {
  auto cost = levi_cost(V, alphas);
  if (mode == SolveMode::Full)
    return bottleneck_min_max(cost, std::vector<char>(V.cols, 1)).envy;
  double total = 0.0;
  for (int excl = 0; excl < V.cols; ++excl) {
    std::vector<char> allowed(V.cols, 1);
    allowed[excl] = 0;
    total += bottleneck_min_max(cost, allowed).envy;
  }
  return total;
}

}  // namespace

double levi_objective(const std::vector<ConvexCell>& cones,
                      const std::vector<Measure>& measures, const Vec& alphas, const Vec& x,
                      SolveMode mode) {
  int dim = 0;
  SolveMode inferred = SolveMode::Full;
  check_levi_arity(cones, measures, alphas, dim, inferred);
  if (mode != SolveMode::Auto)
    require(mode == inferred, "bad-arity", "mode contradicts the measure count");
  return levi_table_objective(levi_table(cones, measures, x), alphas, inferred);
}

LeviResult solve_levi(const std::vector<ConvexCell>& cones, const std::vector<Measure>& measures,
                      const Vec& alphas, const SolveOptions& opts) {
  require(opts.eps_mass > 0.0, "bad-eps", "certificate tolerance must be positive");
  int dim = 0;
  SolveMode mode = SolveMode::Full;
  check_levi_arity(cones, measures, alphas, dim, mode);
  if (opts.mode != SolveMode::Auto)
    require(opts.mode == mode, "bad-arity", "mode contradicts the measure count");
  check_cones(cones, dim, opts.seed);

  LeviResult out;
  out.frame = build_levi_frame(cones, measures, alphas);
  out.alphas = alphas;

  auto embed = [&](const SimplexPoint& b) {
    Vec x(dim, 0.0);
    for (int k = 0; k <= dim; ++k)
      for (int t = 0; t < dim; ++t) x[t] += b.coords[k] * out.frame.vertices[k][t];
    return x;
  };
  auto objective = [&](const SimplexPoint& b) {
    return levi_table_objective(levi_table(cones, measures, embed(b)), alphas, mode);
  };

  MultistartResult best = multistart_simplex_minimize(dim + 1, objective, opts);
  out.translate = embed(best.x);
  out.objective = best.value;
  out.evals = best.evals;
  out.cells.reserve(cones.size());
  for (const auto& cone : cones) out.cells.push_back(translate_cell(cone, out.translate));

  ValueTable V = levi_table(cones, measures, out.translate);
  validate(V);
  auto cost = levi_cost(V, alphas);
  EnvyCertificate cert;
  cert.table = V;
  cert.eps_used = opts.eps_mass;
  if (mode == SolveMode::Full) {
    BottleneckResult b = bottleneck_min_max(cost, std::vector<char>(V.cols, 1));
    cert.assignment = b.assignment;
    cert.envy = b.envy;
    cert.feasible = b.envy <= opts.eps_mass;
  } else {
    cert.secretive = true;
    double worst = 0.0;
    bool all_ok = true;
    for (int excl = 0; excl < V.cols; ++excl) {
      std::vector<char> allowed(V.cols, 1);
      allowed[excl] = 0;
      BottleneckResult b = bottleneck_min_max(cost, allowed);
      worst = std::max(worst, b.envy);
      if (b.envy <= opts.eps_mass)
        cert.witnesses[excl] = b.assignment;
      else
        all_ok = false;
    }
    cert.envy = worst;
    cert.feasible = all_ok;
  }
  out.cert = std::move(cert);
  return out;
}

LeviOracleResult levi_grid_oracle(const std::vector<ConvexCell>& cones,
                                  const std::vector<Measure>& measures, const Vec& alphas,
                                  int resolution) {
  int dim = 0;
  SolveMode mode = SolveMode::Full;
  check_levi_arity(cones, measures, alphas, dim, mode);
  require(dim <= 3 || resolution < 32, "oracle-budget",
          "grid oracle limited to low dimension at high resolution");
  LeviFrame frame = build_levi_frame(cones, measures, alphas);

  LeviOracleResult best;
  best.value = kInf;
  for (const auto& b : simplex_grid(dim + 1, resolution)) {
    Vec x(dim, 0.0);
    for (int k = 0; k <= dim; ++k)
      for (int t = 0; t < dim; ++t) x[t] += b.coords[k] * frame.vertices[k][t];
    double v = levi_table_objective(levi_table(cones, measures, x), alphas, mode);
    if (v < best.value || (v == best.value && lex_less(x, best.x))) {
      best.value = v;
      best.x = std::move(x);
    }
  }
  return best;
}

}  // namespace fairspace
