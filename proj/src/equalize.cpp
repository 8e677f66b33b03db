#include "fairspace/equalize.hpp"

#include <algorithm>
#include <cmath>

namespace fairspace {

MassEval power_mass_eval(const Measure& mu, const std::vector<Vec>& sites, const Vec& lambdas) {
  int n = static_cast<int>(sites.size());
  require(n >= 1 && lambdas.size() == sites.size(), "bad-arg", "sites/lambdas mismatch");
  MassEval out;
  out.masses.assign(n, 0.0);
  double transport = 0.0;
  for (int p = 0; p < mu.count(); ++p) {
    const double* y = mu.point(p);
    int best = 0;
    double best_v = kInf;
    for (int i = 0; i < n; ++i) {
      double v = -lambdas[i];
      for (int k = 0; k < mu.dim; ++k) {
        double d = y[k] - sites[i][k];
        v += d * d;
      }
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    out.masses[best] += mu.weights[p];
    transport += mu.weights[p] * best_v;
  }
  out.dual = transport + vec_sum(lambdas) / n;
  return out;
}

EqualizeOutcome try_equalize_weights(const Measure& mu, const std::vector<Vec>& sites,
                                     double tol, const EqualizeOptions& opts) {
  int n = static_cast<int>(sites.size());
  require(n >= 1, "bad-arg", "need at least one site");
  require(tol > 0.0, "bad-arg", "tolerance must be positive");
  for (const auto& s : sites)
    require(static_cast<int>(s.size()) == mu.dim, "bad-dim", "site/measure dim mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      require(dist2(sites[i], sites[j]) > 1e-18, "duplicate-sites",
              "equalization needs pairwise distinct sites");

  double max_w = 0.0;
  for (double w : mu.weights) max_w = std::max(max_w, w);
  // sampled masses are quantized by atom weights, exact 1/n may be unattainable
  double tol_eff = std::max(tol, 2.0 * max_w);

  auto recenter = [n](Vec l) {
    double m = vec_sum(l) / n;
    for (double& v : l) v -= m;
    return l;
  };

  Vec lambda(n, 0.0);
  if (!opts.warm_lambdas.empty()) {
    require(opts.warm_lambdas.size() == static_cast<std::size_t>(n), "bad-arg",
            "warm lambda length mismatch");
    lambda = recenter(opts.warm_lambdas);
  }

  double eta0 = opts.eta0;
  if (eta0 <= 0.0) {
    Vec lo, hi;
    support_box(mu, lo, hi);
    double d2 = 0.0;
    for (int k = 0; k < mu.dim; ++k) d2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    for (const auto& s : sites)
      for (const auto& t : sites) d2 = std::max(d2, dist2(s, t));
    eta0 = std::max(d2, 1e-12);
  }
  double eta = eta0;

  MassEval cur = power_mass_eval(mu, sites, lambda);
  auto deviation = [n](const Vec& m) {
    double dev = 0.0;
    for (double v : m) dev = std::max(dev, std::abs(v - 1.0 / n));
    return dev;
  };

  EqualizeOutcome best;
  best.emp.sites = sites;
  best.emp.lambdas = lambda;
  best.emp.masses = cur.masses;
  best.max_dev = deviation(cur.masses);
  best.tol_used = tol_eff;

  long iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    double dev = deviation(cur.masses);
    if (dev < best.max_dev) {
      best.max_dev = dev;
      best.emp.lambdas = lambda;
      best.emp.masses = cur.masses;
    }
    if (dev <= tol_eff) {
      best.converged = true;
      best.iterations = iter;
      best.emp.lambdas = lambda;
      best.emp.masses = cur.masses;
      best.max_dev = dev;
      return best;
    }

    Vec next(n);
    for (int i = 0; i < n; ++i) next[i] = lambda[i] + eta * (1.0 / n - cur.masses[i]);
    next = recenter(std::move(next));
    MassEval nxt = power_mass_eval(mu, sites, next);
    if (nxt.dual >= cur.dual - 1e-14 * std::max(1.0, std::abs(cur.dual))) {
      // accepted ascent step; the dual must never decrease along these
      lambda = std::move(next);
      cur = std::move(nxt);
      eta = std::min(eta * 1.05, 64.0 * eta0);
    } else {
      eta *= 0.5;
      if (eta < 1e-18 * eta0) break;  // stalled below fp resolution
    }
  }

  best.iterations = iter;
  best.converged = false;
  return best;
}

EmpPoint equalize_weights(const Measure& mu, const std::vector<Vec>& sites, double tol,
                          const EqualizeOptions& opts) {
  EqualizeOutcome out = try_equalize_weights(mu, sites, tol, opts);
  if (!out.converged)
    throw NonConvergenceError("mass deviation " + std::to_string(out.max_dev) +
                                  " above tolerance " + std::to_string(out.tol_used) +
                                  " after " + std::to_string(out.iterations) + " iterations",
                              out);
  return out.emp;
}

Partition emp_partition(const EmpPoint& emp) {
  PowerDiagramConfig cfg;
  cfg.sites = emp.sites;
  cfg.lambdas = emp.lambdas;
  return power_cells(cfg);
}

}  // namespace fairspace
