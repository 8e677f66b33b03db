#include "fairspace/measure.hpp"

#include <algorithm>
#include <cmath>

namespace fairspace {

void validate(const Measure& mu) {
  require(mu.dim >= 1, "bad-measure", "measure dimension must be >= 1");
  require(!mu.weights.empty(), "bad-measure", "measure needs at least one atom");
  require(mu.points.size() == mu.weights.size() * static_cast<std::size_t>(mu.dim),
          "bad-measure", "points/weights size mismatch");
  long double s = 0.0L;
  for (double w : mu.weights) {
    require(w >= 0.0 && std::isfinite(w), "bad-measure", "weights must be finite and >= 0");
    s += w;
  }
  require(std::abs(static_cast<double>(s - 1.0L)) <= 1e-12, "bad-measure",
          "weights must sum to 1");
  for (double c : mu.points)
    require(std::isfinite(c), "bad-measure", "points must be finite");
  require(mu.origin_mass > 0.0 && mu.origin_mass <= 1.0 + 1e-9, "bad-measure",
          "origin mass must lie in (0,1]");
}

Measure make_measure(int dim, const std::vector<Vec>& pts, const Vec& weights) {
  require(pts.size() == weights.size(), "bad-measure", "points/weights length mismatch");
  Measure mu;
  mu.dim = dim;
  mu.points.reserve(pts.size() * dim);
  for (const auto& p : pts) {
    require(static_cast<int>(p.size()) == dim, "bad-measure", "point dimension mismatch");
    mu.points.insert(mu.points.end(), p.begin(), p.end());
  }
  long double s = 0.0L;
  for (double w : weights) s += w;
  require(s > 0.0L, "bad-measure", "total weight must be positive");
  mu.weights = weights;
  for (double& w : mu.weights) w = static_cast<double>(w / s);
  // sweep the fp residue into the heaviest atom so the sum is exact enough
  long double post = 0.0L;
  for (double w : mu.weights) post += w;
  std::size_t top = 0;
  for (std::size_t i = 1; i < mu.weights.size(); ++i)
    if (mu.weights[i] > mu.weights[top]) top = i;
  mu.weights[top] += static_cast<double>(1.0L - post);
  validate(mu);
  return mu;
}

void validate(const MeasureSpec& spec) {
  require(spec.dim >= 1, "bad-spec", "measure spec dimension must be >= 1");
  switch (spec.kind) {
    case MeasureSpec::Kind::Points: {
      require(!spec.points.empty(), "bad-spec", "points spec needs atoms");
      require(spec.points.size() == spec.weights.size(), "bad-spec",
              "points/weights length mismatch");
      break;
    }
    case MeasureSpec::Kind::Grid: {
      require(static_cast<int>(spec.origin.size()) == spec.dim, "bad-spec",
              "grid origin dimension mismatch");
      require(static_cast<int>(spec.spacing.size()) == spec.dim, "bad-spec",
              "grid spacing dimension mismatch");
      require(static_cast<int>(spec.shape.size()) == spec.dim, "bad-spec",
              "grid shape dimension mismatch");
      std::size_t cells = 1;
      for (int s : spec.shape) {
        require(s >= 1, "bad-spec", "grid shape entries must be >= 1");
        cells *= static_cast<std::size_t>(s);
      }
      require(spec.values.size() == cells, "bad-spec", "grid values/shape size mismatch");
      for (double v : spec.values)
        require(v >= 0.0 && std::isfinite(v), "bad-spec", "grid values must be >= 0");
      for (double s : spec.spacing)
        require(s > 0.0, "bad-spec", "grid spacing must be positive");
      break;
    }
    case MeasureSpec::Kind::GaussianMixture: {
      require(!spec.components.empty(), "bad-spec", "mixture needs components");
      require(spec.sample_count >= 1, "bad-spec", "mixture needs sample_count >= 1");
      double wsum = 0.0;
      for (const auto& c : spec.components) {
        require(static_cast<int>(c.mean.size()) == spec.dim, "bad-spec",
                "component mean dimension mismatch");
        require(static_cast<int>(c.cov_diag.size()) == spec.dim, "bad-spec",
                "component cov dimension mismatch");
        for (double v : c.cov_diag)
          require(v > 0.0, "bad-spec", "component variances must be positive");
        require(c.weight >= 0.0, "bad-spec", "component weights must be >= 0");
        wsum += c.weight;
      }
      require(std::abs(wsum - 1.0) <= 1e-6, "bad-spec", "mixture weights must sum to 1");
      break;
    }
  }
}

Measure realize(const MeasureSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case MeasureSpec::Kind::Points:
      return make_measure(spec.dim, spec.points, spec.weights);

    case MeasureSpec::Kind::Grid: {
      std::vector<Vec> pts;
      Vec w;
      std::vector<int> idx(spec.dim, 0);
      for (std::size_t flat = 0; flat < spec.values.size(); ++flat) {
        if (spec.values[flat] > 0.0) {
          Vec p(spec.dim);
          for (int k = 0; k < spec.dim; ++k)
            p[k] = spec.origin[k] + (idx[k] + 0.5) * spec.spacing[k];
          pts.push_back(std::move(p));
          w.push_back(spec.values[flat]);
        }
        // row-major increment, last axis fastest
        for (int k = spec.dim - 1; k >= 0; --k) {
          if (++idx[k] < spec.shape[k]) break;
          idx[k] = 0;
        }
      }
      require(!pts.empty(), "degenerate-spec", "grid has zero total mass");
      return make_measure(spec.dim, pts, w);
    }

    case MeasureSpec::Kind::GaussianMixture: {
      double total = 0.0;
      for (const auto& c : spec.components) total += c.weight;
      require(total > 0.0, "degenerate-spec", "mixture has zero total weight");
      Rng rng(spec.seed);
      std::vector<Vec> pts;
      pts.reserve(spec.sample_count);
      for (int s = 0; s < spec.sample_count; ++s) {
        double u = rng.uniform() * total;
        std::size_t ci = 0;
        double acc = 0.0;
        for (; ci + 1 < spec.components.size(); ++ci) {
          acc += spec.components[ci].weight;
          if (u < acc) break;
        }
        const auto& c = spec.components[ci];
        Vec p(spec.dim);
        for (int k = 0; k < spec.dim; ++k)
          p[k] = c.mean[k] + std::sqrt(c.cov_diag[k]) * rng.normal();
        pts.push_back(std::move(p));
      }
      return make_measure(spec.dim, pts, Vec(spec.sample_count, 1.0));
    }
  }
  fail("bad-spec", "unknown measure spec kind");
}

double cell_mass(const Measure& mu, const ConvexCell& cell) {
  require(mu.dim == cell.dim, "bad-dim", "measure/cell dimension mismatch");
  double s = 0.0;
  Vec p(mu.dim);
  for (int i = 0; i < mu.count(); ++i) {
    const double* q = mu.point(i);
    p.assign(q, q + mu.dim);
    if (contains(cell, p)) s += mu.weights[i];
  }
  return s;
}

Measure restrict(const Measure& mu, const ConvexCell& cell) {
  require(mu.dim == cell.dim, "bad-dim", "measure/cell dimension mismatch");
  Measure out;
  out.dim = mu.dim;
  Vec p(mu.dim);
  double mass = 0.0;
  for (int i = 0; i < mu.count(); ++i) {
    const double* q = mu.point(i);
    p.assign(q, q + mu.dim);
    if (contains(cell, p)) {
      out.points.insert(out.points.end(), q, q + mu.dim);
      out.weights.push_back(mu.weights[i]);
      mass += mu.weights[i];
    }
  }
  if (mass <= 0.0)
    fail("degenerate-restriction", "restriction target carries zero mass");
  for (double& w : out.weights) w /= mass;
  long double post = 0.0L;
  for (double w : out.weights) post += w;
  std::size_t top = 0;
  for (std::size_t i = 1; i < out.weights.size(); ++i)
    if (out.weights[i] > out.weights[top]) top = i;
  out.weights[top] += static_cast<double>(1.0L - post);
  out.origin_mass = mu.origin_mass * mass;
  return out;
}

void support_box(const Measure& mu, Vec& lo, Vec& hi) {
  lo.assign(mu.dim, kInf);
  hi.assign(mu.dim, -kInf);
  for (int i = 0; i < mu.count(); ++i) {
    const double* p = mu.point(i);
    for (int k = 0; k < mu.dim; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
}

std::vector<Vec> kmeans_pp_sites(const Measure& mu, int k, Rng& rng) {
  require(k >= 1, "bad-arg", "need at least one site");
  Vec lo, hi;
  support_box(mu, lo, hi);
  double diam = 0.0;
  for (int i = 0; i < mu.dim; ++i) diam += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  diam = std::sqrt(diam);
  double jitter = std::max(1e-6, 1e-3 * diam);

  auto weighted_pick = [&](const Vec& w) {
    double total = vec_sum(w);
    if (total <= 0.0) return rng.index(mu.count());
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < mu.count(); ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return mu.count() - 1;
  };

  std::vector<Vec> sites;
  sites.push_back(mu.point_vec(weighted_pick(mu.weights)));
  Vec d2(mu.count(), 0.0);
  while (static_cast<int>(sites.size()) < k) {
    for (int i = 0; i < mu.count(); ++i) {
      double best = kInf;
      Vec p = mu.point_vec(i);
      for (const auto& s : sites) best = std::min(best, dist2(p, s));
      d2[i] = best * mu.weights[i];
    }
    Vec cand = mu.point_vec(weighted_pick(d2));
    // duplicate guard: power diagrams degenerate when two sites coincide
    bool dup = false;
    for (const auto& s : sites)
      if (dist2(cand, s) < 1e-18) dup = true;
    if (dup)
      for (auto& c : cand) c += jitter * rng.normal();
    sites.push_back(std::move(cand));
  }
  return sites;
}

}  // namespace fairspace
