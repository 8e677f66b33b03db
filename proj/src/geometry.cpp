#include "fairspace/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fairspace {

HalfSpace halfspace(Vec normal, double offset, Sense sense) {
  HalfSpace h;
  require(!normal.empty(), "bad-halfspace", "halfspace needs a nonempty normal");
  if (std::isfinite(offset)) {
    double n = norm(normal);
    require(n > 0.0, "bad-halfspace", "finite halfspace needs a nonzero normal");
    if (std::abs(n - 1.0) > 1e-12) {
      normal = scaled(normal, 1.0 / n);
      offset /= n;
    }
  }
  h.normal = std::move(normal);
  h.offset = offset;
  h.sense = sense;
  return h;
}

bool is_vacuous(const HalfSpace& h) {
  return (h.sense == Sense::Ge && h.offset == -kInf) ||
         (h.sense == Sense::Le && h.offset == kInf);
}

bool is_empty_halfspace(const HalfSpace& h) {
  return (h.sense == Sense::Ge && h.offset == kInf) ||
         (h.sense == Sense::Le && h.offset == -kInf);
}

bool contains(const HalfSpace& h, const Vec& y, double slack) {
  if (is_vacuous(h)) return true;
  if (is_empty_halfspace(h)) return false;
  double v = dot(h.normal, y);
  return h.sense == Sense::Ge ? v >= h.offset - slack : v <= h.offset + slack;
}

ConvexCell whole_space(int dim) {
  require(dim >= 1, "bad-dim", "cell dimension must be >= 1");
  ConvexCell c;
  c.dim = dim;
  return c;
}

ConvexCell empty_cell(int dim) {
  ConvexCell c = whole_space(dim);
  Vec e(dim, 0.0);
  e[0] = 1.0;
  c.constraints.push_back(HalfSpace{e, kInf, Sense::Ge});
  return c;
}

bool contains(const ConvexCell& cell, const Vec& y, double slack) {
  require(static_cast<int>(y.size()) == cell.dim, "bad-dim", "point/cell dimension mismatch");
  for (const auto& h : cell.constraints)
    if (!contains(h, y, slack)) return false;
  if (cell.ball) {
    double r = cell.ball->radius + slack;
    if (dist2(cell.ball->center, y) > r * r) return false;
  }
  return true;
}

ConvexCell intersect(ConvexCell cell, const HalfSpace& h) {
  require(static_cast<int>(h.normal.size()) == cell.dim, "bad-dim",
          "halfspace/cell dimension mismatch");
  if (!is_vacuous(h)) cell.constraints.push_back(h);
  return cell;
}

ConvexCell intersect_cells(const ConvexCell& a, const ConvexCell& b) {
  require(a.dim == b.dim, "bad-dim", "cell dimension mismatch in intersection");
  require(!(a.ball && b.ball), "bad-cell", "cannot intersect two ball-bounded cells");
  ConvexCell r = a;
  r.constraints.insert(r.constraints.end(), b.constraints.begin(), b.constraints.end());
  if (b.ball) r.ball = b.ball;
  return r;
}

ConvexCell translate_cell(const ConvexCell& cell, const Vec& x) {
  require(static_cast<int>(x.size()) == cell.dim, "bad-dim", "translate dimension mismatch");
  ConvexCell r = cell;
  for (auto& h : r.constraints)
    if (std::isfinite(h.offset)) h.offset += dot(h.normal, x);
  if (r.ball) r.ball->center = add(r.ball->center, x);
  return r;
}

namespace {

// shared shape/finiteness/distinctness checks; power_cell itself does not
// require the sum-zero weight normalization (adding a common constant to all
// weights leaves every cell unchanged)
void check_diagram_shape(const PowerDiagramConfig& cfg) {
  require(!cfg.sites.empty(), "bad-diagram", "power diagram needs at least one site");
  require(cfg.sites.size() == cfg.lambdas.size(), "bad-diagram",
          "sites/lambdas length mismatch");
  std::size_t d = cfg.sites.front().size();
  require(d >= 1, "bad-diagram", "sites must have dimension >= 1");
  for (const auto& s : cfg.sites)
    require(s.size() == d, "bad-diagram", "sites must share one dimension");
  for (double l : cfg.lambdas)
    require(std::isfinite(l), "bad-diagram", "lambdas must be finite");
  for (std::size_t i = 0; i < cfg.sites.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.sites.size(); ++j)
      require(dist2(cfg.sites[i], cfg.sites[j]) > 1e-18, "duplicate-sites",
              "power diagram sites must be pairwise distinct");
}

}  // namespace

void validate(const PowerDiagramConfig& cfg) {
  check_diagram_shape(cfg);
  require(std::abs(vec_sum(cfg.lambdas)) <= 1e-9, "bad-diagram", "weights must sum to 0");
}

ConvexCell power_cell(const PowerDiagramConfig& cfg, int j) {
  check_diagram_shape(cfg);
  int n = static_cast<int>(cfg.sites.size());
  require(j >= 0 && j < n, "bad-index", "power cell index out of range");
  int dim = static_cast<int>(cfg.sites.front().size());
  ConvexCell cell = whole_space(dim);
  const Vec& xj = cfg.sites[j];
  for (int i = 0; i < n; ++i) {
    if (i == j) continue;
    // |y-x_j|^2 - l_j <= |y-x_i|^2 - l_i  <=>  <y, 2(x_i-x_j)> <= |x_i|^2 - |x_j|^2 - l_i + l_j
    Vec d = scaled(sub(cfg.sites[i], xj), 2.0);
    double rhs = norm2(cfg.sites[i]) - norm2(xj) - cfg.lambdas[i] + cfg.lambdas[j];
    cell.constraints.push_back(halfspace(std::move(d), rhs, Sense::Le));
  }
  return cell;
}

Partition power_cells(const PowerDiagramConfig& cfg) {
  check_diagram_shape(cfg);
  Partition cells;
  cells.reserve(cfg.sites.size());
  for (int j = 0; j < static_cast<int>(cfg.sites.size()); ++j)
    cells.push_back(power_cell(cfg, j));
  return cells;
}

int power_argmin(const std::vector<Vec>& sites, const Vec& lambdas, const double* y, int dim) {
  int best = 0;
  double best_v = kInf;
  for (int i = 0; i < static_cast<int>(sites.size()); ++i) {
    double v = -lambdas[i];
    const Vec& s = sites[i];
    for (int k = 0; k < dim; ++k) {
      double d = y[k] - s[k];
      v += d * d;
    }
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

double join_offset(double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "bad-alpha", "join offset needs alpha in [0,1]");
  double t = 2.0 * alpha - 1.0;
  double denom = 1.0 - std::abs(t);
  if (denom == 0.0) return t > 0.0 ? kInf : -kInf;
  return t / denom;
}

}  // namespace fairspace
