#include "fairspace/delta_space.hpp"

#include <algorithm>
#include <cmath>

namespace fairspace {

namespace {
constexpr double kTau = 6.28318530717958647692;
}

DeltaSpace::Ptr DeltaSpace::trivial(int dim) {
  require(dim >= 1, "bad-space", "trivial space needs dim >= 1");
  auto s = std::shared_ptr<DeltaSpace>(new DeltaSpace());
  s->kind_ = Kind::Trivial;
  s->dim_ = dim;
  s->pieces_ = 1;
  return s;
}

DeltaSpace::Ptr DeltaSpace::two_line_disk(Vec center, double radius) {
  require(center.size() == 2, "bad-space", "two-line disk lives in the plane");
  require(radius > 0.0, "bad-space", "disk radius must be positive");
  auto s = std::shared_ptr<DeltaSpace>(new DeltaSpace());
  s->kind_ = Kind::TwoLineDisk;
  s->dim_ = 2;
  s->pieces_ = 4;
  s->center_ = std::move(center);
  s->radius_ = radius;
  return s;
}

DeltaSpace::Ptr DeltaSpace::power_fixed(std::vector<Vec> sites, double M) {
  require(sites.size() >= 1, "bad-space", "power family needs sites");
  require(M < 0.0, "bad-space", "weight scale M must be negative");
  int dim = static_cast<int>(sites.front().size());
  require(dim >= 1, "bad-space", "sites need dim >= 1");
  for (const auto& s : sites)
    require(static_cast<int>(s.size()) == dim, "bad-space", "sites must share one dimension");
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      require(dist2(sites[i], sites[j]) > 1e-24, "duplicate-sites",
              "power family sites must be distinct");
  auto s = std::shared_ptr<DeltaSpace>(new DeltaSpace());
  s->kind_ = Kind::PowerFixedSites;
  s->dim_ = dim;
  s->pieces_ = static_cast<int>(sites.size());
  s->sites_ = std::move(sites);
  s->weight_scale_ = M;
  return s;
}

DeltaSpace::Ptr DeltaSpace::join(Ptr left, Ptr right, Vec direction) {
  require(left && right, "bad-space", "join needs two children");
  require(left->dim() == right->dim(), "bad-space", "join children must share dim");
  require(static_cast<int>(direction.size()) == left->dim(), "bad-space",
          "join direction dimension mismatch");
  direction = normalized(direction);
  auto s = std::shared_ptr<DeltaSpace>(new DeltaSpace());
  s->kind_ = Kind::Join;
  s->dim_ = left->dim();
  s->pieces_ = left->pieces() + right->pieces();
  s->left_ = std::move(left);
  s->right_ = std::move(right);
  s->direction_ = std::move(direction);
  return s;
}

namespace {

// functional update: replace the in-order leaf #target with a two-piece join
DeltaSpace::Ptr replace_leaf(const DeltaSpace::Ptr& node, int& target, const Vec& dir) {
  if (node->kind() != DeltaSpace::Kind::Join) {
    require(node->kind() == DeltaSpace::Kind::Trivial, "bad-space",
            "nested builder only cuts one-piece leaves");
    if (target-- == 0)
      return DeltaSpace::join(DeltaSpace::trivial(node->dim()),
                              DeltaSpace::trivial(node->dim()), dir);
    return node;
  }
  auto l = replace_leaf(node->left(), target, dir);
  if (l != node->left()) return DeltaSpace::join(l, node->right(), node->direction());
  auto r = replace_leaf(node->right(), target, dir);
  if (r != node->right()) return DeltaSpace::join(node->left(), r, node->direction());
  return node;
}

}  // namespace

DeltaSpace::Ptr DeltaSpace::nested(int dim, const std::vector<Vec>& directions,
                                   const std::vector<int>& cut_indices) {
  require(directions.size() == cut_indices.size(), "bad-space",
          "nested builder needs one cut index per direction");
  Ptr tree = trivial(dim);
  for (std::size_t t = 0; t < directions.size(); ++t) {
    require(cut_indices[t] >= 0 && cut_indices[t] <= static_cast<int>(t), "bad-space",
            "cut index out of range at step " + std::to_string(t));
    int target = cut_indices[t];
    tree = replace_leaf(tree, target, directions[t]);
    require(target < 0, "bad-space", "internal: leaf replacement missed");
  }
  return tree;
}

namespace {

struct Chord {
  HalfSpace ccw_side;  // halfplane holding the ccw arc from a to b
};

// side of chord a->b holding the counterclockwise arc; frac is the ccw arc
// fraction, used only to orient degenerate (coincident-endpoint) chords
Chord make_chord(const Vec& a, const Vec& b, const Vec& center, double radius, double frac) {
  Chord c;
  Vec d = sub(b, a);
  if (norm(d) <= 1e-9 * radius) {
    Vec u = sub(a, center);
    double un = norm(u);
    if (un <= 1e-12 * radius) u = Vec{1.0, 0.0};  // fully degenerate, any tangent works
    u = normalized(u);
    // whole-circle arc keeps the disk, empty arc keeps the tangent point
    Sense s = frac >= 0.5 ? Sense::Le : Sense::Ge;
    c.ccw_side = halfspace(u, dot(u, a), s);
    return c;
  }
  Vec n{-d[1], d[0]};  // rot90; ccw arc sits on the <= side
  double off = dot(n, a);
  c.ccw_side = halfspace(std::move(n), off, Sense::Le);
  return c;
}

HalfSpace flip(const HalfSpace& h) {
  HalfSpace r = h;
  r.sense = r.sense == Sense::Ge ? Sense::Le : Sense::Ge;
  return r;
}

}  // namespace

Partition two_line_partition(const SimplexPoint& x, const Vec& center, double radius) {
  require(x.n() == 4, "bad-simplex-point", "two-line partition needs 4 coordinates");
  require(center.size() == 2, "bad-space", "disk center must be planar");
  require(radius > 0.0, "bad-space", "disk radius must be positive");

  // boundary points at cumulative angles
  Vec p[4];
  double cum = 0.0;
  for (int k = 0; k < 4; ++k) {
    // p[k] corresponds to cumulative sum x_1+..+x_k, with p[0] at angle 0
    p[k] = Vec{center[0] + radius * std::cos(kTau * cum),
               center[1] + radius * std::sin(kTau * cum)};
    cum += x.coords[k];
  }

  double fracA = x.coords[0] + x.coords[1];  // ccw arc p0 -> p2
  double fracB = x.coords[1] + x.coords[2];  // ccw arc p1 -> p3
  Chord A = make_chord(p[0], p[2], center, radius, fracA);
  Chord B = make_chord(p[1], p[3], center, radius, fracB);

  Ball disk{center, radius};
  auto cell = [&](const HalfSpace& ha, const HalfSpace& hb) {
    ConvexCell c = whole_space(2);
    c.ball = disk;
    c.constraints.push_back(ha);
    c.constraints.push_back(hb);
    return c;
  };

  // cell i holds the ccw arc p_{i-1} -> p_i
  Partition cells(4);
  cells[0] = cell(A.ccw_side, flip(B.ccw_side));
  cells[1] = cell(A.ccw_side, B.ccw_side);
  cells[2] = cell(flip(A.ccw_side), B.ccw_side);
  cells[3] = cell(flip(A.ccw_side), flip(B.ccw_side));
  return cells;
}

Partition power_fixed_sites_partition(const std::vector<Vec>& sites, const SimplexPoint& x,
                                      double M) {
  require(M < 0.0, "bad-space", "weight scale M must be negative");
  int n = static_cast<int>(sites.size());
  require(x.n() == n, "bad-simplex-point", "coordinate count must match site count");
  PowerDiagramConfig cfg;
  cfg.sites = sites;
  cfg.lambdas.resize(n);
  for (int i = 0; i < n; ++i) cfg.lambdas[i] = M - n * M * x.coords[i];
  return power_cells(cfg);
}

Partition evaluate(const DeltaSpace& space, const SimplexPoint& x) {
  require(x.n() == space.pieces(), "bad-simplex-point",
          "coordinate count must equal piece count");
  switch (space.kind()) {
    case DeltaSpace::Kind::Trivial:
      return {whole_space(space.dim())};
    case DeltaSpace::Kind::TwoLineDisk:
      return two_line_partition(x, space.center(), space.radius());
    case DeltaSpace::Kind::PowerFixedSites:
      return power_fixed_sites_partition(space.sites(), x, space.weight_scale());
    case DeltaSpace::Kind::Join:
      break;
  }

  int nl = space.left()->pieces();
  int nr = space.right()->pieces();
  double alpha = 0.0;
  for (int k = 0; k < nr; ++k) alpha += x.coords[nl + k];
  alpha = std::min(1.0, std::max(0.0, alpha));

  auto sub_point = [](const Vec& coords, int off, int cnt) {
    Vec block(coords.begin() + off, coords.begin() + off + cnt);
    double s = vec_sum(block);
    if (s <= 0.0) {
      block.assign(cnt, 1.0 / cnt);
    } else {
      for (double& c : block) c /= s;
    }
    return simplex_point(std::move(block), 1e-9);
  };

  Partition left = evaluate(*space.left(), sub_point(x.coords, 0, nl));
  Partition right = evaluate(*space.right(), sub_point(x.coords, nl, nr));

  double beta = join_offset(alpha);
  HalfSpace up{space.direction(), beta, Sense::Ge};
  HalfSpace down{space.direction(), beta, Sense::Le};

  Partition out;
  out.reserve(nl + nr);
  for (auto& c : left) out.push_back(intersect(std::move(c), up));
  for (auto& c : right) out.push_back(intersect(std::move(c), down));
  return out;
}

double calibrate_M(const std::vector<Vec>& sites, const std::vector<Measure>& measures,
                   double eps, int max_doublings) {
  int n = static_cast<int>(sites.size());
  require(n >= 2, "bad-arg", "calibration needs at least two sites");
  require(!measures.empty(), "bad-arg", "calibration needs measures");
  require(eps > 0.0 && eps < 1.0 / n, "bad-eps", "calibration needs 0 < eps < 1/n");

  // a face point x with x_i = 0 keeps y inside the floor cell i exactly when
  // every gap d_j(y) = |y-s_j|^2 - |y-s_i|^2 covers its weight lift n|M|x_j;
  // with the budget sum x_j = 1 such an x exists iff all gaps are nonnegative
  // and their sum reaches n|M|, so bounding the mass of that envelope set
  // bounds the floor-cell mass uniformly over the whole face (vertices and
  // uneven spreads included)
  auto passes = [&](double M) {
    const double lift = -n * M;
    for (const auto& mu : measures) {
      for (int i = 0; i < n; ++i) {
        double leak = 0.0;
        for (int p = 0; p < mu.count(); ++p) {
          const double* y = mu.point(p);
          double di = 0.0;
          for (int c = 0; c < mu.dim; ++c) {
            double t = y[c] - sites[i][c];
            di += t * t;
          }
          double total = 0.0;
          bool kept = true;
          for (int j = 0; j < n && kept; ++j) {
            if (j == i) continue;
            double dj = 0.0;
            for (int c = 0; c < mu.dim; ++c) {
              double t = y[c] - sites[j][c];
              dj += t * t;
            }
            double gap = dj - di;
            if (gap < 0.0)
              kept = false;
            else
              total += gap;
          }
          if (kept && total >= lift) leak += mu.weights[p];
        }
        if (leak >= eps) return false;
      }
    }
    return true;
  };

  double M = -1.0;
  if (!passes(M)) {
    int it = 0;
    double prev = M;
    for (;; ++it) {
      if (it >= max_doublings)
        fail("calibration-failure", "no passing M after doubling search");
      prev = M;
      M *= 2.0;
      if (passes(M)) break;
    }
    // shrink back into the last doubling step
    double lo = M, hi = prev;  // lo passes, hi fails
    for (int r = 0; r < 20; ++r) {
      double mid = 0.5 * (lo + hi);
      if (passes(mid))
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }
  // -1 already works; refine toward 0 for a gentler scale
  double lo = M, hi = 0.0;
  for (int r = 0; r < 20; ++r) {
    double mid = 0.5 * (lo + hi);
    if (passes(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace fairspace
