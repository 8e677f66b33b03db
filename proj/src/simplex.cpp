#include "fairspace/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace fairspace {

SimplexPoint simplex_point(Vec coords, double tol) {
  require(!coords.empty(), "bad-simplex-point", "simplex point needs coordinates");
  double s = 0.0;
  for (double c : coords) {
    require(std::isfinite(c), "bad-simplex-point", "coordinates must be finite");
    require(c >= -tol, "bad-simplex-point", "coordinates must be >= 0");
    s += c;
  }
  require(std::abs(s - 1.0) <= tol * coords.size() + tol, "bad-simplex-point",
          "coordinates must sum to 1");
  for (double& c : coords) c = std::max(0.0, c);
  s = vec_sum(coords);
  for (double& c : coords) c /= s;
  SimplexPoint p;
  p.coords = std::move(coords);
  return p;
}

Vec project_to_simplex(Vec v) {
  // Euclidean projection onto {x >= 0, sum x = 1} by threshold search
  int n = static_cast<int>(v.size());
  Vec u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      tau = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - tau);
  // renormalize the fp residue so the result is an exact simplex point
  double s = vec_sum(v);
  if (s <= 0.0) {
    v.assign(n, 1.0 / n);
  } else {
    for (double& x : v) x /= s;
  }
  return v;
}

Vec simplex_to_chart(const Vec& x) {
  require(x.size() >= 1, "bad-simplex-point", "empty point");
  return Vec(x.begin(), x.end() - 1);
}

SimplexPoint chart_to_simplex(const Vec& u) {
  Vec x = u;
  x.push_back(1.0 - vec_sum(u));
  x = project_to_simplex(std::move(x));
  SimplexPoint p;
  p.coords = std::move(x);
  return p;
}

static void grid_rec(int slots_left, int budget, Vec& acc, int resolution,
                     std::vector<SimplexPoint>& out) {
  if (slots_left == 1) {
    acc.push_back(static_cast<double>(budget) / resolution);
    SimplexPoint p;
    p.coords = acc;
    out.push_back(std::move(p));
    acc.pop_back();
    return;
  }
  for (int k = 0; k <= budget; ++k) {
    acc.push_back(static_cast<double>(k) / resolution);
    grid_rec(slots_left - 1, budget - k, acc, resolution, out);
    acc.pop_back();
  }
}

std::vector<SimplexPoint> simplex_grid(int n, int resolution) {
  require(n >= 1 && resolution >= 1, "bad-arg", "grid needs n >= 1, resolution >= 1");
  // count = C(resolution + n - 1, n - 1)
  double count = 1.0;
  for (int i = 1; i <= n - 1; ++i)
    count *= static_cast<double>(resolution + i) / i;
  require(count <= 2e6, "grid-too-large", "simplex grid would exceed 2e6 points");
  std::vector<SimplexPoint> out;
  out.reserve(static_cast<std::size_t>(count) + 1);
  Vec acc;
  grid_rec(n, resolution, acc, resolution, out);
  return out;
}

SimplexPoint lds_simplex_point(int index, int n, std::uint64_t salt) {
  require(n >= 1, "bad-arg", "need n >= 1");
  if (n == 1) return simplex_point(Vec{1.0});
  static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                  31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  // salt-derived phase, fixed per solve
  double phase = static_cast<double>((salt * 0x9E3779B97F4A7C15ull) >> 11) * 0x1.0p-53;
  Vec u(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    double g = std::sqrt(primes[j % 20]) + (j / 20);  // irrational stride per axis
    double v = (index + 1) * g + phase * (j + 1);
    u[j] = v - std::floor(v);
  }
  // sorted gaps of n-1 uniforms give a uniform simplex point
  std::sort(u.begin(), u.end());
  Vec x(n);
  double prev = 0.0;
  for (int j = 0; j < n - 1; ++j) {
    x[j] = u[j] - prev;
    prev = u[j];
  }
  x[n - 1] = 1.0 - prev;
  return simplex_point(std::move(x), 1e-9);
}

}  // namespace fairspace
