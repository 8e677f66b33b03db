#include "fairspace/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairspace {

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                             const NelderMeadOptions& opt) {
  NelderMeadResult res;
  if (x0.empty()) {
    res.x = x0;
    res.f = f(x0);
    res.evals = 1;
    return res;
  }

  int n = static_cast<int>(x0.size());
  std::vector<Vec> xs(n + 1, x0);
  Vec fs(n + 1);
  int evals = 0;
  auto eval = [&](const Vec& x) {
    ++evals;
    return f(x);
  };

  for (int i = 1; i <= n; ++i) xs[i][i - 1] += opt.init_step;
  for (int i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

  std::vector<int> ord(n + 1);
  while (evals < opt.max_evals) {
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    int best = ord[0], worst = ord[n], second = ord[n - 1];

    double diam = 0.0;
    for (int i = 1; i <= n; ++i) {
      double d = 0.0;
      for (int k = 0; k < n; ++k) d = std::max(d, std::abs(xs[ord[i]][k] - xs[best][k]));
      diam = std::max(diam, d);
    }
    if (std::abs(fs[worst] - fs[best]) < opt.f_tol && diam < opt.x_tol) break;

    Vec centroid(n, 0.0);
    for (int i = 0; i <= n; ++i)
      if (i != worst)
        for (int k = 0; k < n; ++k) centroid[k] += xs[i][k];
    for (double& c : centroid) c /= n;

    auto blend = [&](double t) {  // centroid + t*(centroid - worst)
      Vec y(n);
      for (int k = 0; k < n; ++k) y[k] = centroid[k] + t * (centroid[k] - xs[worst][k]);
      return y;
    };

    Vec xr = blend(1.0);
    double fr = eval(xr);
    if (fr < fs[best]) {
      Vec xe = blend(2.0);
      double fe = eval(xe);
      if (fe < fr) {
        xs[worst] = std::move(xe);
        fs[worst] = fe;
      } else {
        xs[worst] = std::move(xr);
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      xs[worst] = std::move(xr);
      fs[worst] = fr;
      continue;
    }
    bool outside = fr < fs[worst];
    Vec xc = blend(outside ? 0.5 : -0.5);
    double fc = eval(xc);
    if (fc < (outside ? fr : fs[worst])) {
      xs[worst] = std::move(xc);
      fs[worst] = fc;
      continue;
    }
    // shrink toward best
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (int k = 0; k < n; ++k) xs[i][k] = xs[best][k] + 0.5 * (xs[i][k] - xs[best][k]);
      fs[i] = eval(xs[i]);
      if (evals >= opt.max_evals) break;
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fs[i] < fs[best]) best = i;
  res.x = xs[best];
  res.f = fs[best];
  res.evals = evals;
  return res;
}

}  // namespace fairspace
