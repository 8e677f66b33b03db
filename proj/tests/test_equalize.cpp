#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairspace/equalize.hpp"
#include "fairspace/rng.hpp"

using namespace fairspace;

namespace {

Measure uniform_interval(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> pts;
  Vec w;
  for (int i = 0; i < count; ++i) {
    pts.push_back({rng.uniform()});
    w.push_back(1.0);
  }
  return make_measure(1, pts, w);
}

Measure square_grid(int per_side) {
  std::vector<Vec> pts;
  Vec w;
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j) {
      // cell centers, symmetric about the origin, none on the axes
      pts.push_back({-1.0 + (2.0 * i + 1.0) / per_side, -1.0 + (2.0 * j + 1.0) / per_side});
      w.push_back(1.0);
    }
  return make_measure(2, pts, w);
}

}  // namespace

TEST_CASE("mass evaluation uses single membership and the concave dual") {
  Measure mu = make_measure(1, {{0.0}, {1.0}}, {0.5, 0.5});
  std::vector<Vec> sites = {{0.0}, {1.0}};
  MassEval even = power_mass_eval(mu, sites, {0.0, 0.0});
  CHECK(even.masses[0] == doctest::Approx(0.5));
  CHECK(even.masses[1] == doctest::Approx(0.5));
  CHECK(even.dual == doctest::Approx(0.0));
  // strong weights push all mass into one cell and lower the dual:
  // atom 0 takes min(0+2, 1-2) = -1, atom 1 takes min(1+2, 0-2) = -2
  MassEval skew = power_mass_eval(mu, sites, {-2.0, 2.0});
  CHECK(skew.masses[0] == doctest::Approx(0.0));
  CHECK(skew.masses[1] == doctest::Approx(1.0));
  CHECK(skew.dual == doctest::Approx(-1.5));
  // midpoint atom ties to the lower-index cell
  Measure mid = make_measure(1, {{0.5}}, {1.0});
  MassEval tie = power_mass_eval(mid, sites, {0.0, 0.0});
  CHECK(tie.masses[0] == doctest::Approx(1.0));
}

TEST_CASE("symmetric instances equalize at zero weights") {
  Measure mu = square_grid(30);
  std::vector<Vec> sites = {{-0.5, 0.0}, {0.5, 0.0}};
  EqualizeOutcome out = try_equalize_weights(mu, sites, 1e-3);
  CHECK(out.converged);
  CHECK(out.max_dev <= out.tol_used);
  CHECK(std::abs(out.emp.lambdas[0]) <= 1e-2);
  CHECK(std::abs(vec_sum(out.emp.lambdas)) <= 1e-9);
  CHECK(out.emp.masses[0] == doctest::Approx(0.5).epsilon(0.01));

  std::vector<Vec> corners = {{-0.5, -0.5}, {0.5, -0.5}, {-0.5, 0.5}, {0.5, 0.5}};
  EqualizeOutcome four = try_equalize_weights(mu, corners, 1e-3);
  CHECK(four.converged);
  for (double m : four.emp.masses) CHECK(m == doctest::Approx(0.25).epsilon(0.02));
  for (double l : four.emp.lambdas) CHECK(std::abs(l) <= 2e-2);
}

// sites 0 and 2 need the weighted bisector 1 + (l0-l1)/4 at the measure
// median 0.5, so lambda converges near (-1, 1)
TEST_CASE("collinear sites recover the closed-form weights") {
  Measure mu = uniform_interval(10000, 8);
  std::vector<Vec> sites = {{0.0}, {2.0}};
  EmpPoint emp = equalize_weights(mu, sites, 1e-3);
  CHECK(std::abs(emp.lambdas[0] + 1.0) <= 0.08);
  CHECK(std::abs(emp.lambdas[1] - 1.0) <= 0.08);
  CHECK(emp.masses[0] == doctest::Approx(0.5).epsilon(0.01));

  Partition cells = emp_partition(emp);
  REQUIRE(cells.size() == 2);
  double closed = cell_mass(mu, cells[0]) + cell_mass(mu, cells[1]);
  CHECK(closed >= 1.0 - 1e-12);  // closed cells can only double-count

  // the dual at the solution dominates the dual at zero weights
  CHECK(power_mass_eval(mu, sites, emp.lambdas).dual >=
        power_mass_eval(mu, sites, Vec{0.0, 0.0}).dual - 1e-12);
}

TEST_CASE("warm starts and fresh starts agree on the weights") {
  Rng rng(17);
  Measure mu = uniform_interval(4000, 23);
  std::vector<Vec> sites = {{0.1}, {0.55}, {0.95}};
  EqualizeOptions cold;
  EmpPoint a = equalize_weights(mu, sites, 1e-3, cold);
  EqualizeOptions warm;
  warm.warm_lambdas = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
  EmpPoint b = equalize_weights(mu, sites, 1e-3, warm);
  double tol_used = std::max(1e-3, 2.0 / 4000.0);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a.lambdas[i] - b.lambdas[i]) <= 10 * tol_used);
}

TEST_CASE("iteration cap raises a non-convergence error carrying the best state") {
  Measure mu = uniform_interval(2000, 3);
  std::vector<Vec> sites = {{0.0}, {2.0}};  // needs many steps from lambda = 0
  EqualizeOptions opts;
  opts.max_iters = 2;
  CHECK_THROWS_AS(equalize_weights(mu, sites, 1e-6, opts), NonConvergenceError);
  try {
    equalize_weights(mu, sites, 1e-6, opts);
  } catch (const NonConvergenceError& e) {
    CHECK(!e.best().converged);
    CHECK(e.best().max_dev > 0.0);
    CHECK(e.best().emp.lambdas.size() == 2);
  }
  EqualizeOutcome soft = try_equalize_weights(mu, sites, 1e-6, opts);
  CHECK(!soft.converged);

  CHECK_THROWS_AS(equalize_weights(mu, {{0.0}, {0.0}}, 1e-3), Error);  // duplicate sites
  CHECK_THROWS_AS(equalize_weights(mu, sites, 0.0), Error);
}

TEST_CASE("tolerance floors at twice the largest sample weight") {
  Measure mu = make_measure(1, {{0.1}, {0.5}, {0.9}, {0.95}}, {0.25, 0.25, 0.25, 0.25});
  EqualizeOutcome out = try_equalize_weights(mu, {{0.2}, {0.8}}, 1e-9);
  CHECK(out.tol_used == doctest::Approx(0.5));
  CHECK(out.converged);  // 2/4 split reaches the floored tolerance
}
