#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fairspace/rng.hpp"
#include "fairspace/simplex.hpp"

using namespace fairspace;

namespace {

void check_on_simplex(const Vec& x) {
  double s = 0.0;
  for (double v : x) {
    CHECK(v >= 0.0);
    s += v;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

}  // namespace

TEST_CASE("simplex_point clamps tiny noise and rejects real violations") {
  SimplexPoint x = simplex_point({0.5, 0.5 + 1e-14, -1e-14});
  check_on_simplex(x.coords);
  CHECK(x.coords[2] == 0.0);
  CHECK_THROWS_AS(simplex_point({0.5, 0.6}), Error);
  CHECK_THROWS_AS(simplex_point({1.2, -0.2}), Error);
  CHECK_THROWS_AS(simplex_point({}), Error);
}

TEST_CASE("euclidean projection onto the simplex") {
  // sorted-threshold algorithm: v=(1.2,-0.2) -> theta=0.2 -> (1,0)
  Vec p = project_to_simplex({1.2, -0.2});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  // interior point maps to itself
  Vec q = project_to_simplex({0.2, 0.3, 0.5});
  CHECK(q[0] == doctest::Approx(0.2));
  CHECK(q[1] == doctest::Approx(0.3));
  CHECK(q[2] == doctest::Approx(0.5));
  // uniform shift projects back to the same point
  Vec r = project_to_simplex({0.2 + 3.0, 0.3 + 3.0, 0.5 + 3.0});
  CHECK(r[0] == doctest::Approx(0.2));
  CHECK(r[2] == doctest::Approx(0.5));

  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    Vec v(4);
    for (double& c : v) c = rng.uniform(-2, 2);
    Vec x = project_to_simplex(v);
    check_on_simplex(x);
    // projection is idempotent
    Vec y = project_to_simplex(x);
    for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-9));
  }
}

TEST_CASE("chart drops the last coordinate and projects back") {
  SimplexPoint x = simplex_point({0.1, 0.6, 0.3});
  Vec u = simplex_to_chart(x.coords);
  REQUIRE(u.size() == 2);
  CHECK(u[0] == doctest::Approx(0.1));
  CHECK(u[1] == doctest::Approx(0.6));
  SimplexPoint back = chart_to_simplex(u);
  for (int i = 0; i < 3; ++i) CHECK(back.coords[i] == doctest::Approx(x.coords[i]));
  // out-of-simplex chart points still land on the simplex
  SimplexPoint far = chart_to_simplex({2.0, -1.0});
  check_on_simplex(far.coords);
}

TEST_CASE("simplex_grid enumerates all lattice points once") {
  std::vector<SimplexPoint> g = simplex_grid(3, 4);
  // C(4+2,2) = 15 compositions of 4 into 3 parts
  CHECK(g.size() == 15);
  std::set<std::vector<int>> seen;
  for (const auto& x : g) {
    check_on_simplex(x.coords);
    std::vector<int> key;
    for (double c : x.coords) key.push_back(static_cast<int>(std::lround(c * 4)));
    CHECK(seen.insert(key).second);
  }
  CHECK(simplex_grid(2, 10).size() == 11);
  CHECK_THROWS_AS(simplex_grid(6, 4000), Error);  // count guard
}

TEST_CASE("low-discrepancy sequence stays on the simplex and spreads out") {
  std::set<std::vector<long>> distinct;
  for (int i = 0; i < 64; ++i) {
    SimplexPoint x = lds_simplex_point(i, 4, 9);
    check_on_simplex(x.coords);
    std::vector<long> key;
    for (double c : x.coords) key.push_back(std::lround(c * 1e9));
    distinct.insert(key);
  }
  CHECK(distinct.size() == 64);
  // salt shifts the sequence
  CHECK(lds_simplex_point(0, 4, 9).coords != lds_simplex_point(0, 4, 10).coords);
  // deterministic
  CHECK(lds_simplex_point(17, 4, 9).coords == lds_simplex_point(17, 4, 9).coords);
}
