#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairspace/geometry.hpp"
#include "fairspace/rng.hpp"

using namespace fairspace;

TEST_CASE("halfspace normalizes finite constraints") {
  HalfSpace h = halfspace({2.0, 0.0}, 4.0, Sense::Le);
  CHECK(h.normal[0] == doctest::Approx(1.0));
  CHECK(h.normal[1] == doctest::Approx(0.0));
  CHECK(h.offset == doctest::Approx(2.0));
  CHECK(contains(h, {1.9, 5.0}));
  CHECK(!contains(h, {2.1, -5.0}));
  CHECK(contains(h, {2.0 + 1e-13, 0.0}));
  CHECK_THROWS_AS(halfspace({0.0, 0.0}, 1.0, Sense::Ge), Error);
}

TEST_CASE("infinite offsets encode vacuous and empty halfspaces") {
  HalfSpace all = halfspace({1.0}, -kInf, Sense::Ge);
  HalfSpace none = halfspace({1.0}, kInf, Sense::Ge);
  CHECK(is_vacuous(all));
  CHECK(is_empty_halfspace(none));
  CHECK(contains(all, {1e300}));
  CHECK(!contains(none, {1e300}));
  CHECK(is_vacuous(halfspace({1.0}, kInf, Sense::Le)));
  CHECK(is_empty_halfspace(halfspace({1.0}, -kInf, Sense::Le)));
}

TEST_CASE("cells intersect, translate, and drop vacuous constraints") {
  ConvexCell c = whole_space(2);
  CHECK(contains(c, {1e6, -1e6}));
  c = intersect(c, halfspace({1.0, 0.0}, 0.0, Sense::Ge));
  c = intersect(c, halfspace({0.0, 1.0}, -kInf, Sense::Ge));  // vacuous, dropped
  CHECK(c.constraints.size() == 1);
  CHECK(contains(c, {0.5, -3.0}));
  CHECK(!contains(c, {-0.5, 3.0}));

  // cell + x = {y : y - x in cell}
  ConvexCell t = translate_cell(c, {1.0, 0.0});
  CHECK(contains(t, {1.5, 0.0}));
  CHECK(!contains(t, {0.5, 0.0}));

  CHECK(!contains(empty_cell(2), Vec{0.0, 0.0}));
  CHECK_THROWS_AS(contains(c, Vec{0.0}), Error);
}

TEST_CASE("intersect_cells concatenates constraints and carries the ball") {
  ConvexCell a = intersect(whole_space(2), halfspace({1.0, 0.0}, 0.0, Sense::Ge));
  ConvexCell b = intersect(whole_space(2), halfspace({0.0, 1.0}, 0.0, Sense::Ge));
  b.ball = Ball{{0.0, 0.0}, 1.0};
  ConvexCell ab = intersect_cells(a, b);
  CHECK(ab.constraints.size() == 2);
  REQUIRE(ab.ball.has_value());
  CHECK(contains(ab, {0.3, 0.3}));
  CHECK(!contains(ab, {0.3, -0.3}));
  CHECK(!contains(ab, {0.9, 0.9}));  // outside the ball
  CHECK_THROWS_AS(intersect_cells(ab, b), Error);  // two balls
  CHECK_THROWS_AS(intersect_cells(a, whole_space(3)), Error);

  ConvexCell moved = translate_cell(ab, {2.0, 0.0});
  CHECK(moved.ball->center[0] == doctest::Approx(2.0));
  CHECK(contains(moved, {2.3, 0.3}));
}

// sites (0,0),(2,0) with lambdas (2,-2): the weighted bisector solves
// y1^2 - 2 = (y1-2)^2 + 2, i.e. y1 = 2
TEST_CASE("power cell bisector with weights") {
  PowerDiagramConfig cfg{{{0.0, 0.0}, {2.0, 0.0}}, {2.0, -2.0}};
  validate(cfg);
  ConvexCell c0 = power_cell(cfg, 0);
  ConvexCell c1 = power_cell(cfg, 1);
  CHECK(contains(c0, {1.9, 7.0}));
  CHECK(!contains(c0, {2.1, 7.0}));
  CHECK(contains(c1, {2.1, -7.0}));
  CHECK(!contains(c1, {1.9, -7.0}));
  CHECK(contains(c0, {2.0, 0.0}));  // closed cells share the bisector
  CHECK(contains(c1, {2.0, 0.0}));

  Partition cells = power_cells(cfg);
  CHECK(cells.size() == 2);
  CHECK(cells[0].constraints.size() == 1);
}

TEST_CASE("power diagram validation") {
  CHECK_THROWS_AS(validate(PowerDiagramConfig{{{0.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}}), Error);
  CHECK_THROWS_AS(validate(PowerDiagramConfig{{{0.0, 0.0}, {1.0, 0.0}}, {1.0, 0.0}}), Error);
  CHECK_THROWS_AS(validate(PowerDiagramConfig{{{0.0, 0.0}}, {0.0, 0.0}}), Error);
  CHECK_THROWS_AS(power_cell(PowerDiagramConfig{{{0.0, 0.0}, {1.0, 0.0}}, {0.0, 0.0}}, 2), Error);
}

TEST_CASE("power argmin shifts with lambda only up to a common constant") {
  Rng rng(31);
  std::vector<Vec> sites;
  for (int i = 0; i < 4; ++i) sites.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
  Vec lam = {0.3, -0.1, -0.4, 0.2};
  Vec shifted = lam;
  for (double& v : shifted) v += 5.0;
  for (int t = 0; t < 200; ++t) {
    Vec y = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    int a = power_argmin(sites, lam, y.data(), 2);
    int b = power_argmin(sites, shifted, y.data(), 2);
    CHECK(a == b);
    // argmin lands in the closed power cell
    PowerDiagramConfig cfg{sites, lam};
    CHECK(contains(power_cell(cfg, a), y, 1e-9));
  }
}

TEST_CASE("power argmin ties break to the lower index") {
  std::vector<Vec> sites = {{-1.0, 0.0}, {1.0, 0.0}};
  Vec lam = {0.0, 0.0};
  Vec mid = {0.0, 3.0};
  CHECK(power_argmin(sites, lam, mid.data(), 2) == 0);
}

TEST_CASE("join offset endpoints and antisymmetry") {
  CHECK(join_offset(0.5) == doctest::Approx(0.0));
  CHECK(join_offset(0.75) == doctest::Approx(1.0));
  CHECK(join_offset(0.25) == doctest::Approx(-1.0));
  CHECK(join_offset(1.0) == kInf);
  CHECK(join_offset(0.0) == -kInf);
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    double a = rng.uniform();
    CHECK(join_offset(a) == doctest::Approx(-join_offset(1.0 - a)).epsilon(1e-12));
  }
  // monotone in alpha
  double prev = -kInf;
  for (int k = 1; k < 40; ++k) {
    double v = join_offset(k / 40.0);
    CHECK(v > prev);
    prev = v;
  }
}
