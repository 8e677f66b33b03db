#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairspace/delta_space.hpp"
#include "fairspace/rng.hpp"

using namespace fairspace;

namespace {

Measure uniform_disk(int count, std::uint64_t seed, Vec center = {0.0, 0.0},
                     double radius = 1.0) {
  Rng rng(seed);
  std::vector<Vec> pts;
  Vec w;
  while (static_cast<int>(pts.size()) < count) {
    double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    if (a * a + b * b > 1.0) continue;
    pts.push_back({center[0] + radius * a, center[1] + radius * b});
    w.push_back(1.0);
  }
  return make_measure(2, pts, w);
}

Vec masses(const Measure& mu, const Partition& cells) {
  Vec m;
  for (const auto& c : cells) m.push_back(cell_mass(mu, c));
  return m;
}

}  // namespace

TEST_CASE("join splits by the offset hyperplane") {
  auto space = DeltaSpace::join(DeltaSpace::trivial(2), DeltaSpace::trivial(2), {1.0, 0.0});
  CHECK(space->pieces() == 2);
  Partition cells = evaluate(*space, simplex_point({0.5, 0.5}));
  REQUIRE(cells.size() == 2);
  CHECK(contains(cells[0], {0.3, 9.0}));
  CHECK(!contains(cells[0], {-0.3, 9.0}));
  CHECK(contains(cells[1], {-0.3, -9.0}));
  CHECK(!contains(cells[1], {0.3, -9.0}));

  // alpha = 0 hands everything to the left partition
  Partition lim = evaluate(*space, simplex_point({1.0, 0.0}));
  CHECK(lim[0].constraints.empty());
  CHECK(contains(lim[0], {1e6, -1e6}));
  CHECK(!contains(lim[1], {0.0, 0.0}));
  CHECK(!contains(lim[1], {-1e6, 0.0}));

  CHECK_THROWS_AS(evaluate(*space, simplex_point({1.0, 0.0, 0.0})), Error);
}

TEST_CASE("nested T-shaped three-piece partition") {
  auto inner = DeltaSpace::join(DeltaSpace::trivial(2), DeltaSpace::trivial(2), {1.0, 0.0});
  auto space = DeltaSpace::join(inner, DeltaSpace::trivial(2), {0.0, 1.0});
  Partition cells = evaluate(*space, simplex_point({0.25, 0.25, 0.5}));
  REQUIRE(cells.size() == 3);
  // outer and inner offsets are both 0: piece 3 is the lower halfplane
  CHECK(contains(cells[2], {0.7, -2.0}));
  CHECK(contains(cells[2], {-0.7, -2.0}));
  CHECK(!contains(cells[2], {0.0, 2.0}));
  CHECK(contains(cells[0], {1.0, 1.0}));
  CHECK(!contains(cells[0], {-1.0, 1.0}));
  CHECK(contains(cells[1], {-1.0, 1.0}));
  CHECK(!contains(cells[1], {-1.0, -1.0}));
}

TEST_CASE("nested builder cuts the requested in-order leaf") {
  // cut piece 0, then piece 1: tree J(T, J(T,T))
  auto space = DeltaSpace::nested(1, {{1.0}, {1.0}}, {0, 1});
  CHECK(space->pieces() == 3);
  CHECK(space->left()->pieces() == 1);
  CHECK(space->right()->pieces() == 2);
  // cut piece 0 twice: tree J(J(T,T), T)
  auto space2 = DeltaSpace::nested(1, {{1.0}, {1.0}}, {0, 0});
  CHECK(space2->left()->pieces() == 2);

  CHECK_THROWS_AS(DeltaSpace::nested(1, {{1.0}, {1.0}}, {0, 2}), Error);
  CHECK_THROWS_AS(DeltaSpace::nested(1, {{1.0}}, {0, 0}), Error);
}

TEST_CASE("interval pieces sit in order and react to the coordinates") {
  auto space = DeltaSpace::nested(1, {{1.0}, {1.0}}, {0, 0});
  Measure mu = make_measure(1, {{0.1}, {0.3}, {0.5}, {0.7}, {0.9}},
                            {0.2, 0.2, 0.2, 0.2, 0.2});
  // piece 2 is the low side of the outer cut, piece 0 the high side of both
  Partition cells = evaluate(*space, simplex_point({0.2, 0.2, 0.6}));
  Vec m = masses(mu, cells);
  CHECK(m[0] + m[1] + m[2] == doctest::Approx(1.0));
  // growing the last coordinate grows the last piece
  Partition cells2 = evaluate(*space, simplex_point({0.1, 0.1, 0.8}));
  CHECK(cell_mass(mu, cells2[2]) >= cell_mass(mu, cells[2]));
}

// p1=(-1,0), p2=(0,-1), p3=(sqrt2/2,-sqrt2/2); chord p0p2 is the line x-y=1
TEST_CASE("two-line disk partition at a reference point") {
  SimplexPoint x = simplex_point({0.5, 0.25, 0.125, 0.125});
  Partition cells = two_line_partition(x, {0.0, 0.0}, 1.0);
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    REQUIRE(c.ball.has_value());
    CHECK(c.ball->radius == doctest::Approx(1.0));
  }
  const double s2 = std::sqrt(0.5);
  // arc midpoints, nudged off the boundary
  auto at = [](double ang) { return Vec{0.99 * std::cos(ang), 0.99 * std::sin(ang)}; };
  const double pi = 3.14159265358979323846;
  CHECK(contains(cells[0], at(pi / 2)));
  CHECK(contains(cells[1], at(1.25 * pi)));
  CHECK(contains(cells[2], at(1.625 * pi)));
  CHECK(contains(cells[3], at(1.875 * pi)));
  CHECK(!contains(cells[0], at(1.25 * pi)));
  CHECK(!contains(cells[3], at(pi / 2)));
  // chord A passes through p0 and p2
  CHECK(contains(cells[0], {1.0, 0.0}, 1e-9));
  CHECK(contains(cells[3], {1.0, 0.0}, 1e-9));
  CHECK(contains(cells[1], {0.0, -1.0}, 1e-9));
  CHECK(contains(cells[2], {s2, -s2}, 1e-9));

  Measure mu = uniform_disk(10000, 77);
  Vec m = masses(mu, cells);
  CHECK(m[0] + m[1] + m[2] + m[3] == doctest::Approx(1.0).epsilon(1e-9));
  for (double v : m) CHECK(v > 0.01);
}

TEST_CASE("two-line partition with coincident points degenerates cleanly") {
  Partition cells = two_line_partition(simplex_point({0.5, 0.5, 0.0, 0.0}), {0.0, 0.0}, 1.0);
  Measure mu = uniform_disk(8000, 31);
  Vec m = masses(mu, cells);
  CHECK(m[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(m[1] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(m[2] <= 1e-9);
  CHECK(m[3] <= 1e-9);
  CHECK(contains(cells[0], {0.0, 0.5}));
  CHECK(contains(cells[1], {0.0, -0.5}));

  CHECK_THROWS_AS(two_line_partition(simplex_point({1.0}), {0.0, 0.0}, 1.0), Error);
  CHECK_THROWS_AS(
      two_line_partition(simplex_point({0.25, 0.25, 0.25, 0.25}), {0.0, 0.0}, 0.0), Error);
}

TEST_CASE("quarter coordinates cut the disk into quadrants") {
  Partition cells = two_line_partition(simplex_point({0.25, 0.25, 0.25, 0.25}), {0.0, 0.0}, 1.0);
  CHECK(contains(cells[0], {0.3, 0.3}));
  CHECK(contains(cells[1], {-0.3, 0.3}));
  CHECK(contains(cells[2], {-0.3, -0.3}));
  CHECK(contains(cells[3], {0.3, -0.3}));
  CHECK(!contains(cells[0], {-0.3, -0.3}));
}

TEST_CASE("pinned-site power family: vertex and barycenter weights") {
  std::vector<Vec> sites = {{0.0}, {2.0}};
  // x = e_1, M = -1: lambdas (1,-1), bisector at 1 + (l0-l1)/4 = 1.5
  Partition vert = power_fixed_sites_partition(sites, simplex_point({1.0, 0.0}), -1.0);
  CHECK(contains(vert[0], {1.4}));
  CHECK(!contains(vert[0], {1.6}));
  CHECK(contains(vert[1], {1.6}));
  // uniform x gives lambda = 0, the classic Voronoi bisector at 1
  Partition voro = power_fixed_sites_partition(sites, simplex_point({0.5, 0.5}), -1.0);
  CHECK(contains(voro[0], {0.9}));
  CHECK(!contains(voro[0], {1.1}));
  CHECK(contains(voro[1], {1.1}));

  CHECK_THROWS_AS(power_fixed_sites_partition(sites, simplex_point({0.5, 0.5}), 0.0), Error);
  CHECK_THROWS_AS(power_fixed_sites_partition(sites, simplex_point({1.0}), -1.0), Error);
}

TEST_CASE("M calibration pushes vertex-extreme cells under eps") {
  std::vector<Vec> sites = {{-1.0, 0.0}, {1.0, 0.0}};
  MeasureSpec spec;
  spec.kind = MeasureSpec::Kind::Grid;
  spec.dim = 2;
  spec.origin = {-0.5, -0.5};
  spec.spacing = {0.05, 0.05};
  spec.shape = {20, 20};
  spec.values.assign(400, 1.0);
  std::vector<Measure> measures = {realize(spec)};
  double M = calibrate_M(sites, measures, 0.1);
  CHECK(M < 0.0);
  for (int k = 0; k < 2; ++k) {
    Vec e(2, 0.0);
    e[k] = 1.0;
    Partition cells = power_fixed_sites_partition(sites, simplex_point(e), M);
    CHECK(cell_mass(measures[0], cells[1 - k]) < 0.1);
  }
  CHECK_THROWS_AS(calibrate_M(sites, measures, 0.5), Error);  // eps >= 1/n

  // all mass far on the site-0 side still calibrates
  std::vector<Measure> far = {make_measure(2, {{-1000.0, 0.0}, {-1001.0, 0.0}}, {0.5, 0.5})};
  double Mf = calibrate_M(sites, far, 0.1);
  CHECK(Mf < 0.0);
  Partition cells = power_fixed_sites_partition(sites, simplex_point({0.0, 1.0}), Mf);
  CHECK(cell_mass(far[0], cells[0]) < 0.1);
}

TEST_CASE("face coordinates force mass-zero cells") {
  Measure mu = uniform_disk(10000, 5);
  Rng rng(99);
  auto disk_space = DeltaSpace::two_line_disk({0.0, 0.0}, 1.0);
  for (int t = 0; t < 20; ++t) {
    Vec c(4);
    for (double& v : c) v = rng.uniform();
    int zero = rng.index(4);
    c[zero] = 0.0;
    double s = vec_sum(c);
    for (double& v : c) v /= s;
    Partition cells = evaluate(*disk_space, simplex_point(c, 1e-9));
    CHECK(cell_mass(mu, cells[zero]) < 1e-9);
  }
  // join face behavior
  auto space = DeltaSpace::nested(2, {{1.0, 0.0}, {0.0, 1.0}}, {0, 1});
  for (int t = 0; t < 20; ++t) {
    Vec c(3);
    for (double& v : c) v = rng.uniform();
    int zero = rng.index(3);
    c[zero] = 0.0;
    double s = vec_sum(c);
    for (double& v : c) v /= s;
    Partition cells = evaluate(*space, simplex_point(c, 1e-9));
    CHECK(cell_mass(mu, cells[zero]) < 1e-9);
  }
}

TEST_CASE("join limits reproduce the child partition masses exactly") {
  Measure mu = uniform_disk(4000, 12);
  auto left = DeltaSpace::join(DeltaSpace::trivial(2), DeltaSpace::trivial(2), {1.0, 0.0});
  auto space = DeltaSpace::join(left, DeltaSpace::trivial(2), {0.0, 1.0});
  Vec sub = {0.3, 0.7};
  Partition child = evaluate(*left, simplex_point(sub));
  Partition lim = evaluate(*space, simplex_point({0.3, 0.7, 0.0}));
  CHECK(cell_mass(mu, lim[0]) == doctest::Approx(cell_mass(mu, child[0])).epsilon(1e-12));
  CHECK(cell_mass(mu, lim[1]) == doctest::Approx(cell_mass(mu, child[1])).epsilon(1e-12));
  CHECK(cell_mass(mu, lim[2]) < 1e-12);
  // right-supported point reproduces the right child (whole space)
  Partition rlim = evaluate(*space, simplex_point({0.0, 0.0, 1.0}));
  CHECK(cell_mass(mu, rlim[2]) == doctest::Approx(1.0));
}

TEST_CASE("masses move continuously with the simplex point") {
  Measure mu = uniform_disk(10000, 21);
  auto space = DeltaSpace::two_line_disk({0.0, 0.0}, 1.0);
  Rng rng(4);
  Vec scales = {4e-3, 2e-3, 1e-3};
  Vec eta(3, 0.0);
  for (int t = 0; t < 10; ++t) {
    Vec c(4);
    for (double& v : c) v = 0.1 + rng.uniform();
    double s = vec_sum(c);
    for (double& v : c) v /= s;
    Vec dir(4);
    for (double& v : dir) v = rng.uniform(-1, 1);
    double ds = vec_sum(dir) / 4;
    for (double& v : dir) v -= ds;  // keep the sum at 1
    Vec base = masses(mu, evaluate(*space, simplex_point(c)));
    for (int k = 0; k < 3; ++k) {
      Vec cc = c;
      for (int i = 0; i < 4; ++i) cc[i] += scales[k] * dir[i];
      Vec m = masses(mu, evaluate(*space, simplex_point(project_to_simplex(cc), 1e-9)));
      for (int i = 0; i < 4; ++i) eta[k] = std::max(eta[k], std::abs(m[i] - base[i]));
    }
  }
  // eta must shrink with the perturbation (atom granularity gives slack)
  CHECK(eta[0] <= 0.08);
  CHECK(eta[2] <= eta[0] + 5e-3);
  CHECK(eta[2] <= 0.03);
}
