#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairspace/certify.hpp"
#include "fairspace/rng.hpp"
#include "fairspace/svg_render.hpp"

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

Measure uniform_square(int per_side) {
  std::vector<Vec> pts;
  Vec w;
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j) {
      pts.push_back({-1.0 + (2.0 * i + 1.0) / per_side, -1.0 + (2.0 * j + 1.0) / per_side});
      w.push_back(1.0);
    }
  return make_measure(2, pts, w);
}

}  // namespace

TEST_CASE("json parse errors carry line and column") {
  try {
    parse_json_text("{\n  \"a\": 1,\n}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == "json-parse");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  Json ok = parse_json_text("{\"a\": [1, 2]}");
  CHECK(ok["a"][1] == 2);
}

TEST_CASE("measure specs round-trip through json") {
  MeasureSpec pts;
  pts.kind = MeasureSpec::Kind::Points;
  pts.dim = 2;
  pts.points = {{0.0, 0.0}, {1.0, 0.5}};
  pts.weights = {0.25, 0.75};
  Json j = measure_spec_to_json(pts);
  CHECK(j["kind"] == "points");
  Measure a = realize(measure_spec_from_json(j));
  CHECK(a.count() == 2);
  CHECK(a.weights[1] == doctest::Approx(0.75));

  MeasureSpec grid;
  grid.kind = MeasureSpec::Kind::Grid;
  grid.dim = 2;
  grid.origin = {0.0, 0.0};
  grid.spacing = {0.5, 0.5};
  grid.shape = {2, 3};
  grid.values = {1, 2, 3, 4, 5, 6};
  Measure g1 = realize(grid);
  Measure g2 = realize(measure_spec_from_json(measure_spec_to_json(grid)));
  CHECK(g1.points == g2.points);
  CHECK(g1.weights == g2.weights);

  MeasureSpec mix;
  mix.kind = MeasureSpec::Kind::GaussianMixture;
  mix.dim = 2;
  mix.components = {{{0.1, 0.2}, {0.01, 0.02}, 1.0}};
  mix.sample_count = 64;
  mix.seed = 7;
  Measure m1 = realize(mix);
  Measure m2 = measure_from_json(measure_spec_to_json(mix));
  CHECK(m1.points == m2.points);

  Json bad = measure_spec_to_json(pts);
  bad["kind"] = "mystery";
  CHECK_THROWS_AS(measure_spec_from_json(bad), Error);
}

TEST_CASE("halfspaces and cells round-trip, including infinite offsets") {
  HalfSpace h = halfspace({0.0, 2.0}, 3.0, Sense::Le);
  HalfSpace h2 = halfspace_from_json(halfspace_to_json(h));
  CHECK(h2.normal[1] == doctest::Approx(1.0));
  CHECK(h2.offset == doctest::Approx(1.5));
  CHECK(h2.sense == Sense::Le);

  HalfSpace vac = halfspace({1.0, 0.0}, -kInf, Sense::Ge);
  Json jv = halfspace_to_json(vac);
  CHECK(jv["offset"] == "-inf");
  CHECK(is_vacuous(halfspace_from_json(jv)));

  ConvexCell cell = intersect(whole_space(2), halfspace({1.0, 0.0}, 0.25, Sense::Ge));
  cell.ball = Ball{{0.5, -0.5}, 2.0};
  ConvexCell back = cell_from_json(cell_to_json(cell));
  CHECK(back.dim == 2);
  REQUIRE(back.ball.has_value());
  CHECK(back.ball->radius == doctest::Approx(2.0));
  CHECK(contains(back, {0.5, -0.5}));
  CHECK(!contains(back, {0.1, -0.5}));
}

TEST_CASE("partition files round-trip and validate their shape") {
  PartitionFile pf;
  pf.dim = 2;
  pf.cells = {intersect(whole_space(2), halfspace({1.0, 0.0}, 0.0, Sense::Ge)),
              intersect(whole_space(2), halfspace({1.0, 0.0}, 0.0, Sense::Le))};
  pf.provenance = Json{{"tool", "test"}};
  Json j = partition_to_json(pf);
  PartitionFile back = partition_from_json(j);
  CHECK(back.dim == 2);
  REQUIRE(back.cells.size() == 2);
  CHECK(back.provenance["tool"] == "test");
  CHECK(contains(back.cells[0], {0.5, 0.0}));
  CHECK(!contains(back.cells[0], {-0.5, 0.0}));
  // round-trip is byte-stable
  CHECK(partition_to_json(back).dump(2) == j.dump(2));

  Json empty = j;
  empty["cells"] = Json::array();
  CHECK_THROWS_AS(partition_from_json(empty), Error);
  Json mismatched = j;
  mismatched["cells"][0]["constraints"][0]["normal"] = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(partition_from_json(mismatched), Error);
}

TEST_CASE("delta spaces round-trip through json") {
  auto disk = DeltaSpace::two_line_disk({0.25, -0.25}, 2.0);
  auto space = DeltaSpace::join(disk, DeltaSpace::trivial(2), {0.0, 1.0});
  Json j = delta_space_to_json(*space);
  DeltaSpacePtr back = delta_space_from_json(j);
  CHECK(back->pieces() == 5);
  CHECK(delta_space_to_json(*back).dump() == j.dump());

  auto power = DeltaSpace::power_fixed({{0.0, 0.0}, {1.0, 1.0}}, -2.5);
  DeltaSpacePtr pback = delta_space_from_json(delta_space_to_json(*power));
  CHECK(pback->kind() == DeltaSpace::Kind::PowerFixedSites);
  CHECK(pback->weight_scale() == doctest::Approx(-2.5));

  Json trivial_no_dim = Json{{"kind", "trivial"}};
  CHECK_THROWS_AS(delta_space_from_json(trivial_no_dim), Error);
}

TEST_CASE("envy certificates verify and catch tampering") {
  auto space = DeltaSpace::nested(1, {{1.0}}, {0});
  std::vector<Measure> mus = {uniform_interval(900, 1), uniform_interval(900, 2)};
  SolveOptions opts;
  opts.eps_mass = 2e-2;
  opts.restarts = 3;
  opts.max_evals = 250;
  opts.seed = 4;
  SolveResult res = solve_envy_free(*space, mus, opts);
  REQUIRE(res.cert.feasible);

  PartitionFile pf;
  pf.dim = 1;
  pf.cells = res.partition;
  pf.provenance = Json::object();
  Json cert = envy_certificate_to_json(res.cert);
  CHECK(cert["kind"] == "envy");

  VerifyInputs in;
  in.measures = mus;
  VerifyReport rep = verify_certificate(pf, cert, in);
  CHECK(rep.ok);
  CHECK(rep.violations.empty());

  Json bad = cert;
  bad["value_table"][0][0] = bad["value_table"][0][0].get<double>() + 0.2;
  VerifyReport viol = verify_certificate(pf, bad, in);
  CHECK(!viol.ok);
  CHECK(!viol.violations.empty());

  Json lied = cert;
  lied["envy"] = 0.0;
  lied["value_table"][0][0] = 0.9;  // makes the recomputed table disagree
  CHECK(!verify_certificate(pf, lied, in).ok);

  VerifyInputs short_in;
  short_in.measures = {mus[0]};
  CHECK_THROWS_AS(verify_certificate(pf, cert, short_in), Error);
}

TEST_CASE("levi certificates verify against the translated cones") {
  auto sector = [](double a, double b) {
    ConvexCell c = whole_space(2);
    c.constraints.push_back(halfspace({-std::sin(a), std::cos(a)}, 0.0, Sense::Ge));
    c.constraints.push_back(halfspace({std::sin(b), -std::cos(b)}, 0.0, Sense::Ge));
    return c;
  };
  const double pi = 3.14159265358979323846;
  std::vector<ConvexCell> cones = {sector(pi / 2, pi / 2 + 2 * pi / 3),
                                   sector(pi / 2 + 2 * pi / 3, pi / 2 + 4 * pi / 3),
                                   sector(pi / 2 + 4 * pi / 3, pi / 2 + 2 * pi)};
  Measure disk = uniform_square(18);
  std::vector<Measure> mus = {disk, disk, disk};
  SolveOptions opts;
  opts.eps_mass = 2e-2;
  opts.restarts = 3;
  opts.max_evals = 300;
  opts.seed = 6;
  LeviResult res = solve_levi(cones, mus, {1.0 / 3, 1.0 / 3, 1.0 / 3}, opts);
  REQUIRE(res.cert.feasible);

  PartitionFile pf;
  pf.dim = 2;
  pf.cells = res.cells;
  pf.provenance = Json::object();
  Json cert = levi_certificate_to_json(res.cert, res.alphas);
  CHECK(cert["kind"] == "levi");
  VerifyInputs in;
  in.measures = mus;
  CHECK(verify_certificate(pf, cert, in).ok);

  Json bad = cert;
  bad["alphas"][0] = 0.9;
  CHECK(!verify_certificate(pf, bad, in).ok);
}

TEST_CASE("simultaneous certificates verify and catch residual lies") {
  Measure base = uniform_square(16);
  GroupInstance inst;
  inst.base = base;
  inst.n = 2;
  inst.groups = {{base, base}};
  SimultaneousOptions opts;
  opts.eps_schedule = {0.05, 0.025};
  opts.restarts = 3;
  opts.max_evals = 100;
  opts.seed = 8;
  SimultaneousResult res = solve_simultaneous(inst, opts);
  REQUIRE(res.feasible);

  PartitionFile pf;
  pf.dim = 2;
  pf.cells = res.cells;
  pf.provenance = Json::object();
  Json cert = simultaneous_certificate_to_json(res, false, opts.mass_tol);
  CHECK(cert["kind"] == "simultaneous");
  VerifyInputs in;
  in.has_base = true;
  in.base = base;
  in.groups = inst.groups;
  VerifyReport rep = verify_certificate(pf, cert, in);
  CHECK(rep.ok);

  Json bad = cert;
  bad["residual"] = bad["residual"].get<double>() + 0.5;
  CHECK(!verify_certificate(pf, bad, in).ok);
  Json perm = cert;
  perm["assignments"][0][0] = perm["assignments"][0][1];
  CHECK(!verify_certificate(pf, perm, in).ok);
}

TEST_CASE("proportional certificates verify bounds and bijections") {
  Measure base = uniform_square(16);
  ProportionalOptions opts;
  opts.restarts = 3;
  opts.max_evals = 100;
  opts.seed = 10;
  ProportionalResult res = solve_proportional(base, {{base, base}}, 2, opts);
  REQUIRE(res.feasible);

  PartitionFile pf;
  pf.dim = 2;
  pf.cells = res.cells;
  pf.provenance = Json::object();
  Json cert = proportional_certificate_to_json(res);
  CHECK(cert["kind"] == "proportional");
  VerifyInputs in;
  in.has_base = true;
  in.base = base;
  in.groups = {{base, base}};
  CHECK(verify_certificate(pf, cert, in).ok);

  Json greedy = cert;
  greedy["bounds"][0][0] = 0.9;
  CHECK(!verify_certificate(pf, greedy, in).ok);
  Json broken = cert;
  broken["maps"][0][0] = broken["maps"][0][1];
  CHECK(!verify_certificate(pf, broken, in).ok);
}

TEST_CASE("value tables round-trip") {
  ValueTable V = make_table(2, 3);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) V.at(j, i) = 0.1 * (j + 1) + 0.01 * i;
  ValueTable back = table_from_json(table_to_json(V));
  CHECK(back.rows == 2);
  CHECK(back.cols == 3);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) CHECK(back.at(j, i) == doctest::Approx(V.at(j, i)));
}

TEST_CASE("svg rendering is deterministic and structured") {
  PartitionFile pf;
  pf.dim = 2;
  pf.cells = {intersect(whole_space(2), halfspace({1.0, 0.0}, 0.0, Sense::Ge)),
              intersect(whole_space(2), halfspace({1.0, 0.0}, 0.0, Sense::Le))};
  pf.provenance = Json::object();
  Measure mu = uniform_square(12);
  std::string svg = render_svg(pf, {mu}, {1});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<path") != std::string::npos);
  CHECK(svg.find("C0") != std::string::npos);
  CHECK(svg.find("C1") != std::string::npos);
  CHECK(svg.find("measure 0") != std::string::npos);
  CHECK(render_svg(pf, {mu}, {1}) == svg);

  // ball-bounded cells render as polygons too
  PartitionFile disk;
  disk.dim = 2;
  ConvexCell cell = whole_space(2);
  cell.ball = Ball{{0.0, 0.0}, 1.0};
  disk.cells = {cell};
  disk.provenance = Json::object();
  std::string dsvg = render_svg(disk, {}, {});
  CHECK(dsvg.find("<path") != std::string::npos);

  PartitionFile line;
  line.dim = 1;
  line.cells = {whole_space(1)};
  line.provenance = Json::object();
  CHECK_THROWS_AS(render_svg(line, {}, {}), Error);
}
