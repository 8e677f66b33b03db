#include "fairspace/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fairspace {

namespace {

// byte offset -> 1-based line/column for parse diagnostics
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double number_field(const Json& j, const char* key) {
  require(j.contains(key) && j[key].is_number(), "json-schema",
          std::string("expected numeric field '") + key + "'");
  return j[key].get<double>();
}

Vec vec_field(const Json& j) {
  require(j.is_array(), "json-schema", "expected an array of numbers");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) {
    require(e.is_number(), "json-schema", "expected an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

std::vector<Vec> point_list(const Json& j) {
  require(j.is_array(), "json-schema", "expected an array of points");
  std::vector<Vec> pts;
  pts.reserve(j.size());
  for (const auto& e : j) pts.push_back(vec_field(e));
  return pts;
}

Json vec_to_json(const Vec& v) { return Json(v); }

// grid values arrive either flat (with "shape") or as nested arrays
void flatten_grid(const Json& j, int depth, std::vector<int>& shape, std::vector<double>& out) {
  if (j.is_number()) {
    require(depth == static_cast<int>(shape.size()), "json-schema", "ragged grid values");
    out.push_back(j.get<double>());
    return;
  }
  require(j.is_array() && !j.empty(), "json-schema", "grid values must be nested arrays");
  if (depth == static_cast<int>(shape.size())) shape.push_back(static_cast<int>(j.size()));
  require(shape[depth] == static_cast<int>(j.size()), "json-schema", "ragged grid values");
  for (const auto& e : j) flatten_grid(e, depth + 1, shape, out);
}

}  // namespace

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream msg;
    msg << "malformed JSON at line " << line << ", column " << col << ": " << e.what();
    fail("json-parse", msg.str());
  }
}

Json parse_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "io-error", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_json_text(buf.str());
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io-error", "cannot write " + path);
  out << j.dump(2) << "\n";
  require(out.good(), "io-error", "write failed for " + path);
}

MeasureSpec measure_spec_from_json(const Json& j) {
  require(j.is_object(), "json-schema", "measure must be a JSON object");
  require(j.contains("kind") && j["kind"].is_string(), "json-schema",
          "measure needs a string 'kind'");
  std::string kind = j["kind"].get<std::string>();
  MeasureSpec spec;
  spec.dim = static_cast<int>(number_field(j, "dim"));

  if (kind == "points") {
    spec.kind = MeasureSpec::Kind::Points;
    require(j.contains("points"), "json-schema", "points measure needs 'points'");
    spec.points = point_list(j["points"]);
    if (j.contains("weights"))
      spec.weights = vec_field(j["weights"]);
    else
      spec.weights.assign(spec.points.size(), 1.0 / std::max<std::size_t>(1, spec.points.size()));
  } else if (kind == "grid") {
    spec.kind = MeasureSpec::Kind::Grid;
    require(j.contains("origin") && j.contains("spacing") && j.contains("values"), "json-schema",
            "grid measure needs 'origin', 'spacing', 'values'");
    spec.origin = vec_field(j["origin"]);
    spec.spacing = vec_field(j["spacing"]);
    if (j.contains("shape")) {
      for (const auto& e : j["shape"]) spec.shape.push_back(e.get<int>());
      spec.values = vec_field(j["values"]);
    } else {
      flatten_grid(j["values"], 0, spec.shape, spec.values);
    }
  } else if (kind == "gaussian-mixture") {
    spec.kind = MeasureSpec::Kind::GaussianMixture;
    require(j.contains("components") && j["components"].is_array(), "json-schema",
            "mixture measure needs 'components'");
    for (const auto& c : j["components"]) {
      GaussianComponent g;
      g.mean = vec_field(c.at("mean"));
      g.cov_diag = vec_field(c.at("cov_diag"));
      g.weight = number_field(c, "weight");
      spec.components.push_back(std::move(g));
    }
    spec.sample_count = static_cast<int>(number_field(j, "samples"));
    spec.seed = static_cast<std::uint64_t>(number_field(j, "seed"));
  } else {
    fail("json-schema", "unknown measure kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

Json measure_spec_to_json(const MeasureSpec& spec) {
  Json j;
  j["dim"] = spec.dim;
  switch (spec.kind) {
    case MeasureSpec::Kind::Points: {
      j["kind"] = "points";
      Json pts = Json::array();
      for (const auto& p : spec.points) pts.push_back(vec_to_json(p));
      j["points"] = std::move(pts);
      j["weights"] = vec_to_json(spec.weights);
      break;
    }
    case MeasureSpec::Kind::Grid:
      j["kind"] = "grid";
      j["origin"] = vec_to_json(spec.origin);
      j["spacing"] = vec_to_json(spec.spacing);
      j["shape"] = spec.shape;
      j["values"] = spec.values;
      break;
    case MeasureSpec::Kind::GaussianMixture: {
      j["kind"] = "gaussian-mixture";
      Json comps = Json::array();
      for (const auto& c : spec.components) {
        Json e;
        e["mean"] = vec_to_json(c.mean);
        e["cov_diag"] = vec_to_json(c.cov_diag);
        e["weight"] = c.weight;
        comps.push_back(std::move(e));
      }
      j["components"] = std::move(comps);
      j["samples"] = spec.sample_count;
      j["seed"] = spec.seed;
      break;
    }
  }
  return j;
}

Measure measure_from_json(const Json& j) {
  Measure mu = realize(measure_spec_from_json(j));
  validate(mu);
  return mu;
}

Measure load_measure(const std::string& path) { return measure_from_json(parse_json_file(path)); }

Json halfspace_to_json(const HalfSpace& h) {
  Json j;
  j["normal"] = vec_to_json(h.normal);
  if (h.offset == kInf)
    j["offset"] = "+inf";
  else if (h.offset == -kInf)
    j["offset"] = "-inf";
  else
    j["offset"] = h.offset;
  j["sense"] = h.sense == Sense::Ge ? ">=" : "<=";
  return j;
}

HalfSpace halfspace_from_json(const Json& j) {
  require(j.is_object() && j.contains("normal") && j.contains("offset") && j.contains("sense"),
          "json-schema", "constraint needs 'normal', 'offset', 'sense'");
  HalfSpace h;
  h.normal = vec_field(j["normal"]);
  const Json& off = j["offset"];
  if (off.is_string()) {
    std::string s = off.get<std::string>();
    if (s == "+inf")
      h.offset = kInf;
    else if (s == "-inf")
      h.offset = -kInf;
    else
      fail("json-schema", "offset string must be '+inf' or '-inf'");
  } else {
    require(off.is_number(), "json-schema", "offset must be a number or '+inf'/'-inf'");
    h.offset = off.get<double>();
  }
  std::string sense = j["sense"].get<std::string>();
  if (sense == ">=")
    h.sense = Sense::Ge;
  else if (sense == "<=")
    h.sense = Sense::Le;
  else
    fail("json-schema", "sense must be '>=' or '<='");
  return h;
}

Json cell_to_json(const ConvexCell& cell) {
  Json j;
  Json cons = Json::array();
  for (const auto& h : cell.constraints) cons.push_back(halfspace_to_json(h));
  j["constraints"] = std::move(cons);
  if (cell.ball) {
    Json b;
    b["center"] = vec_to_json(cell.ball->center);
    b["radius"] = cell.ball->radius;
    j["ball"] = std::move(b);
  }
  return j;
}

ConvexCell cell_from_json(const Json& j) {
  require(j.is_object() && j.contains("constraints") && j["constraints"].is_array(), "json-schema",
          "cell needs a 'constraints' array");
  // dimension is fixed by the enclosing partition; infer from content here
  int dim = 0;
  for (const auto& c : j["constraints"])
    if (c.contains("normal") && c["normal"].is_array()) dim = static_cast<int>(c["normal"].size());
  if (j.contains("ball")) dim = static_cast<int>(j["ball"].at("center").size());
  ConvexCell cell = whole_space(std::max(dim, 1));
  for (const auto& c : j["constraints"]) cell = intersect(cell, halfspace_from_json(c));
  if (j.contains("ball")) {
    Ball b;
    b.center = vec_field(j["ball"].at("center"));
    b.radius = number_field(j["ball"], "radius");
    cell.ball = b;
  }
  return cell;
}

Json partition_to_json(const PartitionFile& pf) {
  Json j;
  j["dim"] = pf.dim;
  Json cells = Json::array();
  for (const auto& c : pf.cells) cells.push_back(cell_to_json(c));
  j["cells"] = std::move(cells);
  j["provenance"] = pf.provenance.is_null() ? Json::object() : pf.provenance;
  return j;
}

PartitionFile partition_from_json(const Json& j) {
  require(j.is_object() && j.contains("dim") && j.contains("cells"), "json-schema",
          "partition needs 'dim' and 'cells'");
  PartitionFile pf;
  pf.dim = static_cast<int>(number_field(j, "dim"));
  require(pf.dim >= 1, "json-schema", "partition dim must be positive");
  require(j["cells"].is_array() && !j["cells"].empty(), "json-schema",
          "partition needs at least one cell");
  for (const auto& c : j["cells"]) {
    ConvexCell cell = cell_from_json(c);
    cell.dim = pf.dim;
    for (const auto& h : cell.constraints)
      require(static_cast<int>(h.normal.size()) == pf.dim, "json-schema",
              "constraint dimension differs from the partition");
    pf.cells.push_back(std::move(cell));
  }
  if (j.contains("provenance")) pf.provenance = j["provenance"];
  return pf;
}

Json delta_space_to_json(const DeltaSpace& space) {
  Json j;
  switch (space.kind()) {
    case DeltaSpace::Kind::Trivial:
      j["kind"] = "trivial";
      j["dim"] = space.dim();
      break;
    case DeltaSpace::Kind::TwoLineDisk:
      j["kind"] = "two-line-disk";
      j["center"] = vec_to_json(space.center());
      j["radius"] = space.radius();
      break;
    case DeltaSpace::Kind::PowerFixedSites: {
      j["kind"] = "power-fixed";
      Json sites = Json::array();
      for (const auto& s : space.sites()) sites.push_back(vec_to_json(s));
      j["sites"] = std::move(sites);
      j["M"] = space.weight_scale();
      break;
    }
    case DeltaSpace::Kind::Join:
      j["kind"] = "join";
      j["direction"] = vec_to_json(space.direction());
      j["left"] = delta_space_to_json(*space.left());
      j["right"] = delta_space_to_json(*space.right());
      break;
  }
  return j;
}

DeltaSpacePtr delta_space_from_json(const Json& j) {
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(), "json-schema",
          "space needs a string 'kind'");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "trivial") return DeltaSpace::trivial(static_cast<int>(number_field(j, "dim")));
  if (kind == "two-line-disk")
    return DeltaSpace::two_line_disk(vec_field(j.at("center")), number_field(j, "radius"));
  if (kind == "power-fixed") {
    std::vector<Vec> sites = point_list(j.at("sites"));
    return DeltaSpace::power_fixed(std::move(sites), number_field(j, "M"));
  }
  if (kind == "join")
    return DeltaSpace::join(delta_space_from_json(j.at("left")),
                            delta_space_from_json(j.at("right")), vec_field(j.at("direction")));
  fail("json-schema", "unknown space kind '" + kind + "'");
}

}  // namespace fairspace
