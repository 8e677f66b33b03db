#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairspace/certify.hpp"
#include "fairspace/envyfree_convex.hpp"
#include "fairspace/json_io.hpp"
#include "fairspace/kkm_solver.hpp"
#include "fairspace/proportional.hpp"
#include "fairspace/svg_render.hpp"

namespace {

using namespace fairspace;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitViolations = 3;

Vec parse_csv(const std::string& text) {
  Vec out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    require(!tok.empty(), "bad-arg", "empty number in '" + text + "'");
    std::size_t used = 0;
    out.push_back(std::stod(tok, &used));
    require(used == tok.size(), "bad-arg", "cannot parse number '" + tok + "'");
  }
  require(!out.empty(), "bad-arg", "expected a comma-separated number list");
  return out;
}

std::vector<Vec> parse_points(const std::string& text) {
  std::vector<Vec> pts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ';')) pts.push_back(parse_csv(tok));
  require(!pts.empty(), "bad-arg", "expected semicolon-separated points");
  return pts;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_csv(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::string cert_path_for(const std::string& out) {
  const std::string suffix = ".json";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".cert.json";
  return out + ".cert.json";
}

std::vector<Measure> load_measures(const std::vector<std::string>& paths) {
  std::vector<Measure> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(load_measure(p));
  return out;
}

std::vector<std::vector<Measure>> load_groups(const std::vector<std::vector<std::string>>& paths) {
  std::vector<std::vector<Measure>> out;
  out.reserve(paths.size());
  for (const auto& g : paths) out.push_back(load_measures(g));
  return out;
}

// decreasing halving schedule from 0.1 that ends exactly at eps
Vec schedule_to(double eps) {
  require(eps > 0.0, "bad-arg", "eps must be positive");
  Vec v;
  double e = 0.1;
  while (e > eps * 1.0000001 && v.size() < 5) {
    v.push_back(e);
    e *= 0.5;
  }
  v.push_back(eps);
  return v;
}

struct KkmFlags {
  std::vector<std::string> measures;
  double eps = 1e-2;
  std::uint64_t seed = 0;
  int restarts = 8;
  int max_evals = 2000;
  bool secret = false;
  std::string out;
};

void add_kkm_flags(CLI::App* cmd, const std::shared_ptr<KkmFlags>& f) {
  cmd->add_option("--measures", f->measures, "measure JSON files")->required()->expected(-1);
  cmd->add_option("--eps", f->eps, "certificate tolerance");
  cmd->add_option("--seed", f->seed, "search seed");
  cmd->add_option("--restarts", f->restarts, "search restarts");
  cmd->add_option("--max-evals", f->max_evals, "objective evaluations per restart");
  cmd->add_flag("--secret", f->secret, "withhold the last measure (secretive mode)");
  cmd->add_option("--out", f->out, "partition output path")->required();
}

SolveOptions kkm_options(const KkmFlags& f) {
  SolveOptions o;
  o.eps_mass = f.eps;
  o.seed = f.seed;
  o.restarts = f.restarts;
  o.max_evals = f.max_evals;
  o.mode = f.secret ? SolveMode::Secretive : SolveMode::Auto;
  return o;
}

int emit_envy_solution(const KkmFlags& f, const DeltaSpacePtr& space,
                       const std::vector<Measure>& measures, const char* subcommand) {
  SolveResult res = solve_envy_free(*space, measures, kkm_options(f));
  PartitionFile pf;
  pf.dim = space->dim();
  pf.cells = res.partition;
  pf.provenance = {{"tool", "fairspace"},
                   {"subcommand", subcommand},
                   {"seed", f.seed},
                   {"eps", f.eps},
                   {"space", delta_space_to_json(*space)},
                   {"x", res.x.coords},
                   {"objective", res.objective}};
  write_json_file(f.out, partition_to_json(pf));
  write_json_file(cert_path_for(f.out), envy_certificate_to_json(res.cert));
  std::printf("%s: feasible=%s envy=%.6g eps=%.6g -> %s + %s\n", subcommand,
              res.cert.feasible ? "true" : "false", res.cert.envy, f.eps, f.out.c_str(),
              cert_path_for(f.out).c_str());
  return res.cert.feasible ? kExitOk : kExitInfeasible;
}

struct GroupFlags {
  std::string base;
  std::vector<std::vector<std::string>> groups;
  int n = 0;
  double eps = 1e-2;
  std::string eps_schedule;
  double tol_eq = 0.0;
  double mass_tol = 1e-4;
  std::uint64_t seed = 0;
  int restarts = 8;
  int max_evals = 250;
  long equalize_iters = 5000;
  bool secret = false;
  std::string out;
};

void add_group_flags(CLI::App* cmd, const std::shared_ptr<GroupFlags>& f, bool with_secret) {
  cmd->add_option("--base", f->base, "base measure JSON file")->required();
  cmd->add_option("--group", f->groups, "one preference group (measure files); repeatable")
      ->required()
      ->expected(-1);
  cmd->add_option("--n", f->n, "piece count")->required();
  cmd->add_option("--eps", f->eps, "final eps of the schedule");
  cmd->add_option("--eps-schedule", f->eps_schedule, "explicit decreasing eps list a,b,c");
  cmd->add_option("--tol-eq", f->tol_eq, "residual acceptance (0 = auto)");
  cmd->add_option("--mass-tol", f->mass_tol, "inner equalizer tolerance");
  cmd->add_option("--seed", f->seed, "search seed");
  cmd->add_option("--restarts", f->restarts, "outer restarts");
  cmd->add_option("--max-evals", f->max_evals, "outer evaluations per restart");
  cmd->add_option("--equalize-iters", f->equalize_iters, "inner equalizer iteration cap");
  if (with_secret) cmd->add_flag("--secret", f->secret, "withhold each group's last measure");
  cmd->add_option("--out", f->out, "partition output path")->required();
}

SimultaneousOptions group_options(const GroupFlags& f) {
  SimultaneousOptions o;
  o.eps_schedule = f.eps_schedule.empty() ? schedule_to(f.eps) : parse_csv(f.eps_schedule);
  o.tol_eq = f.tol_eq;
  o.mass_tol = f.mass_tol;
  o.restarts = f.restarts;
  o.max_evals = f.max_evals;
  o.equalize_iters = f.equalize_iters;
  o.seed = f.seed;
  return o;
}

int run_convex_envyfree(const GroupFlags& f) {
  GroupInstance inst;
  inst.base = load_measure(f.base);
  inst.groups = load_groups(f.groups);
  inst.n = f.n;
  inst.secretive = f.secret;
  SimultaneousOptions opts = group_options(f);
  SimultaneousResult res = solve_simultaneous(inst, opts);
  PartitionFile pf;
  pf.dim = inst.base.dim;
  pf.cells = res.cells;
  pf.provenance = {{"tool", "fairspace"}, {"subcommand", "convex-envyfree"},
                   {"seed", f.seed},     {"eps", res.eps_final},
                   {"n", f.n},           {"secret", f.secret}};
  if (!res.cells.empty()) write_json_file(f.out, partition_to_json(pf));
  write_json_file(cert_path_for(f.out),
                  simultaneous_certificate_to_json(res, f.secret, opts.mass_tol));
  std::printf("convex-envyfree: feasible=%s residual=%.3e eps=%.6g stable=%s -> %s\n",
              res.feasible ? "true" : "false", res.state.residual, res.eps_final,
              res.stable ? "true" : "false", cert_path_for(f.out).c_str());
  return res.feasible ? kExitOk : kExitInfeasible;
}

int run_proportional(const GroupFlags& f) {
  Measure base = load_measure(f.base);
  auto groups = load_groups(f.groups);
  ProportionalOptions opts;
  opts.eps_total = f.eps;
  opts.tol_eq = f.tol_eq;
  opts.mass_tol = f.mass_tol;
  opts.restarts = f.restarts;
  opts.max_evals = f.max_evals;
  opts.equalize_iters = f.equalize_iters;
  opts.seed = f.seed;
  ProportionalResult res = solve_proportional(base, groups, f.n, opts);
  if (!res.cells.empty()) {
    PartitionFile pf;
    pf.dim = base.dim;
    pf.cells = res.cells;
    pf.provenance = {{"tool", "fairspace"},
                     {"subcommand", "proportional"},
                     {"seed", f.seed},
                     {"eps_total", f.eps},
                     {"n", f.n}};
    write_json_file(f.out, partition_to_json(pf));
  }
  write_json_file(cert_path_for(f.out), proportional_certificate_to_json(res));
  std::printf("proportional: feasible=%s depth=%d eps_level=%.6g -> %s\n",
              res.feasible ? "true" : "false", res.depth, res.eps_level,
              cert_path_for(f.out).c_str());
  return res.feasible ? kExitOk : kExitInfeasible;
}

int run_verify(const std::string& partition_path, const std::string& cert_path,
               const std::vector<std::string>& measure_paths, const std::string& base_path,
               const std::vector<std::vector<std::string>>& group_paths) {
  PartitionFile pf = partition_from_json(parse_json_file(partition_path));
  Json cert = parse_json_file(cert_path);
  VerifyInputs in;
  in.measures = load_measures(measure_paths);
  if (!base_path.empty()) {
    in.base = load_measure(base_path);
    in.has_base = true;
  }
  in.groups = load_groups(group_paths);
  VerifyReport rep = verify_certificate(pf, cert, in);
  if (rep.ok) {
    std::printf("verify: all certificate claims hold\n");
    return kExitOk;
  }
  for (const auto& v : rep.violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
  return kExitViolations;
}

int run_render(const std::string& partition_path, const std::string& out,
               const std::vector<std::string>& measure_paths, const std::string& cert_path) {
  PartitionFile pf = partition_from_json(parse_json_file(partition_path));
  std::vector<Measure> measures = load_measures(measure_paths);
  std::vector<int> labels;
  if (!cert_path.empty()) {
    Json cert = parse_json_file(cert_path);
    if (cert.contains("assignment") && cert["assignment"].is_array())
      labels = cert["assignment"].get<std::vector<int>>();
  }
  std::string svg = render_svg(pf, measures, labels, {});
  std::ofstream f(out, std::ios::binary);
  require(f.good(), "io-error", "cannot write " + out);
  f << svg;
  require(f.good(), "io-error", "write failed for " + out);
  std::printf("render: wrote %s\n", out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"envy-free and proportional convex partition toolkit"};
  app.require_subcommand(1);
  int code = kExitOk;

  CLI::App* solve = app.add_subcommand("solve", "compute a partition and its certificate");
  solve->require_subcommand(1);

  {
    auto f = std::make_shared<KkmFlags>();
    auto center = std::make_shared<std::string>("0,0");
    auto radius = std::make_shared<double>(1.0);
    CLI::App* cmd = solve->add_subcommand("two-lines", "disk partition by two chords");
    add_kkm_flags(cmd, f);
    cmd->add_option("--center", *center, "disk center x,y");
    cmd->add_option("--radius", *radius, "disk radius");
    cmd->callback([&code, f, center, radius]() {
      auto space = DeltaSpace::two_line_disk(parse_csv(*center), *radius);
      code = emit_envy_solution(*f, space, load_measures(f->measures), "two-lines");
    });
  }

  {
    auto f = std::make_shared<KkmFlags>();
    auto directions = std::make_shared<std::string>();
    auto cuts = std::make_shared<std::string>();
    CLI::App* cmd = solve->add_subcommand("nested", "nested hyperplane partition");
    add_kkm_flags(cmd, f);
    cmd->add_option("--directions", *directions, "cut directions x,y;x,y;...")->required();
    cmd->add_option("--cuts", *cuts, "piece cut at each step, 0-based")->required();
    cmd->callback([&code, f, directions, cuts]() {
      auto dirs = parse_points(*directions);
      require(!dirs.empty(), "bad-arg", "need at least one direction");
      int dim = static_cast<int>(dirs[0].size());
      auto space = DeltaSpace::nested(dim, dirs, parse_ints(*cuts));
      code = emit_envy_solution(*f, space, load_measures(f->measures), "nested");
    });
  }

  {
    auto f = std::make_shared<KkmFlags>();
    auto sites = std::make_shared<std::string>();
    auto scale = std::make_shared<double>(0.0);
    CLI::App* cmd = solve->add_subcommand("power-fixed", "power diagram with pinned sites");
    add_kkm_flags(cmd, f);
    cmd->add_option("--sites", *sites, "sites x,y;x,y;...")->required();
    cmd->add_option("--M", *scale, "weight scale M < 0 (0 = calibrate)");
    cmd->callback([&code, f, sites, scale]() {
      auto site_list = parse_points(*sites);
      auto measures = load_measures(f->measures);
      double M = *scale;
      if (M == 0.0) M = calibrate_M(site_list, measures, f->eps);
      auto space = DeltaSpace::power_fixed(site_list, M);
      code = emit_envy_solution(*f, space, measures, "power-fixed");
    });
  }

  {
    auto f = std::make_shared<KkmFlags>();
    auto cones_path = std::make_shared<std::string>();
    auto alphas = std::make_shared<std::string>();
    CLI::App* cmd = solve->add_subcommand("levi", "translated-cones partition");
    add_kkm_flags(cmd, f);
    cmd->add_option("--cones", *cones_path, "cone fan as a partition JSON file")->required();
    cmd->add_option("--alphas", *alphas, "prescribed fractions a,b,...")->required();
    cmd->callback([&code, f, cones_path, alphas]() {
      PartitionFile cones = partition_from_json(parse_json_file(*cones_path));
      auto measures = load_measures(f->measures);
      LeviResult res = solve_levi(cones.cells, measures, parse_csv(*alphas), kkm_options(*f));
      PartitionFile pf;
      pf.dim = cones.dim;
      pf.cells = res.cells;
      pf.provenance = {{"tool", "fairspace"}, {"subcommand", "levi"},
                       {"seed", f->seed},    {"eps", f->eps},
                       {"alphas", res.alphas}, {"translate", res.translate}};
      write_json_file(f->out, partition_to_json(pf));
      write_json_file(cert_path_for(f->out), levi_certificate_to_json(res.cert, res.alphas));
      std::printf("levi: feasible=%s envy=%.6g -> %s + %s\n",
                  res.cert.feasible ? "true" : "false", res.cert.envy, f->out.c_str(),
                  cert_path_for(f->out).c_str());
      code = res.cert.feasible ? kExitOk : kExitInfeasible;
    });
  }

  {
    auto f = std::make_shared<GroupFlags>();
    CLI::App* cmd =
        solve->add_subcommand("convex-envyfree", "simultaneous envy-free power partition");
    add_group_flags(cmd, f, true);
    cmd->callback([&code, f]() { code = run_convex_envyfree(*f); });
  }

  {
    auto f = std::make_shared<GroupFlags>();
    CLI::App* cmd =
        solve->add_subcommand("proportional", "proportional partition for arbitrary n");
    add_group_flags(cmd, f, false);
    cmd->callback([&code, f]() { code = run_proportional(*f); });
  }

  {
    auto partition = std::make_shared<std::string>();
    auto cert = std::make_shared<std::string>();
    auto measures = std::make_shared<std::vector<std::string>>();
    auto base = std::make_shared<std::string>();
    auto groups = std::make_shared<std::vector<std::vector<std::string>>>();
    CLI::App* cmd = app.add_subcommand("verify", "re-check every certificate claim");
    cmd->add_option("partition", *partition, "partition JSON")->required();
    cmd->add_option("certificate", *cert, "certificate JSON")->required();
    cmd->add_option("--measures", *measures, "measure JSON files")->expected(-1);
    cmd->add_option("--base", *base, "base measure JSON file");
    cmd->add_option("--group", *groups, "one preference group; repeatable")->expected(-1);
    cmd->callback([&code, partition, cert, measures, base, groups]() {
      code = run_verify(*partition, *cert, *measures, *base, *groups);
    });
  }

  {
    auto partition = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto measures = std::make_shared<std::vector<std::string>>();
    auto cert = std::make_shared<std::string>();
    CLI::App* cmd = app.add_subcommand("render", "draw a 2-D partition as SVG");
    cmd->add_option("partition", *partition, "partition JSON")->required();
    cmd->add_option("--out", *out, "SVG output path")->required();
    cmd->add_option("--measures", *measures, "measure JSON files")->expected(-1);
    cmd->add_option("--certificate", *cert, "certificate JSON for assignment labels");
    cmd->callback([&code, partition, out, measures, cert]() {
      code = run_render(*partition, *out, *measures, *cert);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int c = app.exit(e);
    return c == 0 ? 0 : kExitError;
  } catch (const fairspace::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return code;
}
