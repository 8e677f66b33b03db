#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "fairspace/certify.hpp"
#include "fairspace/envyfree_convex.hpp"
#include "fairspace/json_io.hpp"
#include "fairspace/kkm_solver.hpp"
#include "fairspace/proportional.hpp"
#include "fairspace/svg_render.hpp"

namespace py = pybind11;
using namespace fairspace;

namespace {

Json parse(const std::string& s) { return parse_json_text(s); }

Json partition_json(int dim, const Partition& cells) {
  PartitionFile pf;
  pf.dim = dim;
  pf.cells = cells;
  pf.provenance = Json{{"tool", "fairspace-python"}};
  return partition_to_json(pf);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "envy-free and proportional convex partition toolkit";

  py::register_exception<Error>(m, "FairspaceError");

  py::class_<Measure>(m, "Measure")
      .def_property_readonly("dim", [](const Measure& mu) { return mu.dim; })
      .def_property_readonly("count", &Measure::count)
      .def_property_readonly("weights", [](const Measure& mu) { return mu.weights; })
      .def("point", &Measure::point_vec);

  m.def("make_measure", &make_measure, py::arg("dim"), py::arg("points"), py::arg("weights"));
  m.def("measure_from_json", [](const std::string& s) { return measure_from_json(parse(s)); });

  m.def(
      "equalize_weights",
      [](const Measure& mu, const std::vector<Vec>& sites, double tol, long max_iters) {
        EqualizeOptions opts;
        opts.max_iters = max_iters;
        EmpPoint p = equalize_weights(mu, sites, tol, opts);
        return py::make_tuple(p.lambdas, p.masses);
      },
      py::arg("measure"), py::arg("sites"), py::arg("tol") = 1e-4,
      py::arg("max_iters") = 100000);

  m.def(
      "solve_envy_free",
      [](const std::string& space_json, const std::vector<Measure>& measures, double eps,
         std::uint64_t seed, int restarts, int max_evals, bool secret) {
        DeltaSpacePtr space = delta_space_from_json(parse(space_json));
        SolveOptions opts;
        opts.eps_mass = eps;
        opts.seed = seed;
        opts.restarts = restarts;
        opts.max_evals = max_evals;
        opts.mode = secret ? SolveMode::Secretive : SolveMode::Auto;
        SolveResult res = solve_envy_free(*space, measures, opts);
        Json out;
        out["partition"] = partition_json(space->dim(), res.partition);
        out["certificate"] = envy_certificate_to_json(res.cert);
        out["x"] = res.x.coords;
        out["objective"] = res.objective;
        return out.dump();
      },
      py::arg("space"), py::arg("measures"), py::arg("eps") = 1e-2, py::arg("seed") = 0,
      py::arg("restarts") = 8, py::arg("max_evals") = 2000, py::arg("secret") = false);

  m.def(
      "solve_levi",
      [](const std::string& cones_json, const std::vector<Measure>& measures, const Vec& alphas,
         double eps, std::uint64_t seed, int restarts, int max_evals) {
        PartitionFile cones = partition_from_json(parse(cones_json));
        SolveOptions opts;
        opts.eps_mass = eps;
        opts.seed = seed;
        opts.restarts = restarts;
        opts.max_evals = max_evals;
        LeviResult res = solve_levi(cones.cells, measures, alphas, opts);
        Json out;
        out["partition"] = partition_json(cones.dim, res.cells);
        out["certificate"] = levi_certificate_to_json(res.cert, res.alphas);
        out["translate"] = res.translate;
        out["objective"] = res.objective;
        return out.dump();
      },
      py::arg("cones"), py::arg("measures"), py::arg("alphas"), py::arg("eps") = 1e-2,
      py::arg("seed") = 0, py::arg("restarts") = 8, py::arg("max_evals") = 2000);

  m.def(
      "solve_simultaneous",
      [](const Measure& base, const std::vector<std::vector<Measure>>& groups, int n,
         bool secretive, const Vec& eps_schedule, double tol_eq, double mass_tol,
         std::uint64_t seed, int restarts, int max_evals) {
        GroupInstance inst{base, groups, n, secretive};
        SimultaneousOptions opts;
        opts.eps_schedule = eps_schedule;
        opts.tol_eq = tol_eq;
        opts.mass_tol = mass_tol;
        opts.seed = seed;
        opts.restarts = restarts;
        opts.max_evals = max_evals;
        SimultaneousResult res = solve_simultaneous(inst, opts);
        Json out;
        if (!res.cells.empty()) out["partition"] = partition_json(base.dim, res.cells);
        out["certificate"] = simultaneous_certificate_to_json(res, secretive, opts.mass_tol);
        return out.dump();
      },
      py::arg("base"), py::arg("groups"), py::arg("n"), py::arg("secretive") = false,
      py::arg("eps_schedule") = Vec{}, py::arg("tol_eq") = 0.0, py::arg("mass_tol") = 1e-4,
      py::arg("seed") = 0, py::arg("restarts") = 8, py::arg("max_evals") = 250);

  m.def(
      "solve_group_allocation",
      [](const Measure& base, const std::vector<std::vector<Measure>>& groups, int m_cells,
         const Vec& eps_schedule, double tol_eq, double mass_tol, std::uint64_t seed,
         int restarts, int max_evals) {
        SimultaneousOptions opts;
        opts.eps_schedule = eps_schedule;
        opts.tol_eq = tol_eq;
        opts.mass_tol = mass_tol;
        opts.seed = seed;
        opts.restarts = restarts;
        opts.max_evals = max_evals;
        int n = groups.empty() ? m_cells : static_cast<int>(groups[0].size());
        GroupAllocationResult res = solve_group_allocation(base, groups, m_cells, opts);
        Json out;
        if (!res.cells.empty()) out["partition"] = partition_json(base.dim, res.cells);
        out["certificate"] = allocation_certificate_to_json(res, n, opts.mass_tol);
        return out.dump();
      },
      py::arg("base"), py::arg("groups"), py::arg("m"), py::arg("eps_schedule") = Vec{},
      py::arg("tol_eq") = 0.0, py::arg("mass_tol") = 1e-4, py::arg("seed") = 0,
      py::arg("restarts") = 8, py::arg("max_evals") = 250);

  m.def(
      "solve_proportional",
      [](const Measure& base, const std::vector<std::vector<Measure>>& groups, int n,
         double eps_total, double mass_tol, std::uint64_t seed, int restarts, int max_evals) {
        ProportionalOptions opts;
        opts.eps_total = eps_total;
        opts.mass_tol = mass_tol;
        opts.seed = seed;
        opts.restarts = restarts;
        opts.max_evals = max_evals;
        ProportionalResult res = solve_proportional(base, groups, n, opts);
        Json out;
        if (!res.cells.empty()) out["partition"] = partition_json(base.dim, res.cells);
        out["certificate"] = proportional_certificate_to_json(res);
        return out.dump();
      },
      py::arg("base"), py::arg("groups"), py::arg("n"), py::arg("eps_total") = 0.05,
      py::arg("mass_tol") = 1e-4, py::arg("seed") = 0, py::arg("restarts") = 8,
      py::arg("max_evals") = 250);

  m.def(
      "verify",
      [](const std::string& partition, const std::string& certificate,
         const std::vector<Measure>& measures, const std::optional<Measure>& base,
         const std::vector<std::vector<Measure>>& groups) {
        VerifyInputs in;
        in.measures = measures;
        if (base) {
          in.base = *base;
          in.has_base = true;
        }
        in.groups = groups;
        VerifyReport rep = verify_certificate(partition_from_json(parse(partition)),
                                              parse(certificate), in);
        return py::make_tuple(rep.ok, rep.violations);
      },
      py::arg("partition"), py::arg("certificate"), py::arg("measures") = std::vector<Measure>{},
      py::arg("base") = std::nullopt,
      py::arg("groups") = std::vector<std::vector<Measure>>{});

  m.def(
      "render_svg",
      [](const std::string& partition, const std::vector<Measure>& measures,
         const std::vector<int>& labels) {
        return render_svg(partition_from_json(parse(partition)), measures, labels, {});
      },
      py::arg("partition"), py::arg("measures") = std::vector<Measure>{},
      py::arg("labels") = std::vector<int>{});
}
