#include "fairspace/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairspace {

Json table_to_json(const ValueTable& V) {
  Json rows = Json::array();
  for (int j = 0; j < V.rows; ++j) {
    Json row = Json::array();
    for (int i = 0; i < V.cols; ++i) row.push_back(V.at(j, i));
    rows.push_back(std::move(row));
  }
  return rows;
}

ValueTable table_from_json(const Json& j) {
  require(j.is_array() && !j.empty() && j[0].is_array(), "json-schema",
          "value table must be a nested array");
  ValueTable V = make_table(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
  for (int r = 0; r < V.rows; ++r) {
    require(static_cast<int>(j[r].size()) == V.cols, "json-schema", "ragged value table");
    for (int c = 0; c < V.cols; ++c) V.at(r, c) = j[r][c].get<double>();
  }
  return V;
}

namespace {

Json witnesses_to_json(const std::map<int, std::vector<int>>& witnesses) {
  Json w = Json::object();
  for (const auto& [excl, perm] : witnesses) w[std::to_string(excl)] = perm;
  return w;
}

}  // namespace

Json envy_certificate_to_json(const EnvyCertificate& cert) {
  Json j;
  j["kind"] = cert.secretive ? "secretive" : "envy";
  j["eps"] = cert.eps_used;
  j["feasible"] = cert.feasible;
  j["envy"] = cert.envy;
  j["value_table"] = table_to_json(cert.table);
  if (cert.secretive)
    j["witnesses"] = witnesses_to_json(cert.witnesses);
  else
    j["assignment"] = cert.assignment;
  return j;
}

Json levi_certificate_to_json(const EnvyCertificate& cert, const Vec& alphas) {
  Json j = envy_certificate_to_json(cert);
  j["kind"] = cert.secretive ? "levi-secretive" : "levi";
  j["alphas"] = alphas;
  return j;
}

namespace {

Json tables_to_json(const std::vector<ValueTable>& tables) {
  Json out = Json::array();
  for (const auto& t : tables) out.push_back(table_to_json(t));
  return out;
}

}  // namespace

Json simultaneous_certificate_to_json(const SimultaneousResult& res, bool secretive,
                                      double mass_tol) {
  Json j;
  j["kind"] = "simultaneous";
  j["secretive"] = secretive;
  j["n"] = static_cast<int>(res.cells.size());
  j["eps"] = res.eps_final;
  j["tol_eq"] = res.tol_eq;
  j["mass_tol"] = mass_tol;
  j["feasible"] = res.feasible;
  j["guaranteed"] = res.guaranteed;
  j["stable"] = res.stable;
  j["residual"] = res.state.residual;
  j["residual_trace"] = res.residual_trace;
  j["value_tables"] = tables_to_json(res.tables);
  j["base_masses"] = res.base_masses;
  if (secretive)
    j["witness_families"] = res.witness_families;
  else
    j["assignments"] = res.assignments;
  return j;
}

Json allocation_certificate_to_json(const GroupAllocationResult& res, int n, double mass_tol) {
  Json j;
  j["kind"] = "group-allocation";
  j["m"] = static_cast<int>(res.cells.size());
  j["n"] = n;
  j["eps"] = res.eps_final;
  j["tol_eq"] = res.tol_eq;
  j["mass_tol"] = mass_tol;
  j["feasible"] = res.feasible;
  j["guaranteed"] = res.guaranteed;
  j["stable"] = res.stable;
  j["residual"] = res.state.residual;
  j["residual_trace"] = res.residual_trace;
  j["value_tables"] = tables_to_json(res.tables);
  j["base_masses"] = res.base_masses;
  j["maps"] = res.maps;
  return j;
}

Json recursion_node_to_json(const RecursionNode& node) {
  Json j;
  j["n"] = node.n;
  j["m"] = node.m;
  j["s"] = node.s;
  j["leaf"] = node.leaf;
  j["feasible"] = node.report.feasible;
  j["guaranteed"] = node.report.guaranteed;
  j["stable"] = node.report.stable;
  j["eps_final"] = node.report.eps_final;
  j["residual"] = node.report.residual;
  j["tol_eq"] = node.report.tol_eq;
  j["residual_trace"] = node.report.residual_trace;
  j["maps"] = node.maps;
  Json kids = Json::array();
  for (const auto& c : node.children) kids.push_back(recursion_node_to_json(c));
  j["children"] = std::move(kids);
  return j;
}

Json proportional_certificate_to_json(const ProportionalResult& res) {
  Json j;
  j["kind"] = "proportional";
  j["n"] = static_cast<int>(res.cells.size());
  j["depth"] = res.depth;
  j["eps_total"] = res.eps_total;
  j["eps_level"] = res.eps_level;
  j["feasible"] = res.feasible;
  j["guaranteed"] = res.guaranteed;
  j["complete"] = res.complete;
  j["maps"] = res.maps;
  j["bounds"] = res.bounds;
  j["tree"] = recursion_node_to_json(res.tree);
  return j;
}

namespace {

constexpr double kTableTol = 1e-9;    // recomputed-mass agreement
constexpr double kClaimSlack = 1e-9;  // slack on certified inequalities
constexpr double kEnvyTol = 1e-6;     // recomputed optima vs stored scalars

void flag(VerifyReport& rep, const std::string& msg) {
  rep.ok = false;
  rep.violations.push_back(msg);
}

void check(VerifyReport& rep, bool cond, const std::string& msg) {
  if (!cond) flag(rep, msg);
}

std::string at(const char* what, int a, int b = -1) {
  std::ostringstream s;
  s << what << "[" << a;
  if (b >= 0) s << "][" << b;
  s << "]";
  return s.str();
}

void compare_tables(VerifyReport& rep, const ValueTable& stored, const ValueTable& fresh,
                    const std::string& label) {
  require(stored.rows == fresh.rows && stored.cols == fresh.cols, "bad-arity",
          label + ": stored table shape disagrees with the supplied measures/cells");
  for (int j = 0; j < fresh.rows; ++j)
    for (int i = 0; i < fresh.cols; ++i)
      if (std::abs(stored.at(j, i) - fresh.at(j, i)) > kTableTol) {
        flag(rep, label + " " + at("entry", j, i) + " differs from the recomputed mass");
        return;
      }
}

bool is_permutation(const std::vector<int>& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

std::vector<int> int_list(const Json& j) { return j.get<std::vector<int>>(); }

void verify_envy(VerifyReport& rep, const PartitionFile& pf, const Json& cert,
                 const std::vector<Measure>& measures) {
  require(!measures.empty(), "bad-arity", "this certificate kind needs --measures");
  ValueTable fresh = value_table(measures, pf.cells);
  ValueTable stored = table_from_json(cert.at("value_table"));
  compare_tables(rep, stored, fresh, "value_table");
  double eps = cert.at("eps").get<double>();
  bool feasible = cert.at("feasible").get<bool>();
  double envy = cert.at("envy").get<double>();
  int n = fresh.cols;

  if (cert.at("kind") == "envy") {
    require(fresh.rows == n, "bad-arity", "full certificate needs as many measures as cells");
    BottleneckResult opt = bottleneck_assignment(fresh);
    check(rep, std::abs(opt.envy - envy) <= kEnvyTol,
          "stored envy differs from the recomputed bottleneck value");
    check(rep, feasible == (envy <= eps), "feasible flag contradicts envy <= eps");
    if (cert.contains("assignment") && !cert.at("assignment").empty()) {
      auto assign = int_list(cert.at("assignment"));
      check(rep, is_permutation(assign, n), "assignment is not a permutation");
      if (is_permutation(assign, n))
        for (int j = 0; j < n; ++j)
          check(rep, fresh.at(j, assign[j]) >= fresh.row_max(j) - envy - kClaimSlack,
                at("assignment", j) + " violates the claimed envy bound");
    } else if (feasible) {
      flag(rep, "feasible certificate without an assignment");
    }
    return;
  }

  // secretive: witnesses per excluded piece
  require(fresh.rows == n - 1, "bad-arity",
          "secretive certificate needs one fewer measure than cells");
  double worst = 0.0;
  for (int excl = 0; excl < n; ++excl) worst = std::max(worst, secretive_exclusion_eps(fresh, excl));
  check(rep, std::abs(worst - envy) <= kEnvyTol,
        "stored envy differs from the recomputed worst exclusion");
  const Json& wit = cert.contains("witnesses") ? cert.at("witnesses") : Json::object();
  for (int excl = 0; excl < n; ++excl) {
    std::string key = std::to_string(excl);
    if (!wit.contains(key)) {
      if (feasible) flag(rep, "feasible certificate misses the witness for exclusion " + key);
      continue;
    }
    auto w = int_list(wit.at(key));
    if (static_cast<int>(w.size()) != fresh.rows) {
      flag(rep, "witness " + key + " has the wrong length");
      continue;
    }
    std::vector<char> used(n, 0);
    for (int j = 0; j < fresh.rows; ++j) {
      if (w[j] < 0 || w[j] >= n || w[j] == excl || used[w[j]]) {
        flag(rep, "witness " + key + " is not an injection avoiding the excluded piece");
        break;
      }
      used[w[j]] = 1;
      check(rep, fresh.at(j, w[j]) >= fresh.row_max(j) - eps - kClaimSlack,
            "witness " + key + " " + at("measure", j) + " falls below row max - eps");
    }
  }
}

void verify_levi(VerifyReport& rep, const PartitionFile& pf, const Json& cert,
                 const std::vector<Measure>& measures) {
  require(!measures.empty(), "bad-arity", "this certificate kind needs --measures");
  ValueTable fresh = value_table(measures, pf.cells);
  ValueTable stored = table_from_json(cert.at("value_table"));
  compare_tables(rep, stored, fresh, "value_table");
  Vec alphas = cert.at("alphas").get<Vec>();
  require(static_cast<int>(alphas.size()) == fresh.cols, "bad-arity",
          "alphas length differs from the cell count");
  double eps = cert.at("eps").get<double>();
  bool feasible = cert.at("feasible").get<bool>();
  int n = fresh.cols;

  auto shortfall = [&](int j, int i) { return std::max(0.0, alphas[i] - fresh.at(j, i)); };

  if (cert.at("kind") == "levi") {
    require(fresh.rows == n, "bad-arity", "full certificate needs as many measures as cones");
    if (cert.contains("assignment") && !cert.at("assignment").empty()) {
      auto assign = int_list(cert.at("assignment"));
      check(rep, is_permutation(assign, n), "assignment is not a permutation");
      if (is_permutation(assign, n) && feasible)
        for (int j = 0; j < n; ++j)
          check(rep, shortfall(j, assign[j]) <= eps + kClaimSlack,
                at("assignment", j) + " misses its prescribed cone mass by more than eps");
    } else if (feasible) {
      flag(rep, "feasible certificate without an assignment");
    }
    return;
  }

  require(fresh.rows == n - 1, "bad-arity",
          "secretive certificate needs one fewer measure than cones");
  const Json& wit = cert.contains("witnesses") ? cert.at("witnesses") : Json::object();
  for (int excl = 0; excl < n; ++excl) {
    std::string key = std::to_string(excl);
    if (!wit.contains(key)) {
      if (feasible) flag(rep, "feasible certificate misses the witness for exclusion " + key);
      continue;
    }
    auto w = int_list(wit.at(key));
    if (static_cast<int>(w.size()) != fresh.rows) {
      flag(rep, "witness " + key + " has the wrong length");
      continue;
    }
    std::vector<char> used(n, 0);
    for (int j = 0; j < fresh.rows; ++j) {
      if (w[j] < 0 || w[j] >= n || w[j] == excl || used[w[j]]) {
        flag(rep, "witness " + key + " is not an injection avoiding the excluded cone");
        break;
      }
      used[w[j]] = 1;
      check(rep, shortfall(j, w[j]) <= eps + kClaimSlack,
            "witness " + key + " " + at("measure", j) + " misses its cone mass by more than eps");
    }
  }
}

struct GroupTables {
  std::vector<ValueTable> fresh;
};

GroupTables recompute_group_tables(VerifyReport& rep, const PartitionFile& pf, const Json& cert,
                                   const std::vector<std::vector<Measure>>& groups) {
  const Json& stored = cert.at("value_tables");
  require(stored.is_array() && stored.size() == groups.size(), "bad-arity",
          "group count differs from the stored tables");
  GroupTables out;
  for (std::size_t r = 0; r < groups.size(); ++r) {
    ValueTable fresh = value_table(groups[r], pf.cells);
    compare_tables(rep, table_from_json(stored[r]), fresh, at("value_tables", static_cast<int>(r)));
    out.fresh.push_back(std::move(fresh));
  }
  return out;
}

void verify_base_masses(VerifyReport& rep, const PartitionFile& pf, const Json& cert,
                        const Measure& base, double target) {
  Vec fresh;
  for (const auto& cell : pf.cells) fresh.push_back(cell_mass(base, cell));
  Vec stored = cert.at("base_masses").get<Vec>();
  if (stored.size() != fresh.size()) {
    flag(rep, "base_masses length differs from the cell count");
    return;
  }
  for (std::size_t i = 0; i < fresh.size(); ++i)
    check(rep, std::abs(stored[i] - fresh[i]) <= kTableTol,
          at("base_masses", static_cast<int>(i)) + " differs from the recomputed mass");
  double max_w = 0.0;
  for (double w : base.weights) max_w = std::max(max_w, w);
  double tol = std::max(cert.at("mass_tol").get<double>(), 2.0 * max_w) + kClaimSlack;
  if (cert.at("feasible").get<bool>())
    for (std::size_t i = 0; i < fresh.size(); ++i)
      check(rep, std::abs(fresh[i] - target) <= tol,
            at("cell", static_cast<int>(i)) + " mass is not the equal share within tolerance");
}

void verify_residual(VerifyReport& rep, const Json& cert, const GroupTables& tables, double eps,
                     bool threshold, int n_measures, int cells) {
  std::vector<StochasticMatrix> matrices;
  try {
    for (const auto& fresh : tables.fresh) {
      std::vector<Vec> g(cells, Vec(threshold ? fresh.rows : cells, 0.0));
      if (threshold) {
        double cut = 1.0 / cells - eps;
        for (int j = 0; j < fresh.rows; ++j)
          for (int i = 0; i < cells; ++i) g[i][j] = std::max(0.0, fresh.at(j, i) - cut);
      } else {
        for (int j = 0; j < fresh.rows; ++j) {
          double cut = fresh.row_max(j) - eps;
          for (int i = 0; i < cells; ++i) g[i][j] = std::max(0.0, fresh.at(j, i) - cut);
        }
        if (fresh.rows == cells - 1)
          for (int i = 0; i < cells; ++i) g[i][cells - 1] = 1.0 / cells;
      }
      double target = threshold ? static_cast<double>(cells) / n_measures : 1.0;
      matrices.push_back(normalize_columns(g, target));
    }
  } catch (const Error& e) {
    flag(rep, std::string("matrix reconstruction failed: ") + e.what());
    return;
  }
  double fresh_res = state_residual(matrices);
  double stored_res = cert.at("residual").get<double>();
  check(rep, std::abs(fresh_res - stored_res) <= kEnvyTol,
        "stored residual differs from the recomputed one");
  if (cert.at("feasible").get<bool>())
    check(rep, fresh_res <= cert.at("tol_eq").get<double>() + kEnvyTol,
          "feasible certificate with residual above tol_eq");
}

void verify_simultaneous(VerifyReport& rep, const PartitionFile& pf, const Json& cert,
                         const VerifyInputs& in) {
  require(in.has_base, "bad-arity", "this certificate kind needs --base and --group");
  int n = static_cast<int>(pf.cells.size());
  require(cert.at("n").get<int>() == n, "bad-arity",
          "certificate piece count differs from the partition");
  bool secretive = cert.at("secretive").get<bool>();
  int expected = secretive ? n - 1 : n;
  for (const auto& g : in.groups)
    require(static_cast<int>(g.size()) == expected, "bad-arity",
            "group size disagrees with the certificate mode");

  GroupTables tables = recompute_group_tables(rep, pf, cert, in.groups);
  verify_base_masses(rep, pf, cert, in.base, 1.0 / n);
  double eps = cert.at("eps").get<double>();
  verify_residual(rep, cert, tables, eps, false, n, n);
  bool feasible = cert.at("feasible").get<bool>();
  if (!feasible) return;

  if (!secretive) {
    const Json& assigns = cert.at("assignments");
    if (assigns.size() != in.groups.size()) {
      flag(rep, "assignments count differs from the group count");
      return;
    }
    for (std::size_t r = 0; r < in.groups.size(); ++r) {
      auto pi = int_list(assigns[r]);
      if (!is_permutation(pi, n)) {
        flag(rep, at("assignments", static_cast<int>(r)) + " is not a permutation");
        continue;
      }
      const ValueTable& V = tables.fresh[r];
      for (int j = 0; j < n; ++j)
        check(rep, V.at(j, pi[j]) >= V.row_max(j) - eps - kClaimSlack,
              at("group", static_cast<int>(r), j) + " assigned piece falls below row max - eps");
    }
    return;
  }

  const Json& families = cert.at("witness_families");
  if (families.size() != in.groups.size()) {
    flag(rep, "witness_families count differs from the group count");
    return;
  }
  for (std::size_t r = 0; r < in.groups.size(); ++r) {
    if (static_cast<int>(families[r].size()) != n) {
      flag(rep, at("witness_families", static_cast<int>(r)) + " misses a favorite-piece case");
      continue;
    }
    const ValueTable& V = tables.fresh[r];
    for (int fav = 0; fav < n; ++fav) {
      auto pi = int_list(families[r][fav]);
      if (!is_permutation(pi, n) || pi[n - 1] != fav) {
        flag(rep, at("witness_families", static_cast<int>(r), fav) +
                      " is not a permutation sending the hidden slot to its favorite");
        continue;
      }
      for (int j = 0; j < n - 1; ++j)
        check(rep, V.at(j, pi[j]) >= V.row_max(j) - eps - kClaimSlack,
              at("witness_families", static_cast<int>(r), fav) +
                  " assigns a visible measure below row max - eps");
    }
  }
}

void verify_allocation(VerifyReport& rep, const PartitionFile& pf, const Json& cert,
                       const VerifyInputs& in) {
  require(in.has_base, "bad-arity", "this certificate kind needs --base and --group");
  int m = static_cast<int>(pf.cells.size());
  require(cert.at("m").get<int>() == m, "bad-arity",
          "certificate cell count differs from the partition");
  int n = cert.at("n").get<int>();
  for (const auto& g : in.groups)
    require(static_cast<int>(g.size()) == n, "bad-arity",
            "group size disagrees with the certificate");
  require(n >= 1 && m >= 1 && n % m == 0, "bad-arity", "cell count must divide the group size");

  GroupTables tables = recompute_group_tables(rep, pf, cert, in.groups);
  verify_base_masses(rep, pf, cert, in.base, 1.0 / m);
  double eps = cert.at("eps").get<double>();
  verify_residual(rep, cert, tables, eps, true, n, m);
  if (!cert.at("feasible").get<bool>()) return;

  const Json& maps = cert.at("maps");
  if (maps.size() != in.groups.size()) {
    flag(rep, "maps count differs from the group count");
    return;
  }
  for (std::size_t r = 0; r < in.groups.size(); ++r) {
    auto pi = int_list(maps[r]);
    if (static_cast<int>(pi.size()) != n) {
      flag(rep, at("maps", static_cast<int>(r)) + " has the wrong length");
      continue;
    }
    std::vector<int> counts(m, 0);
    bool in_range = true;
    for (int v : pi) {
      if (v < 0 || v >= m) {
        in_range = false;
        break;
      }
      ++counts[v];
    }
    if (!in_range) {
      flag(rep, at("maps", static_cast<int>(r)) + " has an out-of-range cell");
      continue;
    }
    for (int i = 0; i < m; ++i)
      check(rep, counts[i] == n / m,
            at("maps", static_cast<int>(r)) + " preimage sizes are not n/m");
    const ValueTable& V = tables.fresh[r];
    for (int j = 0; j < n; ++j)
      check(rep, V.at(j, pi[j]) >= 1.0 / m - eps - kClaimSlack,
            at("group", static_cast<int>(r), j) + " assigned cell falls below 1/m - eps");
  }
}

void verify_proportional(VerifyReport& rep, const PartitionFile& pf, const Json& cert,
                         const VerifyInputs& in) {
  require(in.has_base, "bad-arity", "this certificate kind needs --base and --group");
  int n = cert.at("n").get<int>();
  if (!cert.at("complete").get<bool>()) {
    check(rep, !cert.at("feasible").get<bool>(),
          "incomplete recursion must not claim feasibility");
    return;
  }
  require(static_cast<int>(pf.cells.size()) == n, "bad-arity",
          "certificate piece count differs from the partition");
  for (const auto& g : in.groups)
    require(static_cast<int>(g.size()) == n, "bad-arity", "each group needs n measures");

  double total = 0.0;
  for (const auto& cell : pf.cells) total += cell_mass(in.base, cell);
  check(rep, std::abs(total - 1.0) <= 1e-6, "base masses do not sum to 1 over the pieces");

  const Json& maps = cert.at("maps");
  const Json& bounds = cert.at("bounds");
  require(maps.size() == in.groups.size() && bounds.size() == in.groups.size(), "bad-arity",
          "maps/bounds count differs from the group count");
  bool feasible = cert.at("feasible").get<bool>();
  for (std::size_t r = 0; r < in.groups.size(); ++r) {
    auto pi = int_list(maps[r]);
    Vec b = bounds[r].get<Vec>();
    if (!is_permutation(pi, n) || static_cast<int>(b.size()) != n) {
      flag(rep, at("maps", static_cast<int>(r)) + " is not a permutation with matching bounds");
      continue;
    }
    if (!feasible) continue;
    for (int i = 0; i < n; ++i) {
      double mass = cell_mass(in.groups[r][i], pf.cells[pi[i]]);
      check(rep, mass >= b[i] - kClaimSlack,
            at("group", static_cast<int>(r), i) + " assigned piece falls below its composed bound");
    }
  }
}

}  // namespace

VerifyReport verify_certificate(const PartitionFile& pf, const Json& cert,
                                const VerifyInputs& in) {
  require(cert.is_object() && cert.contains("kind") && cert["kind"].is_string(), "json-schema",
          "certificate needs a string 'kind'");
  for (const auto& m : in.measures)
    require(m.dim == pf.dim, "bad-arity", "measure dimension differs from the partition");
  if (in.has_base)
    require(in.base.dim == pf.dim, "bad-arity", "base dimension differs from the partition");
  for (const auto& g : in.groups)
    for (const auto& m : g)
      require(m.dim == pf.dim, "bad-arity", "group measure dimension differs from the partition");

  VerifyReport rep;
  std::string kind = cert["kind"].get<std::string>();
  if (kind == "envy" || kind == "secretive")
    verify_envy(rep, pf, cert, in.measures);
  else if (kind == "levi" || kind == "levi-secretive")
    verify_levi(rep, pf, cert, in.measures);
  else if (kind == "simultaneous")
    verify_simultaneous(rep, pf, cert, in);
  else if (kind == "group-allocation")
    verify_allocation(rep, pf, cert, in);
  else if (kind == "proportional")
    verify_proportional(rep, pf, cert, in);
  else
    fail("json-schema", "unknown certificate kind '" + kind + "'");
  return rep;
}

}  // namespace fairspace
