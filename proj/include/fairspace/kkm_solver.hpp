#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "fairspace/combinatorics.hpp"
#include "fairspace/delta_space.hpp"

namespace fairspace {

enum class SolveMode { Auto, Full, Secretive };

struct SolveOptions {
  double eps_mass = 1e-2;  // certificate tolerance
  int restarts = 8;
  int max_evals = 2000;  // per restart
  std::uint64_t seed = 0;
  SolveMode mode = SolveMode::Auto;
};

/// Self-contained fairness certificate: the value table is recomputed from
/// the emitted partition, so verification needs no solver state.
/// Full mode: assignment[j] is the piece given to measure j and
/// envy = max_j (row_max_j - V[j][assignment[j]]).
/// Secretive mode: witnesses[i'] lists, for each visible measure, the piece
/// it takes when the hidden measure insists on piece i'; envy is the largest
/// approval slack any exclusion needs.
struct EnvyCertificate {
  ValueTable table;
  bool secretive = false;
  std::vector<int> assignment;
  std::map<int, std::vector<int>> witnesses;
  double envy = 0.0;
  double eps_used = 0.0;
  bool feasible = false;
};

struct SolveResult {
  SimplexPoint x;
  Partition partition;
  EnvyCertificate cert;
  double objective = 0.0;  // search objective at x (secretive: sum over exclusions)
  long evals = 0;
};

/// search objective: full = bottleneck envy of the table at R(x);
/// secretive = sum over the n exclusions of the minimal approval slack that
/// makes the exclusion matchable (smoother than the feasibility indicator)
double envy_objective(const DeltaSpace& space, const std::vector<Measure>& measures,
                      const SimplexPoint& x, SolveMode mode);

/// multi-start Nelder-Mead over the simplex (chart = drop last coordinate,
/// Euclidean projection back), restarts from the barycenter plus a
/// low-discrepancy seed set, deterministic merge, pattern-search polish
struct MultistartResult {
  SimplexPoint x;
  double value = 0.0;
  long evals = 0;
};
MultistartResult multistart_simplex_minimize(int n,
                                             const std::function<double(const SimplexPoint&)>& f,
                                             const SolveOptions& opts);

SolveResult solve_envy_free(const DeltaSpace& space, const std::vector<Measure>& measures,
                            const SolveOptions& opts);

struct OracleResult {
  SimplexPoint x;
  double value = 0.0;
};

/// full barycentric grid sweep of the same objective (budget-guarded)
OracleResult brute_force_oracle(const DeltaSpace& space, const std::vector<Measure>& measures,
                                int resolution);

/// search simplex for the translated-cones solver: facet halfspaces
/// {<y,u_i> >= c_i} obtained by translating cone-covering halfspaces outward
/// until every measure puts less than alpha_i beyond them
struct LeviFrame {
  std::vector<Vec> u;
  Vec c;
  std::vector<Vec> vertices;  // vertex k opposite facet k
};

LeviFrame build_levi_frame(const std::vector<ConvexCell>& cones,
                           const std::vector<Measure>& measures, const Vec& alphas);

/// min over measure->cone assignments of max_i (alpha_i - mu(x + C_i))_+
/// (secretive: summed over the d+1 possible exclusions)
double levi_objective(const std::vector<ConvexCell>& cones,
                      const std::vector<Measure>& measures, const Vec& alphas, const Vec& x,
                      SolveMode mode);

struct LeviResult {
  Vec translate;
  Partition cells;  // the translated cones
  EnvyCertificate cert;
  Vec alphas;
  double objective = 0.0;
  long evals = 0;
  LeviFrame frame;
};

LeviResult solve_levi(const std::vector<ConvexCell>& cones, const std::vector<Measure>& measures,
                      const Vec& alphas, const SolveOptions& opts);

struct LeviOracleResult {
  Vec x;
  double value = 0.0;
};
LeviOracleResult levi_grid_oracle(const std::vector<ConvexCell>& cones,
                                  const std::vector<Measure>& measures, const Vec& alphas,
                                  int resolution);

}  // namespace fairspace
