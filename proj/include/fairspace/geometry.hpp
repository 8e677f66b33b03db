#pragma once

#include <optional>
#include <vector>

#include "fairspace/common.hpp"

namespace fairspace {

enum class Sense { Ge, Le };

/// Closed halfspace {y : <y,normal> >= offset} (Ge) or <= offset (Le).
/// normal is unit length whenever offset is finite. offset = +inf / -inf is
/// allowed and encodes the degenerate limits: Ge with +inf is the empty set,
/// Ge with -inf is all of R^d, and symmetrically for Le.
struct HalfSpace {
  Vec normal;
  double offset = 0.0;
  Sense sense = Sense::Ge;
};

HalfSpace halfspace(Vec normal, double offset, Sense sense);

/// true iff the halfspace is all of R^d / the empty set
bool is_vacuous(const HalfSpace& h);
bool is_empty_halfspace(const HalfSpace& h);

bool contains(const HalfSpace& h, const Vec& y, double slack = 1e-12);

struct Ball {
  Vec center;
  double radius = 0.0;
};

/// Intersection of finitely many halfspaces, optionally further cut by a
/// closed ball (disk partitions keep the ball exact instead of polygonizing).
struct ConvexCell {
  int dim = 0;
  std::vector<HalfSpace> constraints;
  std::optional<Ball> ball;
};

ConvexCell whole_space(int dim);
ConvexCell empty_cell(int dim);

bool contains(const ConvexCell& cell, const Vec& y, double slack = 1e-12);

ConvexCell intersect(ConvexCell cell, const HalfSpace& h);
/// concatenates constraint lists; both cells must share dim (and at most one ball)
ConvexCell intersect_cells(const ConvexCell& a, const ConvexCell& b);
/// cell + x (offsets shift by <x, normal>, ball center shifts)
ConvexCell translate_cell(const ConvexCell& cell, const Vec& x);

using Partition = std::vector<ConvexCell>;

/// Weighted (power) diagram: sites x_j with additive weights lambda_j.
/// Cell j = {y : |y-x_j|^2 - lambda_j <= |y-x_i|^2 - lambda_i for all i}.
struct PowerDiagramConfig {
  std::vector<Vec> sites;
  Vec lambdas;
};

void validate(const PowerDiagramConfig& cfg);

/// halfspace form of power cell j (0-based); duplicate sites with equal
/// lambdas tie-break toward the lower index (strict inequality constraint
/// is represented closed; callers that need single membership use the
/// point-wise argmin instead)
ConvexCell power_cell(const PowerDiagramConfig& cfg, int j);
Partition power_cells(const PowerDiagramConfig& cfg);

/// index of the power-minimal site for point y, ties to the lowest index
int power_argmin(const std::vector<Vec>& sites, const Vec& lambdas, const double* y, int dim);

/// Offset used when joining two partition families along a direction:
/// alpha in [0,1] -> (2a-1)/(1-|2a-1|), with limits -inf at 0 and +inf at 1.
double join_offset(double alpha);

}  // namespace fairspace
