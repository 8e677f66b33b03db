#pragma once

#include <memory>
#include <vector>

#include "fairspace/geometry.hpp"
#include "fairspace/measure.hpp"
#include "fairspace/simplex.hpp"

namespace fairspace {

/// Immutable tree describing a parametrized family of convex partitions:
/// a map from the standard simplex to partitions of R^d where coordinate
/// x_i = 0 forces piece i to have measure zero. Leaves are the concrete
/// families, Join glues two families along a direction.
class DeltaSpace {
 public:
  enum class Kind { Trivial, TwoLineDisk, PowerFixedSites, Join };

  using Ptr = std::shared_ptr<const DeltaSpace>;

  static Ptr trivial(int dim);
  static Ptr two_line_disk(Vec center, double radius);
  static Ptr power_fixed(std::vector<Vec> sites, double M);
  static Ptr join(Ptr left, Ptr right, Vec direction);

  /// nested hyperplane partitions with fixed directions: start from the
  /// one-piece family and repeatedly cut one piece by a hyperplane.
  /// cut_indices[t] is the 0-based piece to cut at step t (must be <= t);
  /// the cut piece j splits into pieces j (upper side) and j+1 (lower side).
  static Ptr nested(int dim, const std::vector<Vec>& directions,
                    const std::vector<int>& cut_indices);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int pieces() const { return pieces_; }

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Vec>& sites() const { return sites_; }
  double weight_scale() const { return weight_scale_; }
  const Ptr& left() const { return left_; }
  const Ptr& right() const { return right_; }
  const Vec& direction() const { return direction_; }

 private:
  DeltaSpace() = default;

  Kind kind_ = Kind::Trivial;
  int dim_ = 0;
  int pieces_ = 1;
  Vec center_;
  double radius_ = 0.0;
  std::vector<Vec> sites_;
  double weight_scale_ = -1.0;  // the negative constant M of the rescaled simplex
  Ptr left_, right_;
  Vec direction_;
};

using DeltaSpacePtr = DeltaSpace::Ptr;

/// R(x): ordered cells, one per simplex coordinate
Partition evaluate(const DeltaSpace& space, const SimplexPoint& x);

/// disk cut by the two chords p0p2 and p1p3, where p_k sits at cumulative
/// angle 2*pi*(x_1+...+x_k) on the disk boundary; cell i holds arc
/// p_{i-1}..p_i. Cells carry the exact ball constraint.
Partition two_line_partition(const SimplexPoint& x, const Vec& center, double radius);

/// power diagram with pinned sites, weights lambda_i = M - n*M*x_i (M < 0)
Partition power_fixed_sites_partition(const std::vector<Vec>& sites, const SimplexPoint& x,
                                      double M);

/// smallest-effort negative M such that for every face point (any x with
/// x_i = 0, vertices included) the floor cell i has mass < eps under every
/// measure; doubling search from -1 plus one binary refinement
double calibrate_M(const std::vector<Vec>& sites, const std::vector<Measure>& measures,
                   double eps, int max_doublings = 60);

}  // namespace fairspace
