#pragma once

#include <cstdint>
#include <vector>

#include "fairspace/geometry.hpp"
#include "fairspace/rng.hpp"

namespace fairspace {

/// Finitely supported probability measure (the solvers only ever see sampled
/// measures). Points are flattened row-major, weights sum to 1 up to fp noise.
/// origin_mass tracks the absolute mass of the region this measure was
/// restricted to; a fresh measure has origin_mass 1 and restriction multiplies
/// it by the conditioned cell's mass, so absolute masses can be recovered
/// after a chain of restrictions.
struct Measure {
  int dim = 0;
  std::vector<double> points;
  std::vector<double> weights;
  double origin_mass = 1.0;

  int count() const { return static_cast<int>(weights.size()); }
  const double* point(int i) const { return points.data() + static_cast<std::size_t>(i) * dim; }
  Vec point_vec(int i) const {
    const double* p = point(i);
    return Vec(p, p + dim);
  }
};

void validate(const Measure& mu);
Measure make_measure(int dim, const std::vector<Vec>& pts, const Vec& weights);

struct GaussianComponent {
  Vec mean;
  Vec cov_diag;
  double weight = 1.0;
};

/// Declarative description of a measure; realize() turns it into samples.
///  - Points: explicit atoms
///  - Grid: axis-aligned density grid, atoms at cell centers
///  - GaussianMixture: sample_count iid draws, equal weights
struct MeasureSpec {
  enum class Kind { Points, Grid, GaussianMixture };
  Kind kind = Kind::Points;
  int dim = 0;

  std::vector<Vec> points;
  Vec weights;

  Vec origin;
  Vec spacing;
  std::vector<int> shape;
  std::vector<double> values;  // row-major over shape

  std::vector<GaussianComponent> components;
  int sample_count = 0;
  std::uint64_t seed = 0;
};

void validate(const MeasureSpec& spec);
Measure realize(const MeasureSpec& spec);

/// mass of the closed cell (boundary atoms count fully; slack 1e-12)
double cell_mass(const Measure& mu, const ConvexCell& cell);

/// conditional measure mu|_cell, renormalized; origin_mass scales by the
/// removed mass. Zero mass in the cell is a degenerate-restriction error.
Measure restrict(const Measure& mu, const ConvexCell& cell);

/// k-means++ style site seeding over the measure's support (deterministic
/// given rng state); duplicates fall back to jittered copies
std::vector<Vec> kmeans_pp_sites(const Measure& mu, int k, Rng& rng);

/// axis-aligned bounding box of the support
void support_box(const Measure& mu, Vec& lo, Vec& hi);

}  // namespace fairspace
