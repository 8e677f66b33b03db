#pragma once

#include <cstdint>
#include <vector>

#include "fairspace/common.hpp"

namespace fairspace {

/// Point of the standard simplex: coords >= 0, sum = 1 (tolerance 1e-12 at
/// construction; tiny negatives are clamped and the sum renormalized so
/// downstream code can rely on exact invariants).
struct SimplexPoint {
  Vec coords;
  int n() const { return static_cast<int>(coords.size()); }
};

SimplexPoint simplex_point(Vec coords, double tol = 1e-12);

/// Euclidean projection of an arbitrary vector onto the standard simplex.
Vec project_to_simplex(Vec v);

/// chart: drop the last coordinate / re-append 1 - sum and project
Vec simplex_to_chart(const Vec& x);
SimplexPoint chart_to_simplex(const Vec& u);

/// all points {k/resolution} of the simplex, lexicographic order;
/// guarded against blowup (count must stay <= 2e6)
std::vector<SimplexPoint> simplex_grid(int n, int resolution);

/// low-discrepancy sequence on the simplex (Kronecker sequence per
/// coordinate, sorted-gaps map); salt shifts the whole sequence
SimplexPoint lds_simplex_point(int index, int n, std::uint64_t salt);

}  // namespace fairspace
