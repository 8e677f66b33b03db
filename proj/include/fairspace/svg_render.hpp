#pragma once

#include <string>
#include <vector>

#include "fairspace/json_io.hpp"

namespace fairspace {

struct RenderOptions {
  int size = 720;       // square canvas in px
  double pad = 0.08;    // viewport margin, relative to the world span
  int max_dots = 1200;  // sample dots drawn per measure
};

/// deterministic SVG of a 2-D partition: clipped cell polygons, measure
/// sample dots, piece labels, and an assignment legend (labels[j] = piece of
/// measure j; pass empty for none). Cells invisible in the viewport are
/// listed as label-only entries.
std::string render_svg(const PartitionFile& pf, const std::vector<Measure>& measures,
                       const std::vector<int>& labels, const RenderOptions& opts = {});

}  // namespace fairspace
