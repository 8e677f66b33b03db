#pragma once

#include <string>

#include <json.hpp>

#include "fairspace/delta_space.hpp"
#include "fairspace/geometry.hpp"
#include "fairspace/measure.hpp"

namespace fairspace {

using Json = nlohmann::json;

/// parse with line/column in the error message
Json parse_json_text(const std::string& text);
Json parse_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

MeasureSpec measure_spec_from_json(const Json& j);
Json measure_spec_to_json(const MeasureSpec& spec);

/// spec -> realized, validated measure
Measure measure_from_json(const Json& j);
Measure load_measure(const std::string& path);

Json halfspace_to_json(const HalfSpace& h);
HalfSpace halfspace_from_json(const Json& j);
Json cell_to_json(const ConvexCell& cell);
ConvexCell cell_from_json(const Json& j);

struct PartitionFile {
  int dim = 0;
  Partition cells;
  Json provenance;
};

Json partition_to_json(const PartitionFile& pf);
PartitionFile partition_from_json(const Json& j);

Json delta_space_to_json(const DeltaSpace& space);
DeltaSpacePtr delta_space_from_json(const Json& j);

}  // namespace fairspace
