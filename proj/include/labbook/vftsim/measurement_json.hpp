#pragma once

#include <vector>

#include "labbook/canonical_json.hpp"
#include "labbook/vftsim/geometry.hpp"

// JSON codecs for measurements and camera poses. Decoders throw
// Error(invalid_input) on missing fields, wrong types or non-finite numbers.
namespace labbook::vftsim {

Json point_to_json(const Point3& p);
Point3 point_from_json(const Json& j);

// Shape fields plus "kind"; no id.
Json shape_to_json(const MeasurementShape& shape);
// Takes stored derived values (length, angles) verbatim.
MeasurementShape shape_from_json(const Json& j);

Json measurement_to_json(const Measurement& m);
Measurement measurement_from_json(const Json& j);

Json measurements_to_json(const std::vector<Measurement>& list);
// Also rejects duplicate ids.
std::vector<Measurement> measurements_from_json(const Json& j);

Json camera_to_json(const CameraPose& pose);
CameraPose camera_from_json(const Json& j);

} // namespace labbook::vftsim
