#ifndef PPPCI_MEASURE_SPEC_HPP
#define PPPCI_MEASURE_SPEC_HPP

#include "pppci/measure.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pppci {

// Builds a measure from a JSON spec. Families:
//   geometric_axis  {"axis": i} or {"direction": [..]}, "weight"
//   raw_layers      {"layers": [[{"point": [..], "weight": w}, ..], ..], "repeat": [..]}
//   kernel_product  {"blocks": {"a","b","c"}, "base", "kernel_a", "kernel_b", "axis_parts"}
//   perp_of         {"of", "blocks", "convention": "marginal" | "face_restricted"}
// Nested measures are specs or "builtin:NAME". Optional "face_classes" must
// agree with what the family generates. Throws ConfigError.
LayeredDiscreteMeasure measure_from_json(const nlohmann::json& spec);

// "builtin:NAME", inline JSON, or a path to a JSON file.
LayeredDiscreteMeasure load_measure(const std::string& ref);
nlohmann::json load_measure_spec(const std::string& ref);

std::vector<std::string> builtin_names();
// Throws ConfigError for unknown names.
nlohmann::json builtin_spec(const std::string& name);
LayeredDiscreteMeasure builtin_measure(const std::string& name);

Rational json_rational(const nlohmann::json& j);
Point json_point(const nlohmann::json& j);
nlohmann::json rational_json(const Rational& r);
nlohmann::json point_json(const Point& p);

}  // namespace pppci

#endif
