// Small fixtures shared by the unit tests.
#pragma once

#include <sstream>
#include <string>

#include "rgann/data.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(RGANN_SOURCE_DIR) + "/data/" + name; }

inline rgann::Dataset load(const std::string& name) {
  return rgann::load_dataset(data_path(name + ".csv"), rgann::load_schema(data_path(name + ".schema.json")));
}

inline rgann::Dataset from_text(const std::string& schema_json, const std::string& csv) {
  std::istringstream in(csv);
  return rgann::load_dataset(in, rgann::parse_schema(schema_json));
}

// One continuous attribute x and classes A/B.
inline const char* kXSchema =
    R"({"attributes": [{"name": "x", "kind": "continuous"}], "classes": ["A", "B"]})";

}  // namespace testing
