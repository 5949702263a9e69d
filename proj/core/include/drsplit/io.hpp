#pragma once

#include <string>
#include <string_view>

#include "drsplit/hilbert.hpp"

namespace drsplit {

// {"shape": [n], "values": [...]} for vectors,
// {"shape": [p, p], "values": [[...], ...]} (row-major) for symmetric matrices
std::string point_to_json(const Point& x);
// also accepts a bare flat array as a vector
Point point_from_json(std::string_view text);

}  // namespace drsplit
