#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace drsplit {

// shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values
std::string format_double(double v);
// accepts the output of format_double; throws DomainError otherwise
double parse_double(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace drsplit
