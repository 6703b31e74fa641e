#pragma once

#include <string>

namespace badmm {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

double parse_double(const std::string& s);

}  // namespace badmm
