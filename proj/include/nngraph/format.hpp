#pragma once

#include <string>

namespace nngraph {

/// Locale-independent shortest-roundtrip-safe rendering with 17 significant digits.
std::string format_double(double value);

}  // namespace nngraph
