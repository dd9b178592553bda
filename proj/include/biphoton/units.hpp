#pragma once

#include <string_view>

namespace biphoton {

/// Parses an analyzer angle written as "22.5deg" or "0.3927rad"; the suffix
/// is required so degree and radian inputs cannot be confused. Returns
/// radians; throws std::invalid_argument with the accepted formats.
double parse_angle(std::string_view text);

}  // namespace biphoton
