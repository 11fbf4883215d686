#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace klab {

/// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_double(double v);

/// Locale-independent parse of a complete decimal token.
std::optional<double> parse_double(std::string_view token);

}  // namespace klab
