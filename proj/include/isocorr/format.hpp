#pragma once

#include <string>
#include <string_view>

namespace isocorr {

/// Shortest decimal string that round-trips to the same double ("nan",
/// "inf", "-inf" for non-finite values). Locale independent.
std::string format_double(double value);

/// Strict locale-independent parse; the whole field must be consumed.
bool parse_double(std::string_view text, double& out);

}  // namespace isocorr
