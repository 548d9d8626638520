#include "isocorr/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace isocorr {

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) {
        return false;
    }
    // from_chars rejects a leading '+'; accept it for hand-written files.
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace isocorr
