#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace lrl {

/// Shortest decimal string that round-trips the double exactly; the one
/// numeric format used in CSV output so repeated runs are byte-identical.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return {buf, ptr};
}

}  // namespace lrl
