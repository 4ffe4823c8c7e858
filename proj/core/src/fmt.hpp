#pragma once

// Internal numeric formatting helpers shared by the CSV and JSON writers.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace sitewatch::detail {

// Shortest decimal text that parses back to exactly the same double.
inline std::string to_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

// Round to at most 9 significant decimal digits. Applying it twice is a
// no-op, which makes serialize(parse(serialize(x))) a fixpoint.
inline double quantize9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

} // namespace sitewatch::detail
