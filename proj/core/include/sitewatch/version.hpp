#pragma once

namespace sitewatch {

inline constexpr const char* kVersion = "0.1.0";

} // namespace sitewatch
