#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sitewatch {

std::string read_text_file(const std::string& path);               // throws IoError
std::vector<std::uint8_t> read_binary_file(const std::string& path);

// Write-then-rename so readers never observe a torn file.
void write_file_atomic(const std::string& path, std::string_view content);
void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& content);

} // namespace sitewatch
