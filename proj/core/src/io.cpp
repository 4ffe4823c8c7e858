#include "sitewatch/io.hpp"

#include "sitewatch/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <system_error>

namespace sitewatch {

namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path, "read failed");
    return data;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path, "read failed");
    return data;
}

namespace {

void write_atomic_impl(const std::string& path, const void* data, std::size_t size) {
    fs::path target(path);
    fs::path dir = target.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError(path, "cannot create parent directory: " + ec.message());
    }

    // Write to a sibling temp file, then rename into place so readers never
    // observe a half-written file.
    static std::mt19937_64 rng{std::random_device{}()};
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(rng() & 0xffffff);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp.string(), "cannot open for writing");
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError(tmp.string(), "write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IoError(path, "rename failed: " + ec.message());
    }
}

} // namespace

void write_file_atomic(const std::string& path, std::string_view text) {
    write_atomic_impl(path, text.data(), text.size());
}

void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    write_atomic_impl(path, bytes.data(), bytes.size());
}

} // namespace sitewatch
