#include "sitewatch/geotiff.hpp"

#include "sitewatch/errors.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <string>

#include <zlib.h>

namespace sitewatch {

namespace {

// ---- tag and type constants -------------------------------------------

enum : std::uint16_t {
    kTagImageWidth = 256,
    kTagImageLength = 257,
    kTagBitsPerSample = 258,
    kTagCompression = 259,
    kTagPhotometric = 262,
    kTagStripOffsets = 273,
    kTagSamplesPerPixel = 277,
    kTagRowsPerStrip = 278,
    kTagStripByteCounts = 279,
    kTagPlanarConfig = 284,
    kTagTileWidth = 322,
    kTagTileLength = 323,
    kTagTileOffsets = 324,
    kTagTileByteCounts = 325,
    kTagSampleFormat = 339,
    kTagModelPixelScale = 33550,
    kTagModelTiepoint = 33922,
    kTagGeoAsciiParams = 34737,
    kTagGdalNodata = 42113,
};

enum : std::uint16_t {
    kTypeByte = 1,
    kTypeAscii = 2,
    kTypeShort = 3,
    kTypeLong = 4,
    kTypeRational = 5,
    kTypeSByte = 6,
    kTypeUndefined = 7,
    kTypeSShort = 8,
    kTypeSLong = 9,
    kTypeSRational = 10,
    kTypeFloat = 11,
    kTypeDouble = 12,
};

std::size_t type_size(std::uint16_t type) {
    switch (type) {
    case kTypeByte:
    case kTypeAscii:
    case kTypeSByte:
    case kTypeUndefined: return 1;
    case kTypeShort:
    case kTypeSShort: return 2;
    case kTypeLong:
    case kTypeSLong:
    case kTypeFloat: return 4;
    case kTypeRational:
    case kTypeSRational:
    case kTypeDouble: return 8;
    default: return 0; // unknown type: entry is skipped
    }
}

// Guard rails against allocation bombs in fuzzed inputs.
constexpr std::int64_t kMaxDimension = 1 << 20;
constexpr std::int64_t kMaxPixels = std::int64_t(1) << 24;

// ---- bounds-checked endian-aware reading ------------------------------

class Reader {
public:
    Reader(std::span<const std::uint8_t> data, bool big_endian)
        : data_(data), big_(big_endian) {}

    std::size_t size() const { return data_.size(); }

    std::uint8_t u8(std::uint64_t off) const {
        check(off, 1);
        return data_[off];
    }
    std::uint16_t u16(std::uint64_t off) const {
        check(off, 2);
        std::uint16_t a = data_[off], b = data_[off + 1];
        return big_ ? static_cast<std::uint16_t>(a << 8 | b)
                    : static_cast<std::uint16_t>(b << 8 | a);
    }
    std::uint32_t u32(std::uint64_t off) const {
        check(off, 4);
        std::uint32_t v = 0;
        if (big_)
            for (int i = 0; i < 4; ++i) v = v << 8 | data_[off + i];
        else
            for (int i = 3; i >= 0; --i) v = v << 8 | data_[off + i];
        return v;
    }
    std::uint64_t u64(std::uint64_t off) const {
        check(off, 8);
        std::uint64_t v = 0;
        if (big_)
            for (int i = 0; i < 8; ++i) v = v << 8 | data_[off + i];
        else
            for (int i = 7; i >= 0; --i) v = v << 8 | data_[off + i];
        return v;
    }
    float f32(std::uint64_t off) const { return std::bit_cast<float>(u32(off)); }
    double f64(std::uint64_t off) const { return std::bit_cast<double>(u64(off)); }

    void check(std::uint64_t off, std::uint64_t len) const {
        if (off > data_.size() || len > data_.size() - off)
            throw MalformedFile("read past end of file (offset " + std::to_string(off) + ")");
    }

private:
    std::span<const std::uint8_t> data_;
    bool big_;
};

struct IfdEntry {
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::uint64_t value_offset = 0; // absolute offset of the value bytes
};

// Where an entry's value bytes live: inline in the 4-byte field when they
// fit, otherwise at the offset stored there.
IfdEntry read_entry(const Reader& r, std::uint64_t entry_off) {
    IfdEntry e;
    e.type = r.u16(entry_off + 2);
    e.count = r.u32(entry_off + 4);
    std::uint64_t total = std::uint64_t(e.count) * type_size(e.type);
    if (total <= 4) {
        e.value_offset = entry_off + 8;
    } else {
        e.value_offset = r.u32(entry_off + 8);
        r.check(e.value_offset, total);
    }
    return e;
}

std::uint64_t entry_uint(const Reader& r, const IfdEntry& e, std::uint32_t index) {
    if (index >= e.count) throw MalformedFile("value index out of range");
    std::uint64_t off = e.value_offset + std::uint64_t(index) * type_size(e.type);
    switch (e.type) {
    case kTypeByte: return r.u8(off);
    case kTypeShort: return r.u16(off);
    case kTypeLong: return r.u32(off);
    default: throw MalformedFile("unexpected value type " + std::to_string(e.type));
    }
}

double entry_double(const Reader& r, const IfdEntry& e, std::uint32_t index) {
    if (index >= e.count) throw MalformedFile("value index out of range");
    std::uint64_t off = e.value_offset + std::uint64_t(index) * type_size(e.type);
    switch (e.type) {
    case kTypeByte: return r.u8(off);
    case kTypeShort: return r.u16(off);
    case kTypeLong: return r.u32(off);
    case kTypeFloat: return r.f32(off);
    case kTypeDouble: return r.f64(off);
    case kTypeRational: {
        std::uint32_t num = r.u32(off), den = r.u32(off + 4);
        if (den == 0) throw MalformedFile("rational with zero denominator");
        return double(num) / double(den);
    }
    default: throw MalformedFile("unexpected value type " + std::to_string(e.type));
    }
}

std::string entry_ascii(const Reader& r, const IfdEntry& e) {
    if (e.type != kTypeAscii && e.type != kTypeByte && e.type != kTypeUndefined)
        throw MalformedFile("unexpected value type " + std::to_string(e.type));
    std::string s;
    s.reserve(e.count);
    for (std::uint32_t i = 0; i < e.count; ++i)
        s.push_back(static_cast<char>(r.u8(e.value_offset + i)));
    while (!s.empty() && s.back() == '\0') s.pop_back();
    return s;
}

std::vector<std::uint8_t> inflate_chunk(const Reader& r, std::uint64_t off, std::uint64_t len,
                                        std::uint64_t expected) {
    r.check(off, len);
    std::vector<std::uint8_t> out(expected);
    uLongf dest_len = static_cast<uLongf>(expected);
    std::vector<std::uint8_t> src(len);
    for (std::uint64_t i = 0; i < len; ++i) src[i] = r.u8(off + i);
    int rc = uncompress(out.data(), &dest_len, src.data(), static_cast<uLong>(len));
    if (rc != Z_OK || dest_len != expected)
        throw MalformedFile("DEFLATE stream did not decode to the expected size");
    return out;
}

enum class PixelFormat { u8, u16, i16, f32 };

std::size_t bytes_per_sample(PixelFormat f) {
    return f == PixelFormat::u8 ? 1 : f == PixelFormat::f32 ? 4 : 2;
}

double decode_sample(std::span<const std::uint8_t> chunk, std::uint64_t index, PixelFormat f,
                     bool big) {
    const std::uint8_t* p = chunk.data() + index * bytes_per_sample(f);
    auto rd16 = [&]() -> std::uint16_t {
        return big ? static_cast<std::uint16_t>(p[0] << 8 | p[1])
                   : static_cast<std::uint16_t>(p[1] << 8 | p[0]);
    };
    auto rd32 = [&]() -> std::uint32_t {
        std::uint32_t v = 0;
        if (big)
            for (int i = 0; i < 4; ++i) v = v << 8 | p[i];
        else
            for (int i = 3; i >= 0; --i) v = v << 8 | p[i];
        return v;
    };
    switch (f) {
    case PixelFormat::u8: return *p;
    case PixelFormat::u16: return rd16();
    case PixelFormat::i16: return static_cast<std::int16_t>(rd16());
    case PixelFormat::f32: return std::bit_cast<float>(rd32());
    }
    return 0;
}

} // namespace

RasterGrid parse_geotiff(std::span<const std::uint8_t> bytes, const GeoTiffParseOptions& opts) {
    if (bytes.size() < 8) throw MalformedFile("shorter than a TIFF header");
    bool big;
    if (bytes[0] == 'I' && bytes[1] == 'I') big = false;
    else if (bytes[0] == 'M' && bytes[1] == 'M') big = true;
    else throw MalformedFile("bad byte-order mark");

    Reader r(bytes, big);
    std::uint16_t magic = r.u16(2);
    if (magic == 43) throw UnsupportedFeature("BigTIFF", 43);
    if (magic != 42) throw MalformedFile("bad magic number " + std::to_string(magic));

    std::uint64_t ifd_off = r.u32(4);
    if (ifd_off < 8) throw MalformedFile("IFD offset inside header");
    std::uint16_t n_entries = r.u16(ifd_off);
    if (n_entries == 0) throw MalformedFile("empty IFD");
    r.check(ifd_off + 2, std::uint64_t(n_entries) * 12 + 4);

    std::map<std::uint16_t, IfdEntry> entries;
    for (std::uint16_t i = 0; i < n_entries; ++i) {
        std::uint64_t off = ifd_off + 2 + std::uint64_t(i) * 12;
        std::uint16_t tag = r.u16(off);
        IfdEntry e;
        e.type = r.u16(off + 2);
        if (type_size(e.type) == 0) continue; // unknown value type: skip the field
        e = read_entry(r, off);
        entries[tag] = e;
    }

    auto find = [&](std::uint16_t tag) -> const IfdEntry* {
        auto it = entries.find(tag);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto require = [&](std::uint16_t tag, const char* name) -> const IfdEntry& {
        const IfdEntry* e = find(tag);
        if (!e) throw MalformedFile(std::string("missing required tag ") + name);
        return *e;
    };

    // Geometry and sample description.
    std::int64_t width = static_cast<std::int64_t>(entry_uint(r, require(kTagImageWidth, "ImageWidth"), 0));
    std::int64_t height = static_cast<std::int64_t>(entry_uint(r, require(kTagImageLength, "ImageLength"), 0));
    if (width <= 0 || height <= 0) throw MalformedFile("nonpositive image dimensions");
    if (width > kMaxDimension || height > kMaxDimension || width * height > kMaxPixels)
        throw MalformedFile("image dimensions exceed supported limits");

    if (const IfdEntry* spp = find(kTagSamplesPerPixel)) {
        if (entry_uint(r, *spp, 0) != 1)
            throw UnsupportedFeature("multi-sample pixels", kTagSamplesPerPixel);
    }
    if (const IfdEntry* pc = find(kTagPlanarConfig)) {
        if (entry_uint(r, *pc, 0) != 1)
            throw UnsupportedFeature("planar configuration", kTagPlanarConfig);
    }

    std::uint64_t bits = 8;
    if (const IfdEntry* bps = find(kTagBitsPerSample)) bits = entry_uint(r, *bps, 0);
    std::uint64_t fmt = 1;
    if (const IfdEntry* sf = find(kTagSampleFormat)) fmt = entry_uint(r, *sf, 0);

    PixelFormat pixel_format;
    if (bits == 8 && fmt == 1) pixel_format = PixelFormat::u8;
    else if (bits == 16 && fmt == 1) pixel_format = PixelFormat::u16;
    else if (bits == 16 && fmt == 2) pixel_format = PixelFormat::i16;
    else if (bits == 32 && fmt == 3) pixel_format = PixelFormat::f32;
    else
        throw UnsupportedFeature("sample type (" + std::to_string(bits) + "-bit, format " +
                                     std::to_string(fmt) + ")",
                                 fmt == 1 ? kTagBitsPerSample : kTagSampleFormat);
    std::size_t bps_bytes = bytes_per_sample(pixel_format);

    bool deflate = false;
    if (const IfdEntry* comp = find(kTagCompression)) {
        std::uint64_t code = entry_uint(r, *comp, 0);
        if (code == 8 || code == 32946) deflate = true;
        else if (code != 1)
            throw UnsupportedFeature("compression code " + std::to_string(code), kTagCompression);
    }

    // Georeferencing.
    const IfdEntry* scale_e = find(kTagModelPixelScale);
    const IfdEntry* tie_e = find(kTagModelTiepoint);
    if (!scale_e || !tie_e) throw MissingGeoreference();
    if (scale_e->count < 2 || tie_e->count < 6)
        throw MalformedFile("georeference tags too short");
    double sx = entry_double(r, *scale_e, 0);
    double sy = entry_double(r, *scale_e, 1);
    double tie_i = entry_double(r, *tie_e, 0);
    double tie_j = entry_double(r, *tie_e, 1);
    double tie_x = entry_double(r, *tie_e, 3);
    double tie_y = entry_double(r, *tie_e, 4);
    if (!(sx > 0) || !(sy > 0)) throw MalformedFile("nonpositive pixel scale");

    RasterGrid grid;
    grid.width = static_cast<int>(width);
    grid.height = static_cast<int>(height);
    grid.pixel_scale_x = sx;
    grid.pixel_scale_y = sy;
    // The tiepoint maps raster position (i,j) to map position (x,y); shift
    // back to the upper-left corner of pixel (0,0).
    grid.origin_x = tie_x - tie_i * sx;
    grid.origin_y = tie_y + tie_j * sy;
    grid.values.assign(static_cast<std::size_t>(width * height), 0.0);

    if (const IfdEntry* crs = find(kTagGeoAsciiParams)) grid.crs_tag = entry_ascii(r, *crs);
    if (const IfdEntry* nd = find(kTagGdalNodata)) {
        std::string s = entry_ascii(r, *nd);
        const char* begin = s.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end != begin) grid.nodata = v;
    }

    // Pixel data: strips or tiles, exactly one of the two tag families.
    const IfdEntry* strip_off = find(kTagStripOffsets);
    const IfdEntry* tile_off = find(kTagTileOffsets);
    if (strip_off && tile_off) throw MalformedFile("both strip and tile offsets present");

    auto read_chunk = [&](std::uint64_t off, std::uint64_t len,
                          std::uint64_t expected) -> std::vector<std::uint8_t> {
        if (deflate) return inflate_chunk(r, off, len, expected);
        if (len != expected)
            throw MalformedFile("chunk byte count does not match its pixel count");
        r.check(off, len);
        return std::vector<std::uint8_t>(bytes.begin() + off, bytes.begin() + off + len);
    };

    if (strip_off) {
        const IfdEntry& counts = require(kTagStripByteCounts, "StripByteCounts");
        std::uint64_t rps = static_cast<std::uint64_t>(height);
        if (const IfdEntry* rps_e = find(kTagRowsPerStrip)) {
            rps = entry_uint(r, *rps_e, 0);
            if (rps == 0) throw MalformedFile("zero RowsPerStrip");
            rps = std::min(rps, static_cast<std::uint64_t>(height));
        }
        std::uint64_t n_strips = (static_cast<std::uint64_t>(height) + rps - 1) / rps;
        if (strip_off->count != n_strips || counts.count != n_strips)
            throw MalformedFile("strip offset/count arrays do not match strip count");
        for (std::uint64_t s = 0; s < n_strips; ++s) {
            std::uint64_t row0 = s * rps;
            std::uint64_t rows = std::min(rps, static_cast<std::uint64_t>(height) - row0);
            std::uint64_t expected = rows * static_cast<std::uint64_t>(width) * bps_bytes;
            auto chunk = read_chunk(entry_uint(r, *strip_off, static_cast<std::uint32_t>(s)),
                                    entry_uint(r, counts, static_cast<std::uint32_t>(s)), expected);
            for (std::uint64_t i = 0; i < rows * static_cast<std::uint64_t>(width); ++i)
                grid.values[row0 * width + i] = decode_sample(chunk, i, pixel_format, big);
        }
    } else if (tile_off) {
        const IfdEntry& counts = require(kTagTileByteCounts, "TileByteCounts");
        std::uint64_t tw = entry_uint(r, require(kTagTileWidth, "TileWidth"), 0);
        std::uint64_t th = entry_uint(r, require(kTagTileLength, "TileLength"), 0);
        if (tw == 0 || th == 0) throw MalformedFile("zero tile dimensions");
        if (std::int64_t(tw) > kMaxDimension || std::int64_t(th) > kMaxDimension)
            throw MalformedFile("tile dimensions exceed supported limits");
        std::uint64_t across = (static_cast<std::uint64_t>(width) + tw - 1) / tw;
        std::uint64_t down = (static_cast<std::uint64_t>(height) + th - 1) / th;
        if (tile_off->count != across * down || counts.count != across * down)
            throw MalformedFile("tile offset/count arrays do not match tile count");
        std::uint64_t expected = tw * th * bps_bytes;
        for (std::uint64_t ty = 0; ty < down; ++ty) {
            for (std::uint64_t tx = 0; tx < across; ++tx) {
                std::uint32_t ti = static_cast<std::uint32_t>(ty * across + tx);
                auto chunk = read_chunk(entry_uint(r, *tile_off, ti),
                                        entry_uint(r, counts, ti), expected);
                for (std::uint64_t rr = 0; rr < th; ++rr) {
                    std::uint64_t row = ty * th + rr;
                    if (row >= static_cast<std::uint64_t>(height)) break;
                    for (std::uint64_t cc = 0; cc < tw; ++cc) {
                        std::uint64_t col = tx * tw + cc;
                        if (col >= static_cast<std::uint64_t>(width)) break;
                        grid.values[row * width + col] =
                            decode_sample(chunk, rr * tw + cc, pixel_format, big);
                    }
                }
            }
        }
    } else {
        throw MalformedFile("no strip or tile offsets");
    }

    if (opts.apply_scale) {
        for (double& v : grid.values) {
            if (!grid.is_nodata(v)) v = v * opts.scale + opts.offset;
        }
    }
    // A successful parse must hand back a coherent grid (e.g. a float file
    // carrying infinities with no matching nodata sentinel is rejected).
    try {
        grid.validate();
    } catch (const ValidationError& e) {
        throw MalformedFile(std::string("decoded grid violates invariants: ") + e.what());
    }
    return grid;
}

// ---- writer ------------------------------------------------------------

namespace {

class Writer {
public:
    explicit Writer(bool big) : big_(big) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        if (big_) { out_.push_back(v >> 8); out_.push_back(v & 0xff); }
        else { out_.push_back(v & 0xff); out_.push_back(v >> 8); }
    }
    void u32(std::uint32_t v) {
        if (big_)
            for (int i = 3; i >= 0; --i) out_.push_back((v >> (8 * i)) & 0xff);
        else
            for (int i = 0; i < 4; ++i) out_.push_back((v >> (8 * i)) & 0xff);
    }
    void u64(std::uint64_t v) {
        if (big_)
            for (int i = 7; i >= 0; --i) out_.push_back((v >> (8 * i)) & 0xff);
        else
            for (int i = 0; i < 8; ++i) out_.push_back((v >> (8 * i)) & 0xff);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void raw(const std::vector<std::uint8_t>& b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void pad_to_even() { if (out_.size() % 2) out_.push_back(0); }

    std::size_t size() const { return out_.size(); }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
    bool big_;
};

struct WriteEntry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::vector<std::uint8_t> payload; // already in target byte order
};

// Shortest round-trippable decimal text for the GDAL nodata tag.
std::string nodata_text(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<std::uint8_t> deflate_chunk(const std::vector<std::uint8_t>& src) {
    uLongf bound = compressBound(static_cast<uLong>(src.size()));
    std::vector<std::uint8_t> dst(bound);
    int rc = compress2(dst.data(), &bound, src.data(), static_cast<uLong>(src.size()),
                       Z_DEFAULT_COMPRESSION);
    if (rc != Z_OK) throw Error("zlib compression failed");
    dst.resize(bound);
    return dst;
}

} // namespace

std::vector<std::uint8_t> write_geotiff(const RasterGrid& grid, const GeoTiffWriteOptions& opts) {
    grid.validate();
    bool big = opts.byte_order == TiffByteOrder::big;

    std::uint16_t bits;
    std::uint16_t fmt;
    switch (opts.sample_format) {
    case SampleFormat::uint8: bits = 8; fmt = 1; break;
    case SampleFormat::uint16: bits = 16; fmt = 1; break;
    case SampleFormat::int16: bits = 16; fmt = 2; break;
    case SampleFormat::float32: bits = 32; fmt = 3; break;
    default: throw ValidationError("unknown sample format");
    }
    auto check_representable = [&](double v, const char* what) {
        if (opts.sample_format == SampleFormat::float32) return;
        double lo, hi;
        switch (opts.sample_format) {
        case SampleFormat::uint8: lo = 0; hi = 255; break;
        case SampleFormat::uint16: lo = 0; hi = 65535; break;
        default: lo = -32768; hi = 32767; break;
        }
        if (!std::isfinite(v) || std::floor(v) != v || v < lo || v > hi)
            throw ValidationError(std::string(what) + " " + std::to_string(v) +
                                  " is not representable in the requested integer format");
    };
    for (double v : grid.values) check_representable(v, "value");
    if (grid.nodata) check_representable(*grid.nodata, "nodata");

    auto encode_samples = [&](std::int64_t row0, std::int64_t col0, std::int64_t rows,
                              std::int64_t cols, std::int64_t stride_cols) {
        // Encodes a rows×stride_cols block starting at (row0,col0); positions
        // outside the grid (tile padding) encode as zero samples.
        Writer w(big);
        for (std::int64_t rr = 0; rr < rows; ++rr) {
            for (std::int64_t cc = 0; cc < stride_cols; ++cc) {
                double v = 0.0;
                std::int64_t row = row0 + rr, col = col0 + cc;
                if (row < grid.height && col < grid.width && cc < cols)
                    v = grid.at(static_cast<int>(row), static_cast<int>(col));
                switch (opts.sample_format) {
                case SampleFormat::uint8: w.u8(static_cast<std::uint8_t>(v)); break;
                case SampleFormat::uint16: w.u16(static_cast<std::uint16_t>(v)); break;
                case SampleFormat::int16:
                    w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
                    break;
                case SampleFormat::float32: w.f32(static_cast<float>(v)); break;
                }
            }
        }
        return w.take();
    };

    // Assemble the pixel chunks.
    std::vector<std::vector<std::uint8_t>> chunks;
    std::uint32_t rows_per_strip = 0;
    std::uint32_t tile_w = 0, tile_h = 0;
    if (opts.layout == TiffLayout::strips) {
        rows_per_strip = opts.rows_per_strip > 0 ? static_cast<std::uint32_t>(opts.rows_per_strip)
                                                 : 64u;
        rows_per_strip = std::min<std::uint32_t>(rows_per_strip,
                                                 static_cast<std::uint32_t>(grid.height));
        for (std::int64_t row0 = 0; row0 < grid.height; row0 += rows_per_strip) {
            std::int64_t rows = std::min<std::int64_t>(rows_per_strip, grid.height - row0);
            chunks.push_back(encode_samples(row0, 0, rows, grid.width, grid.width));
        }
    } else {
        if (opts.tile_width <= 0 || opts.tile_height <= 0 || opts.tile_width % 16 ||
            opts.tile_height % 16)
            throw ValidationError("tile dimensions must be positive multiples of 16");
        tile_w = static_cast<std::uint32_t>(opts.tile_width);
        tile_h = static_cast<std::uint32_t>(opts.tile_height);
        for (std::int64_t row0 = 0; row0 < grid.height; row0 += tile_h)
            for (std::int64_t col0 = 0; col0 < grid.width; col0 += tile_w)
                chunks.push_back(encode_samples(row0, col0, tile_h,
                                                std::min<std::int64_t>(tile_w, grid.width - col0),
                                                tile_w));
    }
    if (opts.compression == TiffCompression::deflate)
        for (auto& c : chunks) c = deflate_chunk(c);

    // IFD entry payloads (everything except the chunk offsets, which depend
    // on the final layout and are filled in below).
    auto u16_payload = [&](std::uint16_t v) {
        Writer w(big);
        w.u16(v);
        return w.take();
    };
    auto u32_payload = [&](std::uint32_t v) {
        Writer w(big);
        w.u32(v);
        return w.take();
    };
    auto ascii_payload = [&](const std::string& s) {
        std::vector<std::uint8_t> b(s.begin(), s.end());
        b.push_back(0);
        return b;
    };

    std::vector<WriteEntry> ifd;
    auto add = [&](std::uint16_t tag, std::uint16_t type, std::uint32_t count,
                   std::vector<std::uint8_t> payload) {
        ifd.push_back({tag, type, count, std::move(payload)});
    };

    add(kTagImageWidth, kTypeLong, 1, u32_payload(static_cast<std::uint32_t>(grid.width)));
    add(kTagImageLength, kTypeLong, 1, u32_payload(static_cast<std::uint32_t>(grid.height)));
    add(kTagBitsPerSample, kTypeShort, 1, u16_payload(bits));
    add(kTagCompression, kTypeShort, 1,
        u16_payload(opts.compression == TiffCompression::deflate ? 8 : 1));
    add(kTagPhotometric, kTypeShort, 1, u16_payload(1)); // BlackIsZero

    std::uint32_t n_chunks = static_cast<std::uint32_t>(chunks.size());
    std::size_t offsets_index, counts_index;
    if (opts.layout == TiffLayout::strips) {
        add(kTagStripOffsets, kTypeLong, n_chunks, {});
        offsets_index = ifd.size() - 1;
        add(kTagSamplesPerPixel, kTypeShort, 1, u16_payload(1));
        add(kTagRowsPerStrip, kTypeLong, 1, u32_payload(rows_per_strip));
        add(kTagStripByteCounts, kTypeLong, n_chunks, {});
        counts_index = ifd.size() - 1;
    } else {
        add(kTagSamplesPerPixel, kTypeShort, 1, u16_payload(1));
        add(kTagTileWidth, kTypeLong, 1, u32_payload(tile_w));
        add(kTagTileLength, kTypeLong, 1, u32_payload(tile_h));
        add(kTagTileOffsets, kTypeLong, n_chunks, {});
        offsets_index = ifd.size() - 1;
        add(kTagTileByteCounts, kTypeLong, n_chunks, {});
        counts_index = ifd.size() - 1;
    }
    add(kTagSampleFormat, kTypeShort, 1, u16_payload(fmt));
    {
        Writer w(big);
        w.f64(grid.pixel_scale_x);
        w.f64(grid.pixel_scale_y);
        w.f64(0.0);
        add(kTagModelPixelScale, kTypeDouble, 3, w.take());
    }
    {
        Writer w(big);
        w.f64(0.0); w.f64(0.0); w.f64(0.0);
        w.f64(grid.origin_x); w.f64(grid.origin_y); w.f64(0.0);
        add(kTagModelTiepoint, kTypeDouble, 6, w.take());
    }
    if (!grid.crs_tag.empty()) {
        auto p = ascii_payload(grid.crs_tag);
        auto n = static_cast<std::uint32_t>(p.size());
        add(kTagGeoAsciiParams, kTypeAscii, n, std::move(p));
    }
    if (grid.nodata) {
        auto p = ascii_payload(nodata_text(*grid.nodata));
        auto n = static_cast<std::uint32_t>(p.size());
        add(kTagGdalNodata, kTypeAscii, n, std::move(p));
    }

    // Layout: header, IFD, out-of-line entry values, then pixel chunks.
    std::size_t ifd_bytes = 2 + ifd.size() * 12 + 4;
    std::size_t cursor = 8 + ifd_bytes;
    auto payload_bytes = [&](const WriteEntry& e) {
        return e.tag == ifd[offsets_index].tag || e.tag == ifd[counts_index].tag
                   ? std::size_t(4) * e.count
                   : e.payload.size();
    };
    std::vector<std::uint32_t> value_offsets(ifd.size(), 0);
    for (std::size_t i = 0; i < ifd.size(); ++i) {
        std::size_t sz = payload_bytes(ifd[i]);
        if (sz > 4) {
            if (cursor % 2) ++cursor;
            value_offsets[i] = static_cast<std::uint32_t>(cursor);
            cursor += sz;
        }
    }
    std::vector<std::uint32_t> chunk_offsets(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (cursor % 2) ++cursor;
        chunk_offsets[i] = static_cast<std::uint32_t>(cursor);
        cursor += chunks[i].size();
    }

    {
        Writer w(big);
        for (std::size_t i = 0; i < chunks.size(); ++i) w.u32(chunk_offsets[i]);
        ifd[offsets_index].payload = w.take();
    }
    {
        Writer w(big);
        for (std::size_t i = 0; i < chunks.size(); ++i)
            w.u32(static_cast<std::uint32_t>(chunks[i].size()));
        ifd[counts_index].payload = w.take();
    }

    Writer w(big);
    w.u8(big ? 'M' : 'I');
    w.u8(big ? 'M' : 'I');
    w.u16(42);
    w.u32(8);
    w.u16(static_cast<std::uint16_t>(ifd.size()));
    for (std::size_t i = 0; i < ifd.size(); ++i) {
        const WriteEntry& e = ifd[i];
        w.u16(e.tag);
        w.u16(e.type);
        w.u32(e.count);
        if (e.payload.size() <= 4) {
            std::size_t before = w.size();
            w.raw(e.payload);
            while (w.size() < before + 4) w.u8(0);
        } else {
            w.u32(value_offsets[i]);
        }
    }
    w.u32(0); // no further IFDs
    for (std::size_t i = 0; i < ifd.size(); ++i) {
        if (ifd[i].payload.size() > 4) {
            w.pad_to_even();
            assert(w.size() == value_offsets[i]);
            w.raw(ifd[i].payload);
        }
    }
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        w.pad_to_even();
        assert(w.size() == chunk_offsets[i]);
        w.raw(chunks[i]);
    }
    return w.take();
}

} // namespace sitewatch
