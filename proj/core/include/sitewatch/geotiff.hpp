#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sitewatch/raster.hpp"

namespace sitewatch {

// Classic (non-Big) TIFF, single band, strip or tile layout, compression
// none or DEFLATE. Georeferencing via ModelPixelScale (33550) and one
// ModelTiepoint (33922); nodata via the GDAL-convention ASCII tag 42113;
// the CRS rides as the opaque ASCII payload of tag 34737. GeoKey
// directories are neither read nor written.

enum class SampleFormat : std::uint8_t { uint8, uint16, int16, float32 };
enum class TiffLayout : std::uint8_t { strips, tiles };
enum class TiffCompression : std::uint8_t { none, deflate };
enum class TiffByteOrder : std::uint8_t { little, big };

struct GeoTiffWriteOptions {
    SampleFormat sample_format = SampleFormat::float32;
    TiffLayout layout = TiffLayout::strips;
    TiffCompression compression = TiffCompression::none;
    TiffByteOrder byte_order = TiffByteOrder::little;
    int rows_per_strip = 0; // 0 = choose (64 rows, clamped to height)
    int tile_width = 64;    // multiples of 16
    int tile_height = 64;
};

struct GeoTiffParseOptions {
    // When set, non-nodata samples are mapped sample*scale + offset.
    // Off by default: values reproduce the file's samples exactly.
    bool apply_scale = false;
    double scale = 1.0;
    double offset = 0.0;
};

// Throws UnsupportedFeature, MalformedFile, or MissingGeoreference. Never
// reads past the input; a failed parse never yields a partial grid.
RasterGrid parse_geotiff(std::span<const std::uint8_t> bytes,
                         const GeoTiffParseOptions& opts = {});

// Deterministic bytes for identical input. Integer sample formats require
// exactly representable values (typed error otherwise); float32 stores
// static_cast<float>(value).
std::vector<std::uint8_t> write_geotiff(const RasterGrid& grid,
                                        const GeoTiffWriteOptions& opts = {});

} // namespace sitewatch
