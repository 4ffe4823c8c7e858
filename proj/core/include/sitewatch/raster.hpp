#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sitewatch {

enum class BandKind {
    reflectance, // dimensionless, typically 0..1
    radiance,    // nW/cm2/sr for nighttime lights
    index,       // dimensionless spectral index
    qa_bits,     // unsigned integer bit payload
    other,
};

const char* to_string(BandKind k);

// One georeferenced band at one timestamp. Values are row-major doubles;
// integer products are widened on ingest. The origin is the map position of
// the upper-left corner of pixel (0,0); y decreases down rows (north-up).
struct RasterGrid {
    int width = 0;
    int height = 0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_scale_x = 1.0; // map units per pixel, > 0
    double pixel_scale_y = 1.0;
    std::string crs_tag;        // opaque, e.g. "EPSG:4326"
    std::vector<double> values; // width*height entries
    std::optional<double> nodata;
    BandKind band_kind = BandKind::other;
    double timestamp = 0.0;     // days since the series epoch; not stored in files

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    double& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }

    bool is_nodata(double v) const;

    // Map coordinates of a pixel's center.
    double pixel_center_x(int col) const { return origin_x + (col + 0.5) * pixel_scale_x; }
    double pixel_center_y(int row) const { return origin_y - (row + 0.5) * pixel_scale_y; }

    bool same_shape(const RasterGrid& other) const; // dimensions + geotransform + crs

    // Throws ValidationError if an invariant is broken (size mismatch,
    // nonpositive pixel scale, non-finite non-nodata value).
    void validate() const;
};

// Field-for-field equality; values and nodata compared bit-exactly.
bool operator==(const RasterGrid& a, const RasterGrid& b);

// Named QA bit layout. A pixel is unusable iff any reject flag's bit is set.
struct QaBitSpec {
    std::vector<std::pair<std::string, int>> named_flags; // (name, bit position 0..15)
    std::vector<std::string> reject_flags;                // subset of flag names

    // Throws ValidationError on duplicate/out-of-range bits or unknown reject names.
    void validate() const;
    std::uint16_t reject_mask() const;

    // Landsat Collection-2 QA_PIXEL convention: dilated-cloud@1, cloud@3,
    // cloud-shadow@4, snow@5 all rejected.
    static QaBitSpec landsat_c2_default();
};

// True iff no reject flag's bit is set in the pixel word.
bool decode_qa(std::uint16_t pixel, const QaBitSpec& spec);

} // namespace sitewatch
