#include "sitewatch/raster.hpp"

#include "sitewatch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sitewatch {

const char* to_string(BandKind k) {
    switch (k) {
    case BandKind::reflectance: return "reflectance";
    case BandKind::radiance: return "radiance";
    case BandKind::index: return "index";
    case BandKind::qa_bits: return "qa_bits";
    case BandKind::other: return "other";
    }
    return "other";
}

bool RasterGrid::is_nodata(double v) const {
    if (std::isnan(v)) return true;
    if (!nodata) return false;
    if (std::isnan(*nodata)) return false; // NaN sentinel already caught above
    return v == *nodata;
}

bool RasterGrid::same_shape(const RasterGrid& other) const {
    return width == other.width && height == other.height && origin_x == other.origin_x &&
           origin_y == other.origin_y && pixel_scale_x == other.pixel_scale_x &&
           pixel_scale_y == other.pixel_scale_y && crs_tag == other.crs_tag;
}

void RasterGrid::validate() const {
    if (width <= 0 || height <= 0)
        throw ValidationError("raster dimensions must be positive");
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw ValidationError("raster value count does not match width*height");
    if (!(pixel_scale_x > 0) || !(pixel_scale_y > 0))
        throw ValidationError("pixel scale must be positive");
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
        throw ValidationError("raster origin must be finite");
    for (double v : values) {
        if (!std::isfinite(v) && !is_nodata(v))
            throw ValidationError("raster contains a non-finite value that is not nodata");
    }
}

bool operator==(const RasterGrid& a, const RasterGrid& b) {
    if (!a.same_shape(b)) return false;
    if (a.nodata.has_value() != b.nodata.has_value()) return false;
    if (a.nodata) {
        bool both_nan = std::isnan(*a.nodata) && std::isnan(*b.nodata);
        if (!both_nan && *a.nodata != *b.nodata) return false;
    }
    if (a.band_kind != b.band_kind || a.timestamp != b.timestamp) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        double va = a.values[i], vb = b.values[i];
        if (va == vb) continue;
        if (std::isnan(va) && std::isnan(vb)) continue;
        return false;
    }
    return true;
}

void QaBitSpec::validate() const {
    for (std::size_t i = 0; i < named_flags.size(); ++i) {
        const auto& [name, bit] = named_flags[i];
        if (name.empty()) throw ValidationError("QA flag name must be non-empty");
        if (bit < 0 || bit > 15)
            throw ValidationError("QA bit index out of range for flag '" + name + "'");
        for (std::size_t j = i + 1; j < named_flags.size(); ++j) {
            if (named_flags[j].first == name)
                throw ValidationError("duplicate QA flag name '" + name + "'");
            if (named_flags[j].second == bit)
                throw ValidationError("duplicate QA bit position for flag '" + name + "'");
        }
    }
    for (const auto& flag : reject_flags) {
        auto hit = std::find_if(named_flags.begin(), named_flags.end(),
                                [&](const auto& nf) { return nf.first == flag; });
        if (hit == named_flags.end())
            throw ValidationError("QA reject flag '" + flag + "' is not a named flag");
    }
}

std::uint16_t QaBitSpec::reject_mask() const {
    std::uint16_t mask = 0;
    for (const auto& flag : reject_flags) {
        for (const auto& [name, bit] : named_flags) {
            if (name == flag) {
                mask = static_cast<std::uint16_t>(mask | (1u << bit));
                break;
            }
        }
    }
    return mask;
}

QaBitSpec QaBitSpec::landsat_c2_default() {
    QaBitSpec spec;
    spec.named_flags = {
        {"fill", 0},  {"dilated_cloud", 1}, {"cirrus", 2},       {"cloud", 3},
        {"cloud_shadow", 4}, {"snow", 5},   {"clear", 6},        {"water", 7},
    };
    spec.reject_flags = {"dilated_cloud", "cloud", "cloud_shadow", "snow"};
    return spec;
}

bool decode_qa(std::uint16_t pixel, const QaBitSpec& spec) {
    return (pixel & spec.reject_mask()) == 0;
}

} // namespace sitewatch
