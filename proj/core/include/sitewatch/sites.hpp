#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sitewatch/raster.hpp"

namespace sitewatch {

enum class SiteStatus { existing, proposed };

const char* to_string(SiteStatus s);

struct CircleAoi {
    double radius_m = 2000.0; // > 0
};

struct BboxAoi {
    double min_lon = 0, min_lat = 0, max_lon = 0, max_lat = 0; // min < max
};

using Aoi = std::variant<CircleAoi, BboxAoi>;

// A datacenter location with status, AOI geometry and grid-zone link.
struct Site {
    std::string id;   // unique within a registry
    std::string name;
    std::string operator_name;
    SiteStatus status = SiteStatus::existing;
    double lat = 0.0; // [-90, 90]
    double lon = 0.0; // [-180, 180]
    Aoi aoi = CircleAoi{};
    std::string zone_id; // empty = absent

    void validate() const; // invariants for this record alone
};

// Per-pixel selection paired with a grid of the same dimensions.
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> selected;

    bool at(int row, int col) const {
        return selected[static_cast<std::size_t>(row) * width + col] != 0;
    }
    std::size_t count() const;
};

struct SiteLoadOptions {
    double default_radius_m = 2000.0; // AOI when a record specifies none
};

// Load from CSV (header id,name,operator,status,lat,lon,aoi_kind,aoi_params,zone_id)
// or a GeoJSON FeatureCollection of Points. Validates every invariant,
// including registry-wide id uniqueness; errors name the record and field.
std::vector<Site> load_sites(std::string_view text, const SiteLoadOptions& opts = {});

// Heuristic over the opaque CRS tag: degree CRS iff the tag mentions
// 4326 / WGS84 / CRS84 / "geographic" (case-insensitive), or is empty.
bool crs_is_geographic(std::string_view crs_tag);

// Great-circle distance on a 6,371,000 m sphere.
double haversine_m(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

// A pixel is selected iff its center lies inside the AOI. Circle membership
// uses haversine distance for degree CRS; for projected CRS the site's
// lon/lat are taken as map x/y in grid units and distance is Euclidean.
PixelMask aoi_mask(const Site& site, const RasterGrid& grid);

} // namespace sitewatch
