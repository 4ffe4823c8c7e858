#include "sitewatch/sites.hpp"

#include "sitewatch/errors.hpp"
#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sitewatch {

const char* to_string(SiteStatus s) {
    return s == SiteStatus::existing ? "existing" : "proposed";
}

void Site::validate() const {
    if (id.empty()) throw ValidationError(id, "id", "must be non-empty");
    if (!(lat >= -90.0 && lat <= 90.0))
        throw ValidationError(id, "lat", "out of range [-90, 90]");
    if (!(lon >= -180.0 && lon <= 180.0))
        throw ValidationError(id, "lon", "out of range [-180, 180]");
    if (const CircleAoi* c = std::get_if<CircleAoi>(&aoi)) {
        if (!(c->radius_m > 0)) throw ValidationError(id, "aoi", "radius must be positive");
    } else {
        const BboxAoi& b = std::get<BboxAoi>(aoi);
        if (!(b.min_lon < b.max_lon))
            throw ValidationError(id, "aoi", "bbox min_lon must be below max_lon");
        if (!(b.min_lat < b.max_lat))
            throw ValidationError(id, "aoi", "bbox min_lat must be below max_lat");
    }
}

std::size_t PixelMask::count() const {
    return static_cast<std::size_t>(std::count_if(selected.begin(), selected.end(),
                                                  [](std::uint8_t v) { return v != 0; }));
}

namespace {

SiteStatus parse_status(const std::string& record, const std::string& s) {
    if (s == "existing") return SiteStatus::existing;
    if (s == "proposed") return SiteStatus::proposed;
    throw ValidationError(record, "status", "unknown status '" + s + "'");
}

double parse_double(const std::string& record, const char* field, const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ValidationError(record, field, "not a number: '" + s + "'");
    return v;
}

// aoi_params: circle -> "radius_m"; bbox -> "min_lon min_lat max_lon max_lat"
// (space- or semicolon-separated to stay CSV-friendly).
Aoi parse_aoi(const std::string& record, const std::string& kind, const std::string& params,
              double default_radius_m) {
    if (kind.empty() || kind == "default") return CircleAoi{default_radius_m};
    if (kind == "circle") {
        if (params.empty()) return CircleAoi{default_radius_m};
        return CircleAoi{parse_double(record, "aoi_params", params)};
    }
    if (kind == "bbox") {
        std::string normalized = params;
        std::replace(normalized.begin(), normalized.end(), ';', ' ');
        std::istringstream ss(normalized);
        std::vector<double> v;
        std::string tok;
        while (ss >> tok) v.push_back(parse_double(record, "aoi_params", tok));
        if (v.size() != 4)
            throw ValidationError(record, "aoi_params", "bbox needs exactly 4 numbers");
        return BboxAoi{v[0], v[1], v[2], v[3]};
    }
    throw ValidationError(record, "aoi_kind", "unknown AOI kind '" + kind + "'");
}

std::vector<Site> load_sites_csv(std::string_view text, const SiteLoadOptions& opts) {
    auto rows = detail::parse_csv(text);
    if (rows.empty()) throw ValidationError("sites CSV", "header", "missing header row");
    const std::vector<std::string> expected = {"id",  "name", "operator", "status",  "lat",
                                               "lon", "aoi_kind", "aoi_params", "zone_id"};
    if (rows[0] != expected)
        throw ValidationError("sites CSV", "header",
                              "expected 'id,name,operator,status,lat,lon,aoi_kind,aoi_params,zone_id'");
    std::vector<Site> sites;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        std::string record = row.empty() || row[0].empty()
                                 ? "sites CSV row " + std::to_string(i + 1)
                                 : row[0];
        if (row.size() != expected.size())
            throw ValidationError(record, "row", "wrong field count");
        Site s;
        s.id = row[0];
        s.name = row[1];
        s.operator_name = row[2];
        s.status = parse_status(record, row[3]);
        s.lat = parse_double(record, "lat", row[4]);
        s.lon = parse_double(record, "lon", row[5]);
        s.aoi = parse_aoi(record, row[6], row[7], opts.default_radius_m);
        s.zone_id = row[8];
        sites.push_back(std::move(s));
    }
    return sites;
}

std::vector<Site> load_sites_geojson(std::string_view text, const SiteLoadOptions& opts) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("sites GeoJSON", "document", e.what());
    }
    if (doc.value("type", "") != "FeatureCollection")
        throw ValidationError("sites GeoJSON", "type", "expected a FeatureCollection");

    std::vector<Site> sites;
    const auto features = doc.value("features", nlohmann::json::array());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        std::string record = "feature " + std::to_string(i);
        const auto props = f.value("properties", nlohmann::json::object());
        if (props.contains("id") && props["id"].is_string())
            record = props["id"].get<std::string>();

        const auto geom = f.value("geometry", nlohmann::json::object());
        if (geom.value("type", "") != "Point")
            throw ValidationError(record, "geometry", "expected a Point geometry");
        const auto coords = geom.value("coordinates", nlohmann::json::array());
        if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() ||
            !coords[1].is_number())
            throw ValidationError(record, "coordinates", "expected [lon, lat]");

        auto str_prop = [&](const char* key) -> std::string {
            if (!props.contains(key)) return "";
            const auto& v = props[key];
            return v.is_string() ? v.get<std::string>() : "";
        };

        Site s;
        s.id = str_prop("id");
        if (s.id.empty()) throw ValidationError(record, "id", "must be non-empty");
        s.name = str_prop("name");
        s.operator_name = str_prop("operator");
        s.status = parse_status(record, str_prop("status"));
        s.lon = coords[0].get<double>();
        s.lat = coords[1].get<double>();
        std::string aoi_kind = str_prop("aoi_kind");
        std::string aoi_params = str_prop("aoi_params");
        if (props.contains("radius_m") && props["radius_m"].is_number()) {
            s.aoi = CircleAoi{props["radius_m"].get<double>()};
        } else {
            s.aoi = parse_aoi(record, aoi_kind, aoi_params, opts.default_radius_m);
        }
        s.zone_id = str_prop("zone_id");
        sites.push_back(std::move(s));
    }
    return sites;
}

} // namespace

std::vector<Site> load_sites(std::string_view text, const SiteLoadOptions& opts) {
    // A leading '{' marks GeoJSON; anything else is treated as CSV.
    std::size_t first = text.find_first_not_of(" \t\r\n");
    std::vector<Site> sites;
    if (first != std::string_view::npos && text[first] == '{')
        sites = load_sites_geojson(text, opts);
    else
        sites = load_sites_csv(text, opts);

    std::set<std::string> seen;
    for (const Site& s : sites) {
        s.validate();
        if (!seen.insert(s.id).second)
            throw ValidationError(s.id, "id", "duplicate site id");
    }
    return sites;
}

bool crs_is_geographic(std::string_view crs_tag) {
    if (crs_tag.empty()) return true;
    std::string lower(crs_tag);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return lower.find("4326") != std::string::npos || lower.find("wgs84") != std::string::npos ||
           lower.find("wgs 84") != std::string::npos ||
           lower.find("crs84") != std::string::npos ||
           lower.find("geographic") != std::string::npos;
}

double haversine_m(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg) {
    constexpr double kRadiusM = 6371000.0;
    constexpr double kDeg2Rad = std::numbers::pi / 180.0;
    double lat1 = lat1_deg * kDeg2Rad, lat2 = lat2_deg * kDeg2Rad;
    double dlat = (lat2_deg - lat1_deg) * kDeg2Rad;
    double dlon = (lon2_deg - lon1_deg) * kDeg2Rad;
    double a = std::sin(0.5 * dlat) * std::sin(0.5 * dlat) +
               std::cos(lat1) * std::cos(lat2) * std::sin(0.5 * dlon) * std::sin(0.5 * dlon);
    return 2.0 * kRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

PixelMask aoi_mask(const Site& site, const RasterGrid& grid) {
    grid.validate();
    PixelMask mask;
    mask.width = grid.width;
    mask.height = grid.height;
    mask.selected.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);

    bool geographic = crs_is_geographic(grid.crs_tag);
    for (int row = 0; row < grid.height; ++row) {
        double cy = grid.pixel_center_y(row);
        for (int col = 0; col < grid.width; ++col) {
            double cx = grid.pixel_center_x(col);
            bool inside;
            if (const CircleAoi* c = std::get_if<CircleAoi>(&site.aoi)) {
                double d = geographic ? haversine_m(site.lat, site.lon, cy, cx)
                                      : std::hypot(cx - site.lon, cy - site.lat);
                inside = d <= c->radius_m;
            } else {
                const BboxAoi& b = std::get<BboxAoi>(site.aoi);
                inside = cx >= b.min_lon && cx <= b.max_lon && cy >= b.min_lat && cy <= b.max_lat;
            }
            if (inside) mask.selected[static_cast<std::size_t>(row) * grid.width + col] = 1;
        }
    }
    return mask;
}

} // namespace sitewatch
