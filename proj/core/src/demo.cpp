#include "sitewatch/demo.hpp"

#include "sitewatch/date.hpp"
#include "sitewatch/geotiff.hpp"
#include "sitewatch/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace sitewatch {

namespace fs = std::filesystem;

namespace {

// Deterministic generator: a fixed engine plus hand-rolled uniform/normal
// transforms, so the byte stream never depends on the standard library's
// distribution implementations.
class DemoRng {
public:
    explicit DemoRng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { // [0, 1)
        return double(gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Shared georeference for the synthetic scene: a cluster of sites south of
// Dulles, loosely modeled on the Arcola area.
constexpr double kFineOriginLon = -77.60, kFineOriginLat = 39.01, kFineScale = 0.005;
constexpr double kCoarseOriginLon = -77.66, kCoarseOriginLat = 39.03, kCoarseScale = 0.01;
constexpr int kGridSize = 24;
constexpr const char* kCrs = "EPSG:4326";

RasterGrid blank_grid(double origin_lon, double origin_lat, double scale, BandKind kind,
                      std::optional<double> nodata) {
    RasterGrid g;
    g.width = kGridSize;
    g.height = kGridSize;
    g.origin_x = origin_lon;
    g.origin_y = origin_lat;
    g.pixel_scale_x = scale;
    g.pixel_scale_y = scale;
    g.crs_tag = kCrs;
    g.band_kind = kind;
    g.nodata = nodata;
    g.values.assign(std::size_t(kGridSize) * kGridSize, 0.0);
    return g;
}

std::string date_suffix(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d%02u%02u", d.year, d.month, d.day);
    return buf;
}

void write_grid(const fs::path& path, const RasterGrid& grid, const GeoTiffWriteOptions& opts) {
    write_file_atomic(path.string(), write_geotiff(grid, opts));
}

const char* kSitesCsv =
    "id,name,operator,status,lat,lon,aoi_kind,aoi_params,zone_id\n"
    "arc-001,Arcola Center,Amazon,existing,38.953,-77.537,circle,2000,US-MIDA-PJM\n"
    "arc-002,Stone Ridge East,Amazon,existing,38.946,-77.552,circle,2000,US-MIDA-PJM\n"
    "arc-003,Dulles South,Amazon,existing,38.962,-77.528,circle,2000,US-MIDA-PJM\n"
    "arc-004,Loudoun Meadows,Microsoft,existing,38.938,-77.545,circle,2000,US-MIDA-PJM\n"
    "arc-005,Broad Run,Equinix,existing,38.957,-77.561,circle,2000,US-MIDA-PJM\n"
    "arc-006,Goose Creek,Digital Realty,existing,38.941,-77.522,circle,2000,US-MIDA-PJM\n"
    "arc-007,Arcola West,Vantage,proposed,38.949,-77.568,circle,2000,US-MIDA-PJM\n"
    "arc-008,Elk Lick,QTS,proposed,38.931,-77.533,circle,2000,US-MIDA-PJM\n"
    "arc-009,Belmont Glen,CloudHQ,proposed,38.966,-77.549,circle,2000,US-MIDA-PJM\n"
    "arc-010,Racefield,Stack Infrastructure,proposed,38.935,-77.559,circle,2000,US-MIDA-PJM\n"
    "arc-011,Old Ox,Aligned,proposed,38.959,-77.515,circle,2000,US-MIDA-PJM\n"
    "arc-012,Quail Ridge,Iron Mountain,proposed,38.928,-77.548,circle,2000,US-MIDA-PJM\n";

const char* kZonesCsv =
    "zone_id,year,carbon_intensity_gco2_kwh,low_carbon_fraction,renewable_fraction\n"
    "US-MIDA-PJM,2015,478,0.31,0.03\n"
    "US-MIDA-PJM,2016,472,0.32,0.03\n"
    "US-MIDA-PJM,2017,466,0.33,0.04\n"
    "US-MIDA-PJM,2018,460,0.34,0.04\n"
    "US-MIDA-PJM,2019,453,0.35,0.05\n"
    "US-MIDA-PJM,2020,447,0.36,0.05\n"
    "US-MIDA-PJM,2021,441,0.37,0.06\n"
    "US-MIDA-PJM,2022,436,0.38,0.06\n"
    "US-MIDA-PJM,2023,430,0.39,0.07\n";

} // namespace

RunConfig generate_demo_dataset(const std::string& root_dir, std::uint64_t seed) {
    fs::path root(root_dir);
    write_file_atomic((root / "sites.csv").string(), std::string(kSitesCsv));
    write_file_atomic((root / "zones.csv").string(), std::string(kZonesCsv));

    DemoRng rng(seed);
    GeoTiffWriteOptions float_opts;
    float_opts.sample_format = SampleFormat::float32;
    float_opts.compression = TiffCompression::deflate;
    GeoTiffWriteOptions qa_opts;
    qa_opts.sample_format = SampleFormat::uint16;
    qa_opts.layout = TiffLayout::tiles;
    qa_opts.tile_width = 16;
    qa_opts.tile_height = 16;
    qa_opts.compression = TiffCompression::deflate;

    // Vegetation scene: a decade of 16-day acquisitions with the seasonal
    // cycle, a slow decline, pixel noise, and a cloud mask that wipes out
    // roughly one date in ten.
    {
        fs::path dir = root / "rasters" / "ndvi";
        const CivilDate start{2014, 1, 8};
        const long long start_days = civil_to_days(start);
        const double beta_per_day = -0.01 / 365.25;
        for (long long day = 0; start_days + day < civil_to_days(CivilDate{2024, 1, 1});
             day += 16) {
            CivilDate date = days_to_civil(start_days + day);
            double t = double(day);
            double season = 0.15 * std::cos(2.0 * std::numbers::pi * t / 365.0);
            double cloud_level = rng.uniform();
            bool full_cloud = cloud_level > 0.9;

            RasterGrid nir = blank_grid(kFineOriginLon, kFineOriginLat, kFineScale,
                                        BandKind::reflectance, -9999.0);
            RasterGrid red = nir;
            RasterGrid qa = blank_grid(kFineOriginLon, kFineOriginLat, kFineScale,
                                       BandKind::qa_bits, std::nullopt);
            for (std::size_t i = 0; i < nir.values.size(); ++i) {
                double v = 0.6 + beta_per_day * t + season + 0.02 * rng.normal();
                bool cloudy = full_cloud || rng.uniform() < 0.12 * cloud_level;
                nir.values[i] = 0.25 * (1.0 + v);
                red.values[i] = 0.25 * (1.0 - v);
                qa.values[i] = cloudy ? 8.0 : 0.0; // bit 3 = cloud
            }
            std::string suffix = date_suffix(date) + ".tif";
            write_grid(dir / ("nir_" + suffix), nir, float_opts);
            write_grid(dir / ("red_" + suffix), red, float_opts);
            write_grid(dir / ("qa_" + suffix), qa, qa_opts);
        }
    }

    // Nighttime lights: nine annual composites climbing from 1 to nearly 11
    // radiance units, with a pull-back in 2022.
    {
        fs::path dir = root / "rasters" / "ntl";
        const double annual_level[] = {1.0, 1.5, 2.3, 3.4, 5.0, 6.8, 8.6, 7.4, 10.8};
        for (int i = 0; i < 9; ++i) {
            int year = 2015 + i;
            RasterGrid grid = blank_grid(kFineOriginLon, kFineOriginLat, kFineScale,
                                         BandKind::radiance, -9999.0);
            for (double& v : grid.values)
                v = annual_level[i] * (1.0 + 0.02 * rng.normal());
            write_grid(dir / ("ntl_" + date_suffix(CivilDate{year, 1, 1}) + ".tif"), grid,
                       float_opts);
        }
    }

    // Aerosol index: six years of monthly fields drifting upward.
    {
        fs::path dir = root / "rasters" / "uvai";
        const long long uvai_epoch = civil_to_days(CivilDate{2018, 1, 15});
        for (int year = 2018; year <= 2023; ++year) {
            for (unsigned month = 1; month <= 12; ++month) {
                CivilDate date{year, month, 15};
                double t = double(civil_to_days(date) - uvai_epoch);
                RasterGrid grid = blank_grid(kCoarseOriginLon, kCoarseOriginLat, kCoarseScale,
                                             BandKind::index, -9999.0);
                for (double& v : grid.values)
                    v = 0.5 + 0.02 * (t / 365.25) + 0.02 * rng.normal();
                write_grid(dir / ("uvai_" + date_suffix(date) + ".tif"), grid, float_opts);
            }
        }
    }

    RunConfig cfg;
    cfg.sites_path = (root / "sites.csv").string();
    cfg.zone_intensity_path = (root / "zones.csv").string();
    cfg.raster_dirs = {
        {"ndvi", (root / "rasters" / "ndvi").string()},
        {"ntl", (root / "rasters" / "ntl").string()},
        {"uvai", (root / "rasters" / "uvai").string()},
    };
    cfg.output_dir = (root / "reports").string();
    cfg.seed = seed;
    return cfg;
}

} // namespace sitewatch
