#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "sitewatch/raster.hpp"

namespace sitewatch {

// Per-variable raw-sample scaling applied at ingestion (off by default).
struct IngestScaling {
    double scale = 1.0;
    double offset = 0.0;
};

// Everything a pipeline run needs. Loadable from a JSON document; the CLI
// may override any field with flags.
struct RunConfig {
    std::string sites_path;
    std::map<std::string, std::string> raster_dirs; // variable key -> directory
    std::string zone_intensity_path;                // empty = no energy context
    std::string output_dir;
    double aoi_default_radius_m = 2000.0;
    QaBitSpec qa_spec = QaBitSpec::landsat_c2_default();
    bool include_trend = true;
    double significance = 0.05;
    double surge_threshold = 10.0;
    double min_clear_fraction = 0.0;
    int workers = 1;
    std::uint64_t seed = 42; // demo only
    std::optional<int> energy_year; // default: latest year in the zone table
    std::map<std::string, IngestScaling> ingest_scaling; // variable key -> scaling

    void validate_for_run() const;
};

RunConfig load_run_config(const std::string& json_text);

// Exit statuses shared by the CLI: 0 success, 1 validation/analysis failure,
// 2 I/O or config failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysis = 1;
inline constexpr int kExitIo = 2;

int cmd_sites_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Synthesizes a decade of rasters, a site registry and a zone table under
// config.output_dir, then runs the pipeline on them.
int cmd_demo(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace sitewatch
