// sitewatch: environmental monitoring around datacenter sites.
//
// Subcommands: sites-validate, run, demo, fit, trend, energy.
// Exit codes: 0 success, 1 validation/analysis failure, 2 I/O or config failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sitewatch/date.hpp"
#include "sitewatch/energy.hpp"
#include "sitewatch/errors.hpp"
#include "sitewatch/io.hpp"
#include "sitewatch/pipeline.hpp"
#include "sitewatch/report.hpp"
#include "sitewatch/sites.hpp"
#include "sitewatch/timeseries.hpp"
#include "sitewatch/version.hpp"

namespace {

using namespace sitewatch;

// Same digit policy as the report renderer: shortest text recovering the
// value after a 9-significant-digit snap.
double quantize(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

struct CommonFlags {
    std::string config_path;
    std::string sites_path;
    std::string zones_path;
    std::string output_dir;
    std::vector<std::string> raster_dir_specs; // variable=directory
    double aoi_radius = 0.0;
    double significance = 0.0;
    double surge_threshold = 0.0;
    double min_clear_fraction = -1.0;
    int workers = 0;
    std::uint64_t seed = 0;
    int energy_year = 0;
    bool no_trend = false;
};

void add_common_options(CLI::App* cmd, CommonFlags& f, bool with_run_knobs) {
    cmd->add_option("-c,--config", f.config_path, "JSON run configuration");
    cmd->add_option("--sites", f.sites_path, "Site registry (CSV or GeoJSON)");
    cmd->add_option("--aoi-radius", f.aoi_radius,
                    "Default AOI radius in meters for sites without one");
    if (!with_run_knobs) return;
    cmd->add_option("--zones", f.zones_path, "Zone carbon-intensity table (CSV)");
    cmd->add_option("--out", f.output_dir, "Output directory for reports and plots");
    cmd->add_option("--raster-dir", f.raster_dir_specs,
                    "Raster directory as variable=path (repeatable; variables: "
                    "ndvi, ntl, uvai)");
    cmd->add_flag("--no-trend", f.no_trend, "Fit the seasonal model without a trend term");
    cmd->add_option("--significance", f.significance, "Two-sided significance level");
    cmd->add_option("--surge-threshold", f.surge_threshold,
                    "Change ratio at or above which nighttime lights flag a surge");
    cmd->add_option("--min-clear-fraction", f.min_clear_fraction,
                    "Minimum clear fraction of the AOI for a date to count");
    cmd->add_option("--workers", f.workers, "Concurrent site workers");
    cmd->add_option("--energy-year", f.energy_year, "Zone-table year to report");
}

// Builds the effective RunConfig: JSON config first, explicit flags override.
RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) {
        // A config file that does not parse is a configuration failure
        // (exit 2), not an analysis failure.
        try {
            cfg = load_run_config(read_text_file(f.config_path));
        } catch (const IoError&) {
            throw;
        } catch (const Error& e) {
            throw IoError(f.config_path, e.what());
        }
    }
    if (cmd->count("--sites")) cfg.sites_path = f.sites_path;
    if (cmd->count("--aoi-radius")) cfg.aoi_default_radius_m = f.aoi_radius;
    if (cmd->get_option_no_throw("--zones") && cmd->count("--zones"))
        cfg.zone_intensity_path = f.zones_path;
    if (cmd->get_option_no_throw("--out") && cmd->count("--out")) cfg.output_dir = f.output_dir;
    if (cmd->get_option_no_throw("--raster-dir") && cmd->count("--raster-dir")) {
        for (const std::string& spec : f.raster_dir_specs) {
            auto eq = spec.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size())
                throw ValidationError("command line", "--raster-dir",
                                      "expected variable=path, got '" + spec + "'");
            cfg.raster_dirs[spec.substr(0, eq)] = spec.substr(eq + 1);
        }
    }
    if (cmd->get_option_no_throw("--no-trend") && cmd->count("--no-trend"))
        cfg.include_trend = false;
    if (cmd->get_option_no_throw("--significance") && cmd->count("--significance"))
        cfg.significance = f.significance;
    if (cmd->get_option_no_throw("--surge-threshold") && cmd->count("--surge-threshold"))
        cfg.surge_threshold = f.surge_threshold;
    if (cmd->get_option_no_throw("--min-clear-fraction") && cmd->count("--min-clear-fraction"))
        cfg.min_clear_fraction = f.min_clear_fraction;
    if (cmd->get_option_no_throw("--workers") && cmd->count("--workers"))
        cfg.workers = f.workers;
    if (cmd->get_option_no_throw("--seed") && cmd->count("--seed")) cfg.seed = f.seed;
    if (cmd->get_option_no_throw("--energy-year") && cmd->count("--energy-year"))
        cfg.energy_year = f.energy_year;
    return cfg;
}

ObservationSeries load_series(const std::string& path) {
    return read_series_csv(read_text_file(path));
}

int run_fit(const std::string& series_path, bool no_trend, double period_days) {
    ObservationSeries series = load_series(series_path);
    HarmonicFit fit = fit_harmonic(series, !no_trend, period_days);
    std::cout << render_fit_json(fit);
    return kExitOk;
}

int run_trend(const std::string& series_path, const std::string& method, double alpha) {
    ObservationSeries series = load_series(series_path);
    TrendResult result = method == "ols" ? ols_slope(series, alpha)
                                         : mann_kendall(series, alpha);
    std::cout << render_trend_json(result);
    return kExitOk;
}

int run_energy(const std::string& sites_path, const std::string& zones_path,
               std::optional<int> year_override, double aoi_radius) {
    std::vector<Site> sites = load_sites(read_text_file(sites_path), {aoi_radius});
    std::vector<ZoneIntensityRecord> records =
        load_zone_intensities(read_text_file(zones_path));
    if (records.empty()) throw ValidationError("zone table", "rows", "table is empty");
    int year = 0;
    for (const ZoneIntensityRecord& r : records) year = std::max(year, r.year);
    if (year_override) year = *year_override;
    FleetIntensity fleet = fleet_average_intensity(sites, records, year);

    nlohmann::json doc;
    doc["year"] = year;
    doc["n_sites"] = sites.size();
    doc["fleet"]["mean_gco2_per_kwh"] = quantize(fleet.mean_gco2_per_kwh);
    doc["fleet"]["n_matched"] = fleet.n_matched;
    doc["fleet"]["unmatched_site_ids"] = fleet.unmatched_site_ids;
    auto& fallback = doc["fleet"]["fallback_years"] = nlohmann::json::array();
    for (const auto& [id, y] : fleet.fallback_years)
        fallback.push_back(nlohmann::json::array({id, y}));
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Satellite-based monitoring of environmental change around "
                 "datacenter sites"};
    app.set_version_flag("--version", std::string(sitewatch::kVersion));
    app.require_subcommand(1);

    CommonFlags validate_flags;
    CLI::App* validate_cmd =
        app.add_subcommand("sites-validate", "Validate a site registry and summarize it");
    add_common_options(validate_cmd, validate_flags, false);

    CommonFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "Run the full monitoring pipeline");
    add_common_options(run_cmd, run_flags, true);

    CommonFlags demo_flags;
    CLI::App* demo_cmd = app.add_subcommand(
        "demo", "Generate a synthetic decade of data and run the pipeline on it");
    add_common_options(demo_cmd, demo_flags, true);
    demo_cmd->add_option("--seed", demo_flags.seed, "Random seed for the synthetic data");

    std::string fit_series;
    bool fit_no_trend = false;
    double fit_period = 365.0;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "Fit the harmonic seasonal model to a series CSV");
    fit_cmd->add_option("series", fit_series, "Series CSV (t_days,value[,weight])")
        ->required();
    fit_cmd->add_flag("--no-trend", fit_no_trend, "Drop the linear trend term");
    fit_cmd->add_option("--period", fit_period, "Season period in days")
        ->check(CLI::PositiveNumber);

    std::string trend_series, trend_method = "mann_kendall";
    double trend_alpha = 0.05;
    CLI::App* trend_cmd = app.add_subcommand("trend", "Run a trend test on a series CSV");
    trend_cmd->add_option("series", trend_series, "Series CSV (t_days,value[,weight])")
        ->required();
    trend_cmd->add_option("--method", trend_method, "mann_kendall (default) or ols")
        ->check(CLI::IsMember({"mann_kendall", "ols"}));
    trend_cmd->add_option("--alpha", trend_alpha, "Significance level")
        ->check(CLI::Range(1e-9, 1.0));

    std::string energy_sites, energy_zones;
    int energy_year = 0;
    double energy_radius = 2000.0;
    CLI::App* energy_cmd =
        app.add_subcommand("energy", "Fleet carbon-intensity summary for a site registry");
    energy_cmd->add_option("--sites", energy_sites, "Site registry (CSV or GeoJSON)")
        ->required();
    energy_cmd->add_option("--zones", energy_zones, "Zone carbon-intensity table (CSV)")
        ->required();
    energy_cmd->add_option("--year", energy_year, "Year to summarize (default: latest)");
    energy_cmd->add_option("--aoi-radius", energy_radius, "Default AOI radius in meters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? sitewatch::kExitOk : sitewatch::kExitIo;
    }

    try {
        if (app.got_subcommand(validate_cmd))
            return cmd_sites_validate(resolve_config(validate_cmd, validate_flags), std::cout,
                                      std::cerr);
        if (app.got_subcommand(run_cmd))
            return cmd_run(resolve_config(run_cmd, run_flags), std::cout, std::cerr);
        if (app.got_subcommand(demo_cmd)) {
            RunConfig cfg = resolve_config(demo_cmd, demo_flags);
            return cmd_demo(cfg, std::cout, std::cerr);
        }
        if (app.got_subcommand(fit_cmd)) return run_fit(fit_series, fit_no_trend, fit_period);
        if (app.got_subcommand(trend_cmd))
            return run_trend(trend_series, trend_method, trend_alpha);
        if (app.got_subcommand(energy_cmd)) {
            std::optional<int> year;
            if (energy_cmd->count("--year")) year = energy_year;
            return run_energy(energy_sites, energy_zones, year, energy_radius);
        }
    } catch (const sitewatch::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sitewatch::kExitIo;
    } catch (const sitewatch::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sitewatch::kExitAnalysis;
    }
    return sitewatch::kExitOk;
}
