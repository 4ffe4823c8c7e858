#include "sitewatch/pipeline.hpp"

#include "sitewatch/demo.hpp"
#include "sitewatch/energy.hpp"
#include "sitewatch/errors.hpp"
#include "sitewatch/geotiff.hpp"
#include "sitewatch/indices.hpp"
#include "sitewatch/io.hpp"
#include "sitewatch/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace sitewatch {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate_for_run() const {
    if (sites_path.empty()) throw ValidationError("run config", "sites_path", "must be set");
    if (output_dir.empty()) throw ValidationError("run config", "output_dir", "must be set");
    if (raster_dirs.empty())
        throw ValidationError("run config", "raster_dirs",
                              "at least one variable directory is required");
    if (!(aoi_default_radius_m > 0))
        throw ValidationError("run config", "aoi_default_radius_m", "must be positive");
    if (!(significance > 0 && significance < 1))
        throw ValidationError("run config", "significance", "must lie in (0, 1)");
    if (!(surge_threshold > 0))
        throw ValidationError("run config", "surge_threshold", "must be positive");
    if (!(min_clear_fraction >= 0 && min_clear_fraction <= 1))
        throw ValidationError("run config", "min_clear_fraction", "must lie in [0, 1]");
    if (workers < 1) throw ValidationError("run config", "workers", "must be at least 1");
    qa_spec.validate();
}

RunConfig load_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError("run config", "document", e.what());
    }
    if (!doc.is_object())
        throw ValidationError("run config", "document", "must be a JSON object");

    static const std::set<std::string> known = {
        "sites_path",      "raster_dirs",     "zone_intensity_path", "output_dir",
        "aoi_default_radius_m", "qa_spec",    "include_trend",       "significance",
        "surge_threshold", "min_clear_fraction", "workers",          "seed",
        "energy_year",     "ingest_scaling",
    };
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key))
            throw ValidationError("run config", key, "unknown configuration key");
    }

    RunConfig cfg;
    auto str = [&](const char* key, std::string& out) {
        if (doc.contains(key)) {
            if (!doc[key].is_string())
                throw ValidationError("run config", key, "must be a string");
            out = doc[key].get<std::string>();
        }
    };
    str("sites_path", cfg.sites_path);
    str("zone_intensity_path", cfg.zone_intensity_path);
    str("output_dir", cfg.output_dir);
    if (doc.contains("raster_dirs")) {
        if (!doc["raster_dirs"].is_object())
            throw ValidationError("run config", "raster_dirs", "must be an object");
        for (const auto& [key, value] : doc["raster_dirs"].items()) {
            if (!value.is_string())
                throw ValidationError("run config", "raster_dirs", "directories must be strings");
            cfg.raster_dirs[key] = value.get<std::string>();
        }
    }
    if (doc.contains("aoi_default_radius_m"))
        cfg.aoi_default_radius_m = doc["aoi_default_radius_m"].get<double>();
    if (doc.contains("qa_spec")) {
        const json& q = doc["qa_spec"];
        QaBitSpec spec;
        if (q.contains("named_flags")) {
            for (const auto& [name, bit] : q["named_flags"].items())
                spec.named_flags.emplace_back(name, bit.get<int>());
        }
        if (q.contains("reject_flags")) {
            for (const auto& f : q["reject_flags"])
                spec.reject_flags.push_back(f.get<std::string>());
        }
        spec.validate();
        cfg.qa_spec = std::move(spec);
    }
    if (doc.contains("include_trend")) cfg.include_trend = doc["include_trend"].get<bool>();
    if (doc.contains("significance")) cfg.significance = doc["significance"].get<double>();
    if (doc.contains("surge_threshold"))
        cfg.surge_threshold = doc["surge_threshold"].get<double>();
    if (doc.contains("min_clear_fraction"))
        cfg.min_clear_fraction = doc["min_clear_fraction"].get<double>();
    if (doc.contains("workers")) cfg.workers = doc["workers"].get<int>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("energy_year")) cfg.energy_year = doc["energy_year"].get<int>();
    if (doc.contains("ingest_scaling")) {
        for (const auto& [key, value] : doc["ingest_scaling"].items()) {
            IngestScaling s;
            if (value.contains("scale")) s.scale = value["scale"].get<double>();
            if (value.contains("offset")) s.offset = value["offset"].get<double>();
            cfg.ingest_scaling[key] = s;
        }
    }
    return cfg;
}

namespace {

// ---- raster ingestion ----------------------------------------------------

struct RasterFile {
    std::string prefix; // filename part before '_'
    CivilDate date;
    fs::path path;
};

// Files named <prefix>_<YYYYMMDD>.tif; anything else is ignored.
std::vector<RasterFile> scan_raster_dir(const std::string& dir, std::ostream& err) {
    std::vector<RasterFile> files;
    std::error_code ec;
    fs::directory_iterator it(dir, ec);
    if (ec) throw IoError(dir, "cannot list directory: " + ec.message());
    for (const auto& entry : it) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() < 14 || name.substr(name.size() - 4) != ".tif") continue;
        std::string stem = name.substr(0, name.size() - 4);
        std::size_t underscore = stem.rfind('_');
        if (underscore == std::string::npos || stem.size() - underscore - 1 != 8) {
            err << "warning: ignoring unrecognized raster name " << name << "\n";
            continue;
        }
        RasterFile f;
        f.prefix = stem.substr(0, underscore);
        try {
            f.date = parse_iso_date(stem.substr(underscore + 1));
        } catch (const ValidationError&) {
            err << "warning: ignoring raster with unparseable date " << name << "\n";
            continue;
        }
        f.path = entry.path();
        files.push_back(std::move(f));
    }
    std::sort(files.begin(), files.end(), [](const RasterFile& a, const RasterFile& b) {
        return a.path.filename().string() < b.path.filename().string();
    });
    return files;
}

BandKind band_kind_for(const std::string& prefix) {
    if (prefix == "nir" || prefix == "red") return BandKind::reflectance;
    if (prefix == "qa") return BandKind::qa_bits;
    if (prefix == "ntl") return BandKind::radiance;
    if (prefix == "uvai") return BandKind::index;
    return BandKind::other;
}

struct LoadedRaster {
    RasterFile file;
    RasterGrid grid;
};

struct Ingest {
    CivilDate epoch;
    std::string generated_at;
    // variable key (raster_dirs key) -> timestamped single-band stack
    std::map<std::string, std::vector<StackEntry>> stacks;
};

Ingest ingest_rasters(const RunConfig& config, std::ostream& err) {
    // Read and parse everything first so the epoch covers all variables.
    std::map<std::string, std::vector<LoadedRaster>> loaded;
    std::optional<CivilDate> min_date, max_date;
    for (const auto& [variable, dir] : config.raster_dirs) {
        for (RasterFile& f : scan_raster_dir(dir, err)) {
            GeoTiffParseOptions opts;
            auto scaling = config.ingest_scaling.find(f.prefix);
            if (scaling != config.ingest_scaling.end() && f.prefix != "qa") {
                opts.apply_scale = true;
                opts.scale = scaling->second.scale;
                opts.offset = scaling->second.offset;
            }
            RasterGrid grid;
            try {
                grid = parse_geotiff(read_binary_file(f.path.string()), opts);
            } catch (const Error& e) {
                err << "warning: skipping " << f.path.string() << ": " << e.what() << "\n";
                continue;
            }
            grid.band_kind = band_kind_for(f.prefix);
            if (!min_date || f.date < *min_date) min_date = f.date;
            if (!max_date || *max_date < f.date) max_date = f.date;
            loaded[variable].push_back({std::move(f), std::move(grid)});
        }
    }

    Ingest out;
    out.epoch = min_date.value_or(CivilDate{});
    out.generated_at = max_date ? to_iso(*max_date) : to_iso(out.epoch);
    long long epoch_days = civil_to_days(out.epoch);

    for (auto& [variable, rasters] : loaded) {
        if (variable == "ndvi") {
            // Band triplets: nir + red (+ qa) per date, composed into an
            // index grid once, shared by every site.
            std::map<CivilDate, BandPair> by_date;
            for (LoadedRaster& lr : rasters) {
                double t = double(civil_to_days(lr.file.date) - epoch_days);
                lr.grid.timestamp = t;
                if (lr.file.prefix == "nir") by_date[lr.file.date].nir = std::move(lr.grid);
                else if (lr.file.prefix == "red") by_date[lr.file.date].red = std::move(lr.grid);
                else if (lr.file.prefix == "qa") by_date[lr.file.date].qa = std::move(lr.grid);
                else
                    err << "warning: ignoring unexpected band '" << lr.file.prefix
                        << "' in the ndvi directory\n";
            }
            std::vector<StackEntry>& stack = out.stacks["ndvi"];
            for (auto& [date, pair] : by_date) {
                if (pair.nir.width == 0 || pair.red.width == 0) {
                    err << "warning: incomplete nir/red pair for " << to_iso(date) << "\n";
                    continue;
                }
                try {
                    RasterGrid index = ndvi(pair, config.qa_spec);
                    double t = index.timestamp;
                    stack.push_back({t, std::move(index), std::nullopt});
                } catch (const Error& e) {
                    err << "warning: skipping ndvi for " << to_iso(date) << ": " << e.what()
                        << "\n";
                }
            }
        } else {
            std::vector<StackEntry>& stack = out.stacks[variable];
            for (LoadedRaster& lr : rasters) {
                if (lr.file.prefix != variable) {
                    err << "warning: ignoring unexpected band '" << lr.file.prefix << "' in the "
                        << variable << " directory\n";
                    continue;
                }
                double t = double(civil_to_days(lr.file.date) - epoch_days);
                lr.grid.timestamp = t;
                stack.push_back({t, std::move(lr.grid), std::nullopt});
            }
            std::sort(stack.begin(), stack.end(),
                      [](const StackEntry& a, const StackEntry& b) {
                          return a.timestamp < b.timestamp;
                      });
        }
    }
    return out;
}

// ---- per-site analysis -----------------------------------------------------

struct EnergyTable {
    std::map<std::string, std::map<int, ZoneIntensityRecord>> by_zone;
    std::optional<FleetIntensity> fleet;
    int year = 0;
    bool present = false;
};

struct SiteOutcome {
    std::string site_id;
    bool ok = false;
    std::string detail; // flags when ok, reason when not
};

// Subtract the fitted seasonal harmonics, keeping level and trend, so the
// monotone-trend test sees through the seasonal cycle.
ObservationSeries deseasonalize(const ObservationSeries& series, const HarmonicFit& fit) {
    ObservationSeries out = series;
    const double omega = 2.0 * std::numbers::pi / fit.period_days;
    for (Observation& o : out.obs)
        o.value -= fit.alpha1 * std::cos(omega * o.t) + fit.alpha2 * std::sin(omega * o.t);
    return out;
}

SiteOutcome process_site(const Site& site, const Ingest& ingest, const EnergyTable& energy,
                         const RunConfig& config) {
    SiteOutcome outcome;
    outcome.site_id = site.id;

    ExtractOptions extract_opts;
    extract_opts.qa_spec = config.qa_spec;
    extract_opts.min_clear_fraction = config.min_clear_fraction;

    std::optional<NdviSection> ndvi_section;
    std::optional<NtlSection> ntl_section;
    std::optional<UvaiSection> uvai_section;
    std::optional<EnergySection> energy_section;

    struct Plot {
        std::string variable;
        ObservationSeries series;
        std::optional<HarmonicFit> fit;
    };
    std::vector<Plot> plots;

    auto stack_of = [&](const char* key) -> const std::vector<StackEntry>* {
        auto it = ingest.stacks.find(key);
        return it == ingest.stacks.end() ? nullptr : &it->second;
    };

    if (const auto* stack = stack_of("ndvi")) {
        ObservationSeries series =
            extract_series(*stack, site, Variable::ndvi, ingest.epoch, extract_opts);
        if (!series.empty()) {
            std::optional<HarmonicFit> fit;
            try {
                fit = fit_harmonic(series, config.include_trend);
            } catch (const Error&) {
                // Too few clear observations or a degenerate design: the
                // report simply omits the vegetation section.
            }
            if (fit) {
                TrendResult trend =
                    mann_kendall(deseasonalize(series, *fit), config.significance);
                ndvi_section = NdviSection{*fit, trend};
            }
            plots.push_back({"ndvi", std::move(series), fit});
        }
    }

    if (const auto* stack = stack_of("ntl")) {
        ObservationSeries series =
            extract_series(*stack, site, Variable::ntl_radiance, ingest.epoch, extract_opts);
        ObservationSeries annual = annual_aggregate(series, AnnualStatistic::mean);
        if (annual.size() >= 3) {
            try {
                NtlSection section;
                for (const Observation& o : annual.obs)
                    section.annual.emplace_back(year_of(annual.epoch, o.t), o.value);
                section.baseline_year = section.annual.front().first;
                section.target_year = section.annual.back().first;
                section.ratio = change_ratio(annual, section.baseline_year, section.target_year);
                section.dip_years = detect_dips(annual);
                section.trend = ols_slope(annual, config.significance);
                ntl_section = std::move(section);
            } catch (const Error&) {
                // Nonpositive baseline or a degenerate time axis: drop just
                // the nighttime-light section.
            }
        }
        if (!annual.empty()) plots.push_back({"ntl", std::move(annual), std::nullopt});
    }

    if (const auto* stack = stack_of("uvai")) {
        ObservationSeries series =
            extract_series(*stack, site, Variable::uvai, ingest.epoch, extract_opts);
        if (series.size() >= 2) {
            uvai_section = UvaiSection{mann_kendall(series, config.significance)};
        }
        if (!series.empty()) plots.push_back({"uvai", std::move(series), std::nullopt});
    }

    if (energy.present && !site.zone_id.empty()) {
        auto zone_it = energy.by_zone.find(site.zone_id);
        if (zone_it != energy.by_zone.end()) {
            const auto& years = zone_it->second;
            auto year_it = years.find(energy.year);
            if (year_it == years.end()) {
                auto upper = years.lower_bound(energy.year);
                if (upper != years.begin()) year_it = std::prev(upper);
                else year_it = years.end();
            }
            if (year_it != years.end()) {
                EnergySection section;
                section.zone_id = site.zone_id;
                section.year = year_it->first;
                section.carbon_intensity = year_it->second.carbon_intensity;
                section.low_carbon_fraction = year_it->second.low_carbon_fraction;
                section.renewable_fraction = year_it->second.renewable_fraction;
                section.fleet = energy.fleet;
                energy_section = std::move(section);
            }
        }
    }

    ReportOptions report_opts;
    report_opts.surge_threshold = config.surge_threshold;
    SiteReport report;
    try {
        report = build_report(site, std::move(ndvi_section), std::move(ntl_section),
                              std::move(uvai_section), std::move(energy_section), report_opts,
                              ingest.generated_at);
    } catch (const NoAnalyses&) {
        outcome.detail = "no analysis produced any usable data";
        return outcome;
    }

    fs::path out_dir(config.output_dir);
    write_file_atomic((out_dir / (site.id + ".report.json")).string(), render_json(report));
    for (const Plot& plot : plots) {
        std::string title = site.id + " " + plot.variable;
        std::string svg = render_svg_timeseries(plot.series,
                                                plot.fit ? &*plot.fit : nullptr, title);
        write_file_atomic((out_dir / (site.id + "." + plot.variable + ".svg")).string(), svg);
    }

    outcome.ok = true;
    if (report.flags.empty()) {
        outcome.detail = "no flags";
    } else {
        std::string joined;
        for (const std::string& f : report.flags) {
            if (!joined.empty()) joined += ", ";
            joined += f;
        }
        outcome.detail = joined;
    }
    return outcome;
}

} // namespace

int cmd_sites_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (config.sites_path.empty()) {
        err << "error: sites_path is not configured\n";
        return kExitIo;
    }
    std::string text;
    try {
        text = read_text_file(config.sites_path);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::vector<Site> sites;
    try {
        sites = load_sites(text, {config.aoi_default_radius_m});
    } catch (const ValidationError& e) {
        out << "invalid: " << e.what() << "\n";
        return kExitAnalysis;
    }
    std::size_t existing = 0;
    for (const Site& s : sites)
        if (s.status == SiteStatus::existing) ++existing;
    out << sites.size() << " sites (" << existing << " existing, " << sites.size() - existing
        << " proposed)\n";
    return kExitOk;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate_for_run();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::vector<Site> sites;
    std::vector<ZoneIntensityRecord> zone_records;
    Ingest ingest;
    EnergyTable energy;
    try {
        sites = load_sites(read_text_file(config.sites_path), {config.aoi_default_radius_m});
        if (!config.zone_intensity_path.empty())
            zone_records = load_zone_intensities(read_text_file(config.zone_intensity_path));
        ingest = ingest_rasters(config, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }

    if (!zone_records.empty()) {
        energy.present = true;
        int latest = zone_records.front().year;
        for (const ZoneIntensityRecord& r : zone_records) {
            latest = std::max(latest, r.year);
            energy.by_zone[r.zone_id].emplace(r.year, r);
        }
        energy.year = config.energy_year.value_or(latest);
        try {
            energy.fleet = fleet_average_intensity(sites, zone_records, energy.year);
        } catch (const NoMatches&) {
            energy.fleet = std::nullopt;
        }
        // No raster date anywhere: fall back to the energy year for the
        // deterministic report timestamp.
        if (ingest.stacks.empty())
            ingest.generated_at = to_iso(CivilDate{energy.year, 12, 31});
    }

    // Per-site processing, optionally across a small worker pool. Stacks and
    // tables are read-only from here on.
    std::vector<SiteOutcome> outcomes(sites.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= sites.size()) return;
            try {
                outcomes[i] = process_site(sites[i], ingest, energy, config);
            } catch (const Error& e) {
                outcomes[i].site_id = sites[i].id;
                outcomes[i].ok = false;
                outcomes[i].detail = e.what();
            }
        }
    };
    int n_workers = std::max(1, std::min<int>(config.workers, int(sites.size())));
    if (n_workers <= 1 || sites.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::sort(outcomes.begin(), outcomes.end(),
              [](const SiteOutcome& a, const SiteOutcome& b) { return a.site_id < b.site_id; });
    std::size_t n_ok = 0;
    for (const SiteOutcome& o : outcomes) {
        if (o.ok) ++n_ok;
        out << o.site_id << "  " << (o.ok ? "ok" : "failed") << "  " << o.detail << "\n";
    }
    out << n_ok << "/" << sites.size() << " sites reported; output in " << config.output_dir
        << "\n";
    if (!sites.empty() && n_ok == 0) return kExitAnalysis;
    return kExitOk;
}

int cmd_demo(const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (config.output_dir.empty()) {
        err << "error: output_dir is required for the demo\n";
        return kExitIo;
    }
    RunConfig demo_config;
    try {
        demo_config = generate_demo_dataset(config.output_dir, config.seed);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    // Keep the user's analysis knobs; only the data paths come from the
    // generated dataset.
    demo_config.aoi_default_radius_m = config.aoi_default_radius_m;
    demo_config.qa_spec = config.qa_spec;
    demo_config.include_trend = config.include_trend;
    demo_config.significance = config.significance;
    demo_config.surge_threshold = config.surge_threshold;
    demo_config.min_clear_fraction = config.min_clear_fraction;
    demo_config.workers = config.workers;
    demo_config.energy_year = config.energy_year;
    out << "demo dataset under " << config.output_dir << " (seed " << config.seed << ")\n";
    return cmd_run(demo_config, out, err);
}

} // namespace sitewatch
