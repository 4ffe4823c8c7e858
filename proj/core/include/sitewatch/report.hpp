#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sitewatch/energy.hpp"
#include "sitewatch/sites.hpp"
#include "sitewatch/timeseries.hpp"

namespace sitewatch {

struct NdviSection {
    HarmonicFit fit;
    TrendResult trend;
};

struct NtlSection {
    std::vector<std::pair<int, double>> annual; // year -> value, ascending years
    double ratio = 0.0;
    int baseline_year = 0;
    int target_year = 0;
    std::vector<int> dip_years;
    TrendResult trend;
};

struct UvaiSection {
    TrendResult trend;
};

struct EnergySection {
    std::string zone_id;
    int year = 0; // latest year with data for the zone
    double carbon_intensity = 0.0;
    std::optional<double> low_carbon_fraction;
    std::optional<double> renewable_fraction;
    std::optional<FleetIntensity> fleet; // fleet-wide context
};

// Consolidated per-site findings. Flags are pure functions of the sections:
//   "vegetation-decline" iff ndvi.trend.direction == decreasing
//   "ntl-surge"          iff ntl.ratio >= surge threshold
//   "uvai-increase"      iff uvai.trend.direction == increasing
struct SiteReport {
    Site site;
    std::optional<NdviSection> ndvi;
    std::optional<NtlSection> ntl;
    std::optional<UvaiSection> uvai;
    std::optional<EnergySection> energy;
    std::vector<std::string> flags;
    std::string generated_at; // ISO date; deterministic (derived from inputs)
    std::string tool_version;
};

struct ReportOptions {
    double surge_threshold = 10.0;
};

// Throws NoAnalyses when every section is absent.
SiteReport build_report(const Site& site,
                        std::optional<NdviSection> ndvi,
                        std::optional<NtlSection> ntl,
                        std::optional<UvaiSection> uvai,
                        std::optional<EnergySection> energy,
                        const ReportOptions& opts = {},
                        std::string generated_at = "1970-01-01");

// Schema-stable JSON: keys sorted, numbers quantized to <= 9 significant
// digits, absent sections omitted. Byte-deterministic for equal reports.
std::string render_json(const SiteReport& report);
SiteReport parse_report(std::string_view json);

// Fit/trend fragments in the same schema (used by the CLI subcommands).
std::string render_fit_json(const HarmonicFit& fit);
std::string render_trend_json(const TrendResult& trend);

// Static SVG plot: one circle marker per observation plus, when a fit is
// given, a path sampling the fitted curve at >= 100 points across the span.
std::string render_svg_timeseries(const ObservationSeries& series, const HarmonicFit* fit,
                                  std::string_view title);

bool operator==(const NdviSection&, const NdviSection&);
bool operator==(const NtlSection&, const NtlSection&);
bool operator==(const UvaiSection&, const UvaiSection&);
bool operator==(const EnergySection&, const EnergySection&);
bool operator==(const SiteReport&, const SiteReport&);
bool operator==(const HarmonicFit&, const HarmonicFit&);
bool operator==(const TrendResult&, const TrendResult&);
bool operator==(const FleetIntensity&, const FleetIntensity&);
bool operator==(const Site&, const Site&);

} // namespace sitewatch
