#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sitewatch/sites.hpp"

namespace sitewatch {

// One zone-year row of grid carbon-intensity data.
struct ZoneIntensityRecord {
    std::string zone_id;
    int year = 0;
    double carbon_intensity = 0.0; // gCO2/kWh, >= 0
    std::optional<double> low_carbon_fraction; // [0, 1]
    std::optional<double> renewable_fraction;  // [0, 1], <= low_carbon_fraction

    void validate() const;
};

enum class PueScope { global, region, site };

struct PueRecord {
    std::string operator_name;
    PueScope scope = PueScope::global;
    std::string scope_label; // region/site name; empty for global
    int year = 0;
    double pue = 1.0; // >= 1

    void validate() const;
};

// CSV header: zone_id,year,carbon_intensity_gco2_kwh,low_carbon_fraction,renewable_fraction
// (the two fractions may be empty).
std::vector<ZoneIntensityRecord> load_zone_intensities(std::string_view csv);

struct FleetIntensity {
    double mean_gco2_per_kwh = 0.0;
    int n_matched = 0;
    std::vector<std::string> unmatched_site_ids;              // sorted
    std::vector<std::pair<std::string, int>> fallback_years;  // site id -> earlier year used
};

// Unweighted mean of each matched site's zone intensity for the given year.
// A zone missing that year falls back to its nearest earlier year (reported
// in fallback_years). Sites without any match are listed, never silently
// dropped. Throws NoMatches when nothing matches.
FleetIntensity fleet_average_intensity(const std::vector<Site>& sites,
                                       const std::vector<ZoneIntensityRecord>& records,
                                       int year);

// it_energy_kwh * pue * intensity, in gCO2. Inputs nonnegative, pue >= 1.
double attributed_emission(double it_energy_kwh, double intensity_gco2_per_kwh, double pue);

} // namespace sitewatch
