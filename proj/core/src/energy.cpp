#include "sitewatch/energy.hpp"

#include "sitewatch/errors.hpp"
#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>

namespace sitewatch {

void ZoneIntensityRecord::validate() const {
    std::string record = zone_id + "/" + std::to_string(year);
    if (zone_id.empty()) throw ValidationError(record, "zone_id", "must be non-empty");
    if (!(carbon_intensity >= 0) || !std::isfinite(carbon_intensity))
        throw ValidationError(record, "carbon_intensity", "must be nonnegative");
    auto check_fraction = [&](const std::optional<double>& f, const char* field) {
        if (f && !(*f >= 0.0 && *f <= 1.0))
            throw ValidationError(record, field, "must lie in [0, 1]");
    };
    check_fraction(low_carbon_fraction, "low_carbon_fraction");
    check_fraction(renewable_fraction, "renewable_fraction");
    if (low_carbon_fraction && renewable_fraction && *renewable_fraction > *low_carbon_fraction)
        throw ValidationError(record, "renewable_fraction",
                              "cannot exceed low_carbon_fraction");
}

void PueRecord::validate() const {
    std::string record = operator_name + "/" + std::to_string(year);
    if (operator_name.empty()) throw ValidationError(record, "operator", "must be non-empty");
    if (!(pue >= 1.0) || !std::isfinite(pue))
        throw ValidationError(record, "pue", "must be at least 1.0");
    if (scope != PueScope::global && scope_label.empty())
        throw ValidationError(record, "scope_label", "region/site scope needs a label");
}

std::vector<ZoneIntensityRecord> load_zone_intensities(std::string_view csv) {
    auto rows = detail::parse_csv(csv);
    if (rows.empty()) throw ValidationError("zone CSV", "header", "missing header row");
    const std::vector<std::string> expected = {"zone_id", "year", "carbon_intensity_gco2_kwh",
                                               "low_carbon_fraction", "renewable_fraction"};
    if (rows[0] != expected)
        throw ValidationError("zone CSV", "header",
                              "expected 'zone_id,year,carbon_intensity_gco2_kwh,"
                              "low_carbon_fraction,renewable_fraction'");

    std::vector<ZoneIntensityRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        std::string record = row.empty() || row[0].empty()
                                 ? "zone CSV row " + std::to_string(i + 1)
                                 : row[0];
        if (row.size() != expected.size())
            throw ValidationError(record, "row", "wrong field count");

        auto parse_number = [&](const std::string& s, const char* field) {
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size())
                throw ValidationError(record, field, "not a number: '" + s + "'");
            return v;
        };

        ZoneIntensityRecord r;
        r.zone_id = row[0];
        int year = 0;
        auto [ptr, ec] = std::from_chars(row[1].data(), row[1].data() + row[1].size(), year);
        if (ec != std::errc{} || ptr != row[1].data() + row[1].size())
            throw ValidationError(record, "year", "not an integer: '" + row[1] + "'");
        r.year = year;
        r.carbon_intensity = parse_number(row[2], "carbon_intensity_gco2_kwh");
        if (!row[3].empty()) r.low_carbon_fraction = parse_number(row[3], "low_carbon_fraction");
        if (!row[4].empty()) r.renewable_fraction = parse_number(row[4], "renewable_fraction");
        r.validate();
        records.push_back(std::move(r));
    }
    return records;
}

FleetIntensity fleet_average_intensity(const std::vector<Site>& sites,
                                       const std::vector<ZoneIntensityRecord>& records,
                                       int year) {
    // zone -> year -> intensity. Ordered maps keep the arithmetic (and the
    // result) independent of the input orderings.
    std::map<std::string, std::map<int, double>> table;
    for (const ZoneIntensityRecord& r : records) table[r.zone_id][r.year] = r.carbon_intensity;

    // Accumulate in sorted site-id order for permutation invariance.
    std::vector<const Site*> ordered;
    ordered.reserve(sites.size());
    for (const Site& s : sites) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const Site* a, const Site* b) { return a->id < b->id; });

    FleetIntensity out;
    double sum = 0.0;
    for (const Site* s : ordered) {
        auto zone_it = s->zone_id.empty() ? table.end() : table.find(s->zone_id);
        if (zone_it == table.end()) {
            out.unmatched_site_ids.push_back(s->id);
            continue;
        }
        const auto& years = zone_it->second;
        auto year_it = years.find(year);
        if (year_it == years.end()) {
            // Nearest earlier year; a zone with only later years is unmatched.
            auto upper = years.lower_bound(year);
            if (upper == years.begin()) {
                out.unmatched_site_ids.push_back(s->id);
                continue;
            }
            year_it = std::prev(upper);
            out.fallback_years.emplace_back(s->id, year_it->first);
        }
        sum += year_it->second;
        ++out.n_matched;
    }
    if (out.n_matched == 0) throw NoMatches();
    out.mean_gco2_per_kwh = sum / double(out.n_matched);
    return out;
}

double attributed_emission(double it_energy_kwh, double intensity_gco2_per_kwh, double pue) {
    if (!(it_energy_kwh >= 0)) throw ValidationError("it_energy_kwh must be nonnegative");
    if (!(intensity_gco2_per_kwh >= 0))
        throw ValidationError("intensity must be nonnegative");
    if (!(pue >= 1.0)) throw ValidationError("pue must be at least 1.0");
    return it_energy_kwh * pue * intensity_gco2_per_kwh;
}

} // namespace sitewatch
