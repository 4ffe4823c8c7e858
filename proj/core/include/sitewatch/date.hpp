#pragma once

#include <string>
#include <string_view>

namespace sitewatch {

// Proleptic Gregorian calendar date. Series time axes are anchored to one of
// these: t is measured in days since the epoch date.
struct CivilDate {
    int year = 1970;
    unsigned month = 1; // 1..12
    unsigned day = 1;   // 1..31

    auto operator<=>(const CivilDate&) const = default;
};

// Days since 1970-01-01 (negative before).
long long civil_to_days(const CivilDate& d);
CivilDate days_to_civil(long long days);

// Calendar year containing the instant epoch + t days.
int year_of(const CivilDate& epoch, double t);

// Midpoint of a calendar year expressed in t units relative to the epoch
// (the average of the year's first day and the next year's first day).
double midyear_t(const CivilDate& epoch, int year);

std::string to_iso(const CivilDate& d);     // "YYYY-MM-DD"
CivilDate parse_iso_date(std::string_view); // throws ValidationError

} // namespace sitewatch
