#include "sitewatch/date.hpp"

#include "sitewatch/errors.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace sitewatch {

namespace {

std::chrono::year_month_day to_ymd(const CivilDate& d) {
    return std::chrono::year{d.year} / std::chrono::month{d.month} / std::chrono::day{d.day};
}

} // namespace

long long civil_to_days(const CivilDate& d) {
    auto ymd = to_ymd(d);
    if (!ymd.ok()) throw ValidationError("invalid civil date " + to_iso(d));
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

CivilDate days_to_civil(long long days) {
    std::chrono::sys_days sd{std::chrono::days{days}};
    std::chrono::year_month_day ymd{sd};
    return CivilDate{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
}

int year_of(const CivilDate& epoch, double t) {
    long long abs_day = civil_to_days(epoch) + static_cast<long long>(std::floor(t));
    return days_to_civil(abs_day).year;
}

double midyear_t(const CivilDate& epoch, int year) {
    long long start = civil_to_days(CivilDate{year, 1, 1});
    long long next = civil_to_days(CivilDate{year + 1, 1, 1});
    return 0.5 * double(start + next) - double(civil_to_days(epoch));
}

std::string to_iso(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

CivilDate parse_iso_date(std::string_view s) {
    // Accepts YYYY-MM-DD, plus bare YYYYMMDD because raster filenames use it.
    auto parse_int = [](std::string_view part, int& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        return ec == std::errc{} && ptr == part.data() + part.size();
    };
    int year = 0, month = 0, day = 0;
    bool ok = false;
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        ok = parse_int(s.substr(0, 4), year) && parse_int(s.substr(5, 2), month) &&
             parse_int(s.substr(8, 2), day);
    } else if (s.size() == 8) {
        ok = parse_int(s.substr(0, 4), year) && parse_int(s.substr(4, 2), month) &&
             parse_int(s.substr(6, 2), day);
    }
    if (!ok || month < 1 || day < 1)
        throw ValidationError("unparseable date '" + std::string(s) + "'");
    CivilDate d{year, unsigned(month), unsigned(day)};
    if (!to_ymd(d).ok()) throw ValidationError("invalid civil date " + to_iso(d));
    return d;
}

} // namespace sitewatch
