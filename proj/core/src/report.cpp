#include "sitewatch/report.hpp"

#include "sitewatch/errors.hpp"
#include "sitewatch/version.hpp"
#include "fmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace sitewatch {

using nlohmann::json;

namespace {

double q9(double v) { return detail::quantize9(v); }

// ---- section -> JSON ----------------------------------------------------

json fit_to_json(const HarmonicFit& fit) {
    json j;
    j["mu"] = q9(fit.mu);
    j["alpha1"] = q9(fit.alpha1);
    j["alpha2"] = q9(fit.alpha2);
    if (fit.beta) j["beta"] = q9(*fit.beta);
    j["period_days"] = q9(fit.period_days);
    j["n_obs"] = fit.n_obs;
    j["rmse"] = q9(fit.rmse);
    j["rank_ok"] = fit.rank_ok;
    json se = json::array();
    for (double s : fit.coef_stderr) se.push_back(q9(s));
    j["coef_stderr"] = std::move(se);
    j["condition"] = q9(fit.condition);
    return j;
}

json trend_to_json(const TrendResult& t) {
    json j;
    j["method"] = to_string(t.method);
    j["slope"] = q9(t.slope);
    j["intercept"] = q9(t.intercept);
    j["s_statistic"] = t.s_statistic;
    j["tau"] = q9(t.tau);
    j["p_value"] = q9(t.p_value);
    j["rmse"] = q9(t.rmse);
    j["direction"] = to_string(t.direction);
    j["alpha"] = q9(t.alpha);
    return j;
}

json site_to_json(const Site& s) {
    json j;
    j["id"] = s.id;
    j["name"] = s.name;
    j["operator"] = s.operator_name;
    j["status"] = to_string(s.status);
    j["lat"] = q9(s.lat);
    j["lon"] = q9(s.lon);
    json aoi;
    if (const CircleAoi* c = std::get_if<CircleAoi>(&s.aoi)) {
        aoi["kind"] = "circle";
        aoi["radius_m"] = q9(c->radius_m);
    } else {
        const BboxAoi& b = std::get<BboxAoi>(s.aoi);
        aoi["kind"] = "bbox";
        aoi["min_lon"] = q9(b.min_lon);
        aoi["min_lat"] = q9(b.min_lat);
        aoi["max_lon"] = q9(b.max_lon);
        aoi["max_lat"] = q9(b.max_lat);
    }
    j["aoi"] = std::move(aoi);
    j["zone_id"] = s.zone_id;
    return j;
}

json ntl_to_json(const NtlSection& n) {
    json j;
    json annual = json::object();
    for (const auto& [year, value] : n.annual) annual[std::to_string(year)] = q9(value);
    j["annual"] = std::move(annual);
    j["ratio"] = q9(n.ratio);
    j["baseline_year"] = n.baseline_year;
    j["target_year"] = n.target_year;
    j["dip_years"] = n.dip_years;
    j["trend"] = trend_to_json(n.trend);
    return j;
}

json energy_to_json(const EnergySection& e) {
    json j;
    j["zone_id"] = e.zone_id;
    j["year"] = e.year;
    j["carbon_intensity_gco2_kwh"] = q9(e.carbon_intensity);
    if (e.low_carbon_fraction) j["low_carbon_fraction"] = q9(*e.low_carbon_fraction);
    if (e.renewable_fraction) j["renewable_fraction"] = q9(*e.renewable_fraction);
    if (e.fleet) {
        json f;
        f["mean_gco2_per_kwh"] = q9(e.fleet->mean_gco2_per_kwh);
        f["n_matched"] = e.fleet->n_matched;
        f["unmatched_site_ids"] = e.fleet->unmatched_site_ids;
        json fb = json::array();
        for (const auto& [id, year] : e.fleet->fallback_years)
            fb.push_back(json::array({id, year}));
        f["fallback_years"] = std::move(fb);
        j["fleet"] = std::move(f);
    }
    return j;
}

// ---- JSON -> section ----------------------------------------------------

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw ValidationError("report JSON", where, what);
}

const json& need(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) schema_error(where, std::string("missing key '") + key + "'");
    return *it;
}

HarmonicFit fit_from_json(const json& j) {
    HarmonicFit fit;
    fit.mu = need(j, "mu", "fit").get<double>();
    fit.alpha1 = need(j, "alpha1", "fit").get<double>();
    fit.alpha2 = need(j, "alpha2", "fit").get<double>();
    if (j.contains("beta")) fit.beta = j["beta"].get<double>();
    fit.period_days = need(j, "period_days", "fit").get<double>();
    fit.n_obs = need(j, "n_obs", "fit").get<int>();
    fit.rmse = need(j, "rmse", "fit").get<double>();
    fit.rank_ok = need(j, "rank_ok", "fit").get<bool>();
    for (const auto& s : need(j, "coef_stderr", "fit"))
        fit.coef_stderr.push_back(s.get<double>());
    fit.condition = need(j, "condition", "fit").get<double>();
    return fit;
}

TrendResult trend_from_json(const json& j) {
    TrendResult t;
    std::string method = need(j, "method", "trend").get<std::string>();
    if (method == "mann_kendall") t.method = TrendMethod::mann_kendall;
    else if (method == "ols") t.method = TrendMethod::ols;
    else schema_error("trend", "unknown method '" + method + "'");
    t.slope = need(j, "slope", "trend").get<double>();
    t.intercept = need(j, "intercept", "trend").get<double>();
    t.s_statistic = need(j, "s_statistic", "trend").get<long long>();
    t.tau = need(j, "tau", "trend").get<double>();
    t.p_value = need(j, "p_value", "trend").get<double>();
    t.rmse = need(j, "rmse", "trend").get<double>();
    std::string direction = need(j, "direction", "trend").get<std::string>();
    if (direction == "increasing") t.direction = TrendDirection::increasing;
    else if (direction == "decreasing") t.direction = TrendDirection::decreasing;
    else if (direction == "none") t.direction = TrendDirection::none;
    else schema_error("trend", "unknown direction '" + direction + "'");
    t.alpha = need(j, "alpha", "trend").get<double>();
    return t;
}

Site site_from_json(const json& j) {
    Site s;
    s.id = need(j, "id", "site").get<std::string>();
    s.name = need(j, "name", "site").get<std::string>();
    s.operator_name = need(j, "operator", "site").get<std::string>();
    std::string status = need(j, "status", "site").get<std::string>();
    if (status == "existing") s.status = SiteStatus::existing;
    else if (status == "proposed") s.status = SiteStatus::proposed;
    else schema_error("site", "unknown status '" + status + "'");
    s.lat = need(j, "lat", "site").get<double>();
    s.lon = need(j, "lon", "site").get<double>();
    const json& aoi = need(j, "aoi", "site");
    std::string kind = need(aoi, "kind", "aoi").get<std::string>();
    if (kind == "circle") {
        s.aoi = CircleAoi{need(aoi, "radius_m", "aoi").get<double>()};
    } else if (kind == "bbox") {
        s.aoi = BboxAoi{need(aoi, "min_lon", "aoi").get<double>(),
                        need(aoi, "min_lat", "aoi").get<double>(),
                        need(aoi, "max_lon", "aoi").get<double>(),
                        need(aoi, "max_lat", "aoi").get<double>()};
    } else {
        schema_error("aoi", "unknown kind '" + kind + "'");
    }
    s.zone_id = need(j, "zone_id", "site").get<std::string>();
    return s;
}

NtlSection ntl_from_json(const json& j) {
    NtlSection n;
    for (const auto& [key, value] : need(j, "annual", "ntl").items())
        n.annual.emplace_back(std::stoi(key), value.get<double>());
    std::sort(n.annual.begin(), n.annual.end());
    n.ratio = need(j, "ratio", "ntl").get<double>();
    n.baseline_year = need(j, "baseline_year", "ntl").get<int>();
    n.target_year = need(j, "target_year", "ntl").get<int>();
    for (const auto& y : need(j, "dip_years", "ntl")) n.dip_years.push_back(y.get<int>());
    n.trend = trend_from_json(need(j, "trend", "ntl"));
    return n;
}

EnergySection energy_from_json(const json& j) {
    EnergySection e;
    e.zone_id = need(j, "zone_id", "energy").get<std::string>();
    e.year = need(j, "year", "energy").get<int>();
    e.carbon_intensity = need(j, "carbon_intensity_gco2_kwh", "energy").get<double>();
    if (j.contains("low_carbon_fraction"))
        e.low_carbon_fraction = j["low_carbon_fraction"].get<double>();
    if (j.contains("renewable_fraction"))
        e.renewable_fraction = j["renewable_fraction"].get<double>();
    if (j.contains("fleet")) {
        const json& f = j["fleet"];
        FleetIntensity fleet;
        fleet.mean_gco2_per_kwh = need(f, "mean_gco2_per_kwh", "fleet").get<double>();
        fleet.n_matched = need(f, "n_matched", "fleet").get<int>();
        for (const auto& id : need(f, "unmatched_site_ids", "fleet"))
            fleet.unmatched_site_ids.push_back(id.get<std::string>());
        for (const auto& pair : need(f, "fallback_years", "fleet")) {
            if (!pair.is_array() || pair.size() != 2)
                schema_error("fleet", "fallback_years entries must be [site_id, year]");
            fleet.fallback_years.emplace_back(pair[0].get<std::string>(), pair[1].get<int>());
        }
        e.fleet = std::move(fleet);
    }
    return e;
}

// ---- quantization of a whole report --------------------------------------

HarmonicFit quantize(HarmonicFit fit) {
    fit.mu = q9(fit.mu);
    fit.alpha1 = q9(fit.alpha1);
    fit.alpha2 = q9(fit.alpha2);
    if (fit.beta) fit.beta = q9(*fit.beta);
    fit.period_days = q9(fit.period_days);
    fit.rmse = q9(fit.rmse);
    for (double& s : fit.coef_stderr) s = q9(s);
    fit.condition = q9(fit.condition);
    return fit;
}

TrendResult quantize(TrendResult t) {
    t.slope = q9(t.slope);
    t.intercept = q9(t.intercept);
    t.tau = q9(t.tau);
    t.p_value = q9(t.p_value);
    t.rmse = q9(t.rmse);
    t.alpha = q9(t.alpha);
    return t;
}

Site quantize(Site s) {
    s.lat = q9(s.lat);
    s.lon = q9(s.lon);
    if (CircleAoi* c = std::get_if<CircleAoi>(&s.aoi)) {
        c->radius_m = q9(c->radius_m);
    } else {
        BboxAoi& b = std::get<BboxAoi>(s.aoi);
        b.min_lon = q9(b.min_lon);
        b.min_lat = q9(b.min_lat);
        b.max_lon = q9(b.max_lon);
        b.max_lat = q9(b.max_lat);
    }
    return s;
}

} // namespace

SiteReport build_report(const Site& site, std::optional<NdviSection> ndvi,
                        std::optional<NtlSection> ntl, std::optional<UvaiSection> uvai,
                        std::optional<EnergySection> energy, const ReportOptions& opts,
                        std::string generated_at) {
    if (!ndvi && !ntl && !uvai && !energy) throw NoAnalyses();

    SiteReport report;
    report.site = quantize(site);
    if (ndvi) {
        ndvi->fit = quantize(ndvi->fit);
        ndvi->trend = quantize(ndvi->trend);
    }
    if (ntl) {
        for (auto& [year, value] : ntl->annual) value = q9(value);
        ntl->ratio = q9(ntl->ratio);
        ntl->trend = quantize(ntl->trend);
    }
    if (uvai) uvai->trend = quantize(uvai->trend);
    if (energy) {
        energy->carbon_intensity = q9(energy->carbon_intensity);
        if (energy->low_carbon_fraction)
            energy->low_carbon_fraction = q9(*energy->low_carbon_fraction);
        if (energy->renewable_fraction)
            energy->renewable_fraction = q9(*energy->renewable_fraction);
        if (energy->fleet) energy->fleet->mean_gco2_per_kwh = q9(energy->fleet->mean_gco2_per_kwh);
    }
    report.ndvi = std::move(ndvi);
    report.ntl = std::move(ntl);
    report.uvai = std::move(uvai);
    report.energy = std::move(energy);

    if (report.ndvi && report.ndvi->trend.direction == TrendDirection::decreasing)
        report.flags.push_back("vegetation-decline");
    if (report.ntl && report.ntl->ratio >= opts.surge_threshold)
        report.flags.push_back("ntl-surge");
    if (report.uvai && report.uvai->trend.direction == TrendDirection::increasing)
        report.flags.push_back("uvai-increase");

    report.generated_at = std::move(generated_at);
    report.tool_version = kVersion;
    return report;
}

std::string render_json(const SiteReport& report) {
    json j;
    j["site"] = site_to_json(report.site);
    if (report.ndvi) {
        json n;
        n["fit"] = fit_to_json(report.ndvi->fit);
        n["trend"] = trend_to_json(report.ndvi->trend);
        j["ndvi"] = std::move(n);
    }
    if (report.ntl) j["ntl"] = ntl_to_json(*report.ntl);
    if (report.uvai) j["uvai"] = json{{"trend", trend_to_json(report.uvai->trend)}};
    if (report.energy) j["energy"] = energy_to_json(*report.energy);
    j["flags"] = report.flags;
    j["generated_at"] = report.generated_at;
    j["tool_version"] = report.tool_version;
    return j.dump(2) + "\n";
}

SiteReport parse_report(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("report JSON", "document", e.what());
    }
    SiteReport report;
    report.site = site_from_json(need(j, "site", "report"));
    if (j.contains("ndvi")) {
        NdviSection n;
        n.fit = fit_from_json(need(j["ndvi"], "fit", "ndvi"));
        n.trend = trend_from_json(need(j["ndvi"], "trend", "ndvi"));
        report.ndvi = std::move(n);
    }
    if (j.contains("ntl")) report.ntl = ntl_from_json(j["ntl"]);
    if (j.contains("uvai")) {
        UvaiSection u;
        u.trend = trend_from_json(need(j["uvai"], "trend", "uvai"));
        report.uvai = std::move(u);
    }
    if (j.contains("energy")) report.energy = energy_from_json(j["energy"]);
    for (const auto& f : need(j, "flags", "report"))
        report.flags.push_back(f.get<std::string>());
    report.generated_at = need(j, "generated_at", "report").get<std::string>();
    report.tool_version = need(j, "tool_version", "report").get<std::string>();
    return report;
}

std::string render_fit_json(const HarmonicFit& fit) {
    return fit_to_json(quantize(fit)).dump(2) + "\n";
}

std::string render_trend_json(const TrendResult& trend) {
    return trend_to_json(quantize(trend)).dump(2) + "\n";
}

// ---- SVG plot ------------------------------------------------------------

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c; break;
        }
    }
    return out;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const char* axis_label(const ObservationSeries& series) {
    switch (series.variable) {
    case Variable::ndvi: return "NDVI";
    case Variable::ntl_radiance: return "NTL radiance (nW/cm^2/sr)";
    case Variable::uvai: return "UVAI";
    case Variable::other: return nullptr;
    }
    return nullptr;
}

} // namespace

std::string render_svg_timeseries(const ObservationSeries& series, const HarmonicFit* fit,
                                  std::string_view title) {
    if (series.empty()) throw EmptySeries();

    constexpr double kWidth = 800, kHeight = 420;
    constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double t_min = series.obs.front().t, t_max = series.obs.front().t;
    double v_min = series.obs.front().value, v_max = series.obs.front().value;
    for (const Observation& o : series.obs) {
        t_min = std::min(t_min, o.t);
        t_max = std::max(t_max, o.t);
        v_min = std::min(v_min, o.value);
        v_max = std::max(v_max, o.value);
    }
    const int kCurveSamples = 160;
    std::vector<std::pair<double, double>> curve;
    if (fit) {
        for (int i = 0; i < kCurveSamples; ++i) {
            double t = t_min + (t_max - t_min) * double(i) / double(kCurveSamples - 1);
            double v = predict(*fit, t);
            curve.emplace_back(t, v);
            v_min = std::min(v_min, v);
            v_max = std::max(v_max, v);
        }
    }
    if (t_max == t_min) { t_min -= 1.0; t_max += 1.0; }
    double v_pad = (v_max - v_min) * 0.05;
    if (v_pad == 0.0) v_pad = std::abs(v_max) * 0.05 + 0.5;
    v_min -= v_pad;
    v_max += v_pad;

    auto sx = [&](double t) { return kLeft + (t - t_min) / (t_max - t_min) * plot_w; };
    auto sy = [&](double v) { return kTop + (v_max - v) / (v_max - v_min) * plot_h; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"420\" "
           "viewBox=\"0 0 800 420\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"420\" fill=\"white\"/>\n";
    svg += "  <text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           xml_escape(title) + "</text>\n";

    // Axes.
    svg += "  <line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(kTop + plot_h) + "\" x2=\"" +
           fixed2(kLeft + plot_w) + "\" y2=\"" + fixed2(kTop + plot_h) +
           "\" stroke=\"black\"/>\n";
    svg += "  <line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(kTop) + "\" x2=\"" +
           fixed2(kLeft) + "\" y2=\"" + fixed2(kTop + plot_h) + "\" stroke=\"black\"/>\n";

    const int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        double f = double(i) / kTicks;
        double t = t_min + f * (t_max - t_min);
        double x = sx(t);
        svg += "  <line x1=\"" + fixed2(x) + "\" y1=\"" + fixed2(kTop + plot_h) + "\" x2=\"" +
               fixed2(x) + "\" y2=\"" + fixed2(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
        svg += "  <text x=\"" + fixed2(x) + "\" y=\"" + fixed2(kTop + plot_h + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               xml_escape(tick_label(t)) + "</text>\n";
        double v = v_min + f * (v_max - v_min);
        double y = sy(v);
        svg += "  <line x1=\"" + fixed2(kLeft - 5) + "\" y1=\"" + fixed2(y) + "\" x2=\"" +
               fixed2(kLeft) + "\" y2=\"" + fixed2(y) + "\" stroke=\"black\"/>\n";
        svg += "  <text x=\"" + fixed2(kLeft - 8) + "\" y=\"" + fixed2(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               xml_escape(tick_label(v)) + "</text>\n";
    }

    std::string x_label = "t (days since " + to_iso(series.epoch) + ")";
    svg += "  <text x=\"" + fixed2(kLeft + plot_w / 2) + "\" y=\"" + fixed2(kHeight - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           xml_escape(x_label) + "</text>\n";
    const char* named = axis_label(series);
    std::string y_label = named ? named : (series.label.empty() ? "value" : series.label);
    svg += "  <text x=\"16\" y=\"" + fixed2(kTop + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " +
           fixed2(kTop + plot_h / 2) + ")\">" + xml_escape(y_label) + "</text>\n";

    if (fit) {
        std::string d;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            d += i == 0 ? "M" : " L";
            d += fixed2(sx(curve[i].first)) + "," + fixed2(sy(curve[i].second));
        }
        svg += "  <path d=\"" + d + "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    }
    for (const Observation& o : series.obs) {
        svg += "  <circle cx=\"" + fixed2(sx(o.t)) + "\" cy=\"" + fixed2(sy(o.value)) +
               "\" r=\"3\" fill=\"#2c3e50\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

// ---- equality -------------------------------------------------------------

bool operator==(const HarmonicFit& a, const HarmonicFit& b) {
    return a.mu == b.mu && a.alpha1 == b.alpha1 && a.alpha2 == b.alpha2 && a.beta == b.beta &&
           a.period_days == b.period_days && a.n_obs == b.n_obs && a.rmse == b.rmse &&
           a.rank_ok == b.rank_ok && a.coef_stderr == b.coef_stderr &&
           a.condition == b.condition;
}

bool operator==(const TrendResult& a, const TrendResult& b) {
    return a.method == b.method && a.slope == b.slope && a.intercept == b.intercept &&
           a.s_statistic == b.s_statistic && a.tau == b.tau && a.p_value == b.p_value &&
           a.rmse == b.rmse && a.direction == b.direction && a.alpha == b.alpha;
}

bool operator==(const FleetIntensity& a, const FleetIntensity& b) {
    return a.mean_gco2_per_kwh == b.mean_gco2_per_kwh && a.n_matched == b.n_matched &&
           a.unmatched_site_ids == b.unmatched_site_ids && a.fallback_years == b.fallback_years;
}

bool operator==(const Site& a, const Site& b) {
    if (a.id != b.id || a.name != b.name || a.operator_name != b.operator_name ||
        a.status != b.status || a.lat != b.lat || a.lon != b.lon || a.zone_id != b.zone_id)
        return false;
    if (a.aoi.index() != b.aoi.index()) return false;
    if (const CircleAoi* ca = std::get_if<CircleAoi>(&a.aoi)) {
        return ca->radius_m == std::get<CircleAoi>(b.aoi).radius_m;
    }
    const BboxAoi& ba = std::get<BboxAoi>(a.aoi);
    const BboxAoi& bb = std::get<BboxAoi>(b.aoi);
    return ba.min_lon == bb.min_lon && ba.min_lat == bb.min_lat && ba.max_lon == bb.max_lon &&
           ba.max_lat == bb.max_lat;
}

bool operator==(const NdviSection& a, const NdviSection& b) {
    return a.fit == b.fit && a.trend == b.trend;
}

bool operator==(const NtlSection& a, const NtlSection& b) {
    return a.annual == b.annual && a.ratio == b.ratio && a.baseline_year == b.baseline_year &&
           a.target_year == b.target_year && a.dip_years == b.dip_years && a.trend == b.trend;
}

bool operator==(const UvaiSection& a, const UvaiSection& b) { return a.trend == b.trend; }

bool operator==(const EnergySection& a, const EnergySection& b) {
    return a.zone_id == b.zone_id && a.year == b.year &&
           a.carbon_intensity == b.carbon_intensity &&
           a.low_carbon_fraction == b.low_carbon_fraction &&
           a.renewable_fraction == b.renewable_fraction && a.fleet == b.fleet;
}

bool operator==(const SiteReport& a, const SiteReport& b) {
    return a.site == b.site && a.ndvi == b.ndvi && a.ntl == b.ntl && a.uvai == b.uvai &&
           a.energy == b.energy && a.flags == b.flags && a.generated_at == b.generated_at &&
           a.tool_version == b.tool_version;
}

} // namespace sitewatch
