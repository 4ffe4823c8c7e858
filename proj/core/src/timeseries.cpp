#include "sitewatch/timeseries.hpp"

#include "sitewatch/errors.hpp"
#include "csv.hpp"
#include "fmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>

namespace sitewatch {

const char* to_string(Variable v) {
    switch (v) {
    case Variable::ndvi: return "ndvi";
    case Variable::ntl_radiance: return "ntl_radiance";
    case Variable::uvai: return "uvai";
    case Variable::other: return "other";
    }
    return "other";
}

const char* to_string(TrendMethod m) {
    return m == TrendMethod::mann_kendall ? "mann_kendall" : "ols";
}

const char* to_string(TrendDirection d) {
    switch (d) {
    case TrendDirection::increasing: return "increasing";
    case TrendDirection::decreasing: return "decreasing";
    case TrendDirection::none: return "none";
    }
    return "none";
}

void ObservationSeries::sort_by_time() {
    std::stable_sort(obs.begin(), obs.end(),
                     [](const Observation& a, const Observation& b) { return a.t < b.t; });
}

namespace {

void check_observations(const ObservationSeries& series) {
    for (const Observation& o : series.obs) {
        if (!std::isfinite(o.value))
            throw ValidationError("observation value must be finite");
        if (!(o.weight > 0) || !std::isfinite(o.weight))
            throw ValidationError("observation weight must be positive and finite");
        if (!std::isfinite(o.t)) throw ValidationError("observation time must be finite");
    }
}

// ---- small dense linear algebra (k <= 4 columns) ------------------------

// Condition estimate of the equilibrated design: square root of the
// eigenvalue ratio of M = A^T A, eigenvalues by cyclic Jacobi rotations.
double condition_from_normal(std::vector<double> m, int k) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) off += m[i * k + j] * m[i * k + j];
        if (off < 1e-30) break;
        for (int p = 0; p < k; ++p) {
            for (int q = p + 1; q < k; ++q) {
                double apq = m[p * k + q];
                if (apq == 0.0) continue;
                double app = m[p * k + p], aqq = m[q * k + q];
                double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                double c = std::cos(theta), s = std::sin(theta);
                for (int i = 0; i < k; ++i) {
                    double mip = m[i * k + p], miq = m[i * k + q];
                    m[i * k + p] = c * mip - s * miq;
                    m[i * k + q] = s * mip + c * miq;
                }
                for (int i = 0; i < k; ++i) {
                    double mpi = m[p * k + i], mqi = m[q * k + i];
                    m[p * k + i] = c * mpi - s * mqi;
                    m[q * k + i] = s * mpi + c * mqi;
                }
            }
        }
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < k; ++i) {
        lo = std::min(lo, m[i * k + i]);
        hi = std::max(hi, m[i * k + i]);
    }
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(hi / lo);
}

struct LeastSquares {
    std::vector<double> coef;    // k solution entries
    std::vector<double> se;      // k standard errors (0 when dof = 0)
    double rmse = 0.0;           // sqrt(sum w r^2 / sum w)
    double condition = 0.0;
};

// Weighted least squares via Householder QR on the column-equilibrated
// design. a is row-major n x k; throws RankDeficient past condition 1e10.
LeastSquares solve_least_squares(std::vector<double> a, std::vector<double> b,
                                 const std::vector<double>& w, int n, int k) {
    // Fold the weights in: scale row i by sqrt(w_i).
    for (int i = 0; i < n; ++i) {
        double s = std::sqrt(w[i]);
        for (int j = 0; j < k; ++j) a[i * k + j] *= s;
        b[i] *= s;
    }

    // Equilibrate columns to unit Euclidean norm.
    std::vector<double> col_norm(k, 0.0);
    for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[i * k + j] * a[i * k + j];
        col_norm[j] = std::sqrt(s);
        if (!(col_norm[j] > 0.0))
            throw RankDeficient(std::numeric_limits<double>::infinity());
        for (int i = 0; i < n; ++i) a[i * k + j] /= col_norm[j];
    }

    // Condition estimate from the equilibrated normal matrix.
    std::vector<double> m(static_cast<std::size_t>(k) * k, 0.0);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += a[i * k + p] * a[i * k + q];
            m[p * k + q] = s;
        }
    double condition = condition_from_normal(m, k);
    if (!(condition < 1e10)) throw RankDeficient(condition);

    // Householder QR, applying the reflectors to b as we go.
    std::vector<double> r(static_cast<std::size_t>(k) * k, 0.0);
    for (int j = 0; j < k; ++j) {
        double norm = 0.0;
        for (int i = j; i < n; ++i) norm += a[i * k + j] * a[i * k + j];
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) throw RankDeficient(std::numeric_limits<double>::infinity());
        double alpha = a[j * k + j] > 0 ? -norm : norm;
        std::vector<double> v(n - j, 0.0);
        v[0] = a[j * k + j] - alpha;
        for (int i = j + 1; i < n; ++i) v[i - j] = a[i * k + j];
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 > 0.0) {
            for (int col = j; col < k; ++col) {
                double dot = 0.0;
                for (int i = j; i < n; ++i) dot += v[i - j] * a[i * k + col];
                double f = 2.0 * dot / vnorm2;
                for (int i = j; i < n; ++i) a[i * k + col] -= f * v[i - j];
            }
            double dot = 0.0;
            for (int i = j; i < n; ++i) dot += v[i - j] * b[i];
            double f = 2.0 * dot / vnorm2;
            for (int i = j; i < n; ++i) b[i] -= f * v[i - j];
        }
        for (int col = j; col < k; ++col) r[j * k + col] = a[j * k + col];
    }

    // Back substitution on R x = (Q^T b)[0..k).
    std::vector<double> x(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < k; ++j) s -= r[i * k + j] * x[j];
        if (r[i * k + i] == 0.0)
            throw RankDeficient(std::numeric_limits<double>::infinity());
        x[i] = s / r[i * k + i];
    }

    // Residual sum of squares is the leftover tail of Q^T b.
    double ssr = 0.0;
    for (int i = k; i < n; ++i) ssr += b[i] * b[i];
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) wsum += w[i];

    LeastSquares out;
    out.condition = condition;
    out.coef.resize(k);
    for (int j = 0; j < k; ++j) out.coef[j] = x[j] / col_norm[j];
    out.rmse = wsum > 0 ? std::sqrt(std::max(0.0, ssr) / wsum) : 0.0;

    // Standard errors: sigma^2 diag((A^T W A)^-1), via R^-1 of the
    // equilibrated system and the column scaling.
    out.se.assign(k, 0.0);
    if (n > k) {
        double sigma2 = ssr / (n - k);
        // (A^T A)^-1 = R^-1 R^-T, so its diagonal is the squared row norms
        // of R^-1; invert the small triangular factor column by column.
        std::vector<double> rinv(static_cast<std::size_t>(k) * k, 0.0);
        for (int j = 0; j < k; ++j) {
            for (int i = j; i >= 0; --i) {
                double s = (i == j) ? 1.0 : 0.0;
                for (int l = i + 1; l <= j; ++l) s -= r[i * k + l] * rinv[l * k + j];
                rinv[i * k + j] = s / r[i * k + i];
            }
        }
        for (int j = 0; j < k; ++j) {
            double s = 0.0;
            for (int l = j; l < k; ++l) s += rinv[j * k + l] * rinv[j * k + l];
            out.se[j] = std::sqrt(sigma2 * s) / col_norm[j];
        }
    }
    return out;
}

} // namespace

HarmonicFit fit_harmonic(const ObservationSeries& series, bool include_trend,
                         double period_days) {
    if (!(period_days > 0)) throw ValidationError("period_days must be positive");
    check_observations(series);
    int k = include_trend ? 4 : 3;
    int n = static_cast<int>(series.size());
    if (n < k) throw InsufficientData("harmonic fit", n, k);

    std::vector<double> a(static_cast<std::size_t>(n) * k);
    std::vector<double> b(n), w(n);
    const double omega = 2.0 * std::numbers::pi / period_days;
    for (int i = 0; i < n; ++i) {
        const Observation& o = series.obs[i];
        a[i * k + 0] = 1.0;
        a[i * k + 1] = std::cos(omega * o.t);
        a[i * k + 2] = std::sin(omega * o.t);
        if (include_trend) a[i * k + 3] = o.t;
        b[i] = o.value;
        w[i] = o.weight;
    }

    LeastSquares ls = solve_least_squares(std::move(a), std::move(b), w, n, k);

    HarmonicFit fit;
    fit.mu = ls.coef[0];
    fit.alpha1 = ls.coef[1];
    fit.alpha2 = ls.coef[2];
    if (include_trend) fit.beta = ls.coef[3];
    fit.period_days = period_days;
    fit.n_obs = n;
    fit.rmse = ls.rmse;
    fit.rank_ok = true;
    fit.coef_stderr = ls.se;
    fit.condition = ls.condition;
    return fit;
}

double predict(const HarmonicFit& fit, double t) {
    const double omega = 2.0 * std::numbers::pi / fit.period_days;
    double v = fit.mu + fit.alpha1 * std::cos(omega * t) + fit.alpha2 * std::sin(omega * t);
    if (fit.beta) v += *fit.beta * t;
    return v;
}

TrendResult mann_kendall(const ObservationSeries& series, double alpha) {
    check_observations(series);
    std::size_t n = series.size();
    if (n < 2) throw InsufficientData("Mann-Kendall test", n, 2);

    long long s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = series.obs[j].value - series.obs[i].value;
            if (d > 0) ++s;
            else if (d < 0) --s;
        }
    }
    double pairs = 0.5 * double(n) * double(n - 1);

    // Tie correction over groups of equal values.
    std::map<double, std::size_t> groups;
    for (const Observation& o : series.obs) ++groups[o.value];
    double var = double(n) * double(n - 1) * double(2 * n + 5);
    for (const auto& [value, count] : groups) {
        if (count > 1)
            var -= double(count) * double(count - 1) * double(2 * count + 5);
    }
    var /= 18.0;

    TrendResult res;
    res.method = TrendMethod::mann_kendall;
    res.alpha = alpha;
    res.s_statistic = s;
    res.tau = pairs > 0 ? double(s) / pairs : 0.0;

    // Sen's slope: median pairwise slope over pairs with distinct times.
    std::vector<double> slopes;
    slopes.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dt = series.obs[j].t - series.obs[i].t;
            if (dt != 0.0)
                slopes.push_back((series.obs[j].value - series.obs[i].value) / dt);
        }
    }
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        std::size_t m = slopes.size();
        res.slope = m % 2 ? slopes[m / 2] : 0.5 * (slopes[m / 2 - 1] + slopes[m / 2]);
    }

    if (n < 4 || !(var > 0)) {
        res.p_value = 1.0;
        res.direction = TrendDirection::none;
        return res;
    }
    double z;
    if (s > 0) z = (double(s) - 1.0) / std::sqrt(var);
    else if (s < 0) z = (double(s) + 1.0) / std::sqrt(var);
    else z = 0.0;
    res.p_value = std::erfc(std::abs(z) / std::numbers::sqrt2);
    if (res.p_value < alpha)
        res.direction = s > 0 ? TrendDirection::increasing : TrendDirection::decreasing;
    else
        res.direction = TrendDirection::none;
    return res;
}

TrendResult ols_slope(const ObservationSeries& series, double alpha) {
    check_observations(series);
    std::size_t n = series.size();
    if (n < 3) throw InsufficientData("OLS slope", n, 3);

    double t_mean = 0.0, v_mean = 0.0;
    for (const Observation& o : series.obs) {
        t_mean += o.t;
        v_mean += o.value;
    }
    t_mean /= double(n);
    v_mean /= double(n);

    double stt = 0.0, stv = 0.0;
    for (const Observation& o : series.obs) {
        stt += (o.t - t_mean) * (o.t - t_mean);
        stv += (o.t - t_mean) * (o.value - v_mean);
    }
    if (stt == 0.0) throw DegenerateAbscissa();

    TrendResult res;
    res.method = TrendMethod::ols;
    res.alpha = alpha;
    res.slope = stv / stt;
    res.intercept = v_mean - res.slope * t_mean;

    double ssr = 0.0;
    for (const Observation& o : series.obs) {
        double r = o.value - (res.intercept + res.slope * o.t);
        ssr += r * r;
    }
    res.rmse = std::sqrt(ssr / double(n));
    double se2 = ssr / double(n - 2) / stt;
    if (se2 > 0.0) {
        double t_stat = res.slope / std::sqrt(se2);
        res.p_value = student_t_two_sided_p(t_stat, double(n - 2));
    } else {
        res.p_value = res.slope == 0.0 ? 1.0 : 0.0;
    }
    if (res.p_value < alpha)
        res.direction = res.slope > 0 ? TrendDirection::increasing : TrendDirection::decreasing;
    else
        res.direction = TrendDirection::none;
    return res;
}

ObservationSeries annual_aggregate(const ObservationSeries& series, AnnualStatistic stat) {
    check_observations(series);
    std::map<int, std::vector<double>> by_year;
    for (const Observation& o : series.obs)
        by_year[year_of(series.epoch, o.t)].push_back(o.value);

    ObservationSeries out;
    out.variable = series.variable;
    out.label = series.label;
    out.epoch = series.epoch;
    for (auto& [year, values] : by_year) {
        double v;
        if (stat == AnnualStatistic::mean) {
            double s = 0.0;
            for (double x : values) s += x;
            v = s / double(values.size());
        } else {
            std::sort(values.begin(), values.end());
            std::size_t m = values.size();
            v = m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
        }
        out.obs.push_back({midyear_t(series.epoch, year), v, 1.0});
    }
    return out;
}

namespace {

// Map an annual series to (year, value) pairs in ascending year order.
std::vector<std::pair<int, double>> annual_pairs(const ObservationSeries& annual) {
    std::vector<std::pair<int, double>> out;
    for (const Observation& o : annual.obs)
        out.emplace_back(year_of(annual.epoch, o.t), o.value);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

double change_ratio(const ObservationSeries& annual, int baseline_year, int target_year) {
    auto pairs = annual_pairs(annual);
    auto find = [&](int year) -> double {
        for (const auto& [y, v] : pairs)
            if (y == year) return v;
        throw MissingYear(year);
    };
    double baseline = find(baseline_year);
    double target = find(target_year);
    if (!(baseline > 0)) throw NonpositiveBaseline(baseline);
    return target / baseline;
}

std::vector<int> detect_dips(const ObservationSeries& annual) {
    auto pairs = annual_pairs(annual);
    if (pairs.size() < 3) throw InsufficientData("dip detection", pairs.size(), 3);
    std::vector<int> dips;
    for (std::size_t i = 1; i + 1 < pairs.size(); ++i) {
        if (pairs[i].second < pairs[i - 1].second && pairs[i].second < pairs[i + 1].second)
            dips.push_back(pairs[i].first);
    }
    return dips;
}

ObservationSeries read_series_csv(std::string_view text, Variable variable, CivilDate epoch) {
    auto rows = detail::parse_csv(text);
    if (rows.empty()) throw ValidationError("series CSV", "header", "missing header row");
    const auto& header = rows[0];
    bool has_weight;
    if (header.size() == 3 && header[0] == "t_days" && header[1] == "value" &&
        header[2] == "weight")
        has_weight = true;
    else if (header.size() == 2 && header[0] == "t_days" && header[1] == "value")
        has_weight = false;
    else
        throw ValidationError("series CSV", "header",
                              "expected 't_days,value[,weight]'");

    ObservationSeries out;
    out.variable = variable;
    out.epoch = epoch;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() == 1 && row[0].empty()) continue;
        std::string record = "series CSV row " + std::to_string(i + 1);
        if (row.size() != header.size())
            throw ValidationError(record, "row", "wrong field count");
        auto parse = [&](const std::string& s, const char* field) {
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (end != s.c_str() + s.size() || s.empty())
                throw ValidationError(record, field, "not a number: '" + s + "'");
            return v;
        };
        Observation o;
        o.t = parse(row[0], "t_days");
        o.value = parse(row[1], "value");
        o.weight = has_weight ? parse(row[2], "weight") : 1.0;
        if (!(o.weight > 0)) throw ValidationError(record, "weight", "must be positive");
        out.obs.push_back(o);
    }
    out.sort_by_time();
    return out;
}

std::string write_series_csv(const ObservationSeries& series) {
    std::string out = "t_days,value,weight\n";
    for (const Observation& o : series.obs) {
        out += detail::to_shortest(o.t);
        out += ',';
        out += detail::to_shortest(o.value);
        out += ',';
        out += detail::to_shortest(o.weight);
        out += '\n';
    }
    return out;
}

// Regularized incomplete beta via Lentz's continued fraction; standard
// formulation (Numerical Recipes 6.4).
namespace {

double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-14;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

} // namespace

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0)) return 1.0;
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    double x = dof / (dof + t * t);
    return regularized_incomplete_beta(0.5 * dof, 0.5, x);
}

} // namespace sitewatch
