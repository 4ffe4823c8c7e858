#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sitewatch/date.hpp"

namespace sitewatch {

enum class Variable { ndvi, ntl_radiance, uvai, other };

const char* to_string(Variable v);

struct Observation {
    double t = 0.0;      // days since the series epoch
    double value = 0.0;
    double weight = 1.0; // > 0
};

// Sparse, irregular samples of one variable over one site AOI.
// obs is sorted ascending by t; duplicate t is allowed.
struct ObservationSeries {
    Variable variable = Variable::other;
    std::string label;       // free-form name for Variable::other
    CivilDate epoch;         // calendar date of t = 0
    std::vector<Observation> obs;

    std::size_t size() const { return obs.size(); }
    bool empty() const { return obs.empty(); }
    void sort_by_time();
};

// Estimated parameters of the seasonal model
//   value(t) = mu + beta*t + alpha1*cos(2*pi*t/N) + alpha2*sin(2*pi*t/N)
// (beta only when fitted with a trend).
struct HarmonicFit {
    double mu = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    std::optional<double> beta; // units per day
    double period_days = 365.0;
    int n_obs = 0;
    double rmse = 0.0;
    bool rank_ok = false;
    std::vector<double> coef_stderr; // per coefficient: mu, alpha1, alpha2[, beta]
    double condition = 0.0;          // condition estimate of the equilibrated design
};

enum class TrendMethod { mann_kendall, ols };
enum class TrendDirection { increasing, decreasing, none };

const char* to_string(TrendMethod m);
const char* to_string(TrendDirection d);

struct TrendResult {
    TrendMethod method = TrendMethod::mann_kendall;
    double slope = 0.0;          // units per day (Sen's slope or OLS slope)
    double intercept = 0.0;      // OLS only
    long long s_statistic = 0;   // Mann-Kendall only
    double tau = 0.0;            // Mann-Kendall only, in [-1, 1]
    double p_value = 1.0;        // in [0, 1]
    double rmse = 0.0;           // OLS only
    TrendDirection direction = TrendDirection::none;
    double alpha = 0.05;         // significance threshold used for direction
};

// Weighted OLS fit of the harmonic model. Requires n_obs >= 3 (>= 4 with
// trend) and a numerically full-rank design (condition estimate < 1e10,
// else RankDeficient carrying the estimate).
HarmonicFit fit_harmonic(const ObservationSeries& series, bool include_trend,
                         double period_days = 365.0);

// Evaluate the fitted expression at t. Requires fit.rank_ok.
double predict(const HarmonicFit& fit, double t);

// Nonparametric monotone trend test: S over all index pairs, tau = S/(n(n-1)/2),
// tie-corrected variance, +-1 continuity correction, Sen's slope. p_value is
// 1.0 when n < 4 (normal approximation needs n >= 4).
TrendResult mann_kendall(const ObservationSeries& series, double alpha = 0.05);

// Simple linear regression value ~ t; p-value from the slope t-statistic
// with n-2 degrees of freedom.
TrendResult ols_slope(const ObservationSeries& series, double alpha = 0.05);

enum class AnnualStatistic { mean, median };

// One observation per calendar year that has source observations, placed at
// mid-year; empty years are omitted, empty input yields empty output.
ObservationSeries annual_aggregate(const ObservationSeries& series, AnnualStatistic stat);

// value(target_year) / value(baseline_year) over an annual series.
double change_ratio(const ObservationSeries& annual, int baseline_year, int target_year);

// Years that are strict local minima against their neighboring available years.
std::vector<int> detect_dips(const ObservationSeries& annual);

// CSV with header "t_days,value,weight"; the weight column may be omitted.
ObservationSeries read_series_csv(std::string_view text, Variable variable = Variable::other,
                                  CivilDate epoch = {});
std::string write_series_csv(const ObservationSeries& series);

// Two-sided tail probability of Student's t with dof degrees of freedom.
// Exposed for reuse; computed via the regularized incomplete beta function.
double student_t_two_sided_p(double t, double dof);

} // namespace sitewatch
