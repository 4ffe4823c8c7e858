#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "helpers/oracles.hpp"
#include "sitewatch/errors.hpp"
#include "sitewatch/timeseries.hpp"

using namespace sitewatch;

namespace {

ObservationSeries make_series(const std::vector<double>& t, const std::vector<double>& v,
                              const std::vector<double>& w = {}) {
    ObservationSeries s;
    for (std::size_t i = 0; i < t.size(); ++i)
        s.obs.push_back({t[i], v[i], w.empty() ? 1.0 : w[i]});
    s.sort_by_time();
    return s;
}

// Design matrix mirroring fit_harmonic's column order.
std::vector<std::vector<double>> design(const ObservationSeries& s, double period,
                                        bool trend) {
    std::vector<std::vector<double>> a;
    for (const Observation& o : s.obs) a.push_back(oracle::harmonic_row(o.t, period, trend));
    return a;
}

std::vector<double> values_of(const ObservationSeries& s) {
    std::vector<double> v;
    for (const Observation& o : s.obs) v.push_back(o.value);
    return v;
}

std::vector<double> weights_of(const ObservationSeries& s) {
    std::vector<double> w;
    for (const Observation& o : s.obs) w.push_back(o.weight);
    return w;
}

std::vector<double> coefs_of(const HarmonicFit& f) {
    std::vector<double> c{f.mu, f.alpha1, f.alpha2};
    if (f.beta) c.push_back(*f.beta);
    return c;
}

} // namespace

TEST_SUITE("timeseries.fit") {

TEST_CASE("constant series recovers the constant exactly") {
    std::vector<double> t, v;
    for (int i = 0; i <= 14; ++i) {
        t.push_back(50.0 * i);
        v.push_back(0.5);
    }
    for (bool trend : {false, true}) {
        HarmonicFit fit = fit_harmonic(make_series(t, v), trend);
        CHECK(fit.rank_ok);
        CHECK(fit.mu == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::fabs(fit.alpha1) < 1e-12);
        CHECK(std::fabs(fit.alpha2) < 1e-12);
        if (trend) CHECK(std::fabs(*fit.beta) < 1e-15);
        CHECK(fit.rmse < 1e-12);
        CHECK(fit.n_obs == 15);
    }
}

TEST_CASE("pure cosine recovered to 1e-8") {
    std::vector<double> t, v;
    for (int i = 0; i < 730; ++i) {
        t.push_back(double(i));
        v.push_back(0.5 + 0.2 * std::cos(2.0 * std::numbers::pi * i / 365.0));
    }
    HarmonicFit fit = fit_harmonic(make_series(t, v), false);
    CHECK(std::fabs(fit.mu - 0.5) <= 1e-8);
    CHECK(std::fabs(fit.alpha1 - 0.2) <= 1e-8);
    CHECK(std::fabs(fit.alpha2) <= 1e-8);

    // cross-check against the independent normal-equations oracle
    ObservationSeries s = make_series(t, v);
    auto x = oracle::solve_normal_equations(design(s, 365.0, false), values_of(s),
                                            weights_of(s));
    CHECK(fit.mu == doctest::Approx(x[0]).epsilon(1e-9));
    CHECK(fit.alpha1 == doctest::Approx(x[1]).epsilon(1e-9));
}

TEST_CASE("decade of decline: beta recovered to 1e-8") {
    std::vector<double> t, v;
    for (int i = 0; i < 3650; ++i) {
        t.push_back(double(i));
        v.push_back(0.6 - 2.74e-5 * i + 0.15 * std::sin(2.0 * std::numbers::pi * i / 365.0));
    }
    HarmonicFit fit = fit_harmonic(make_series(t, v), true);
    REQUIRE(fit.beta.has_value());
    CHECK(std::fabs(*fit.beta + 2.74e-5) <= 1e-8);
    CHECK(std::fabs(fit.mu - 0.6) <= 1e-6);
    CHECK(std::fabs(fit.alpha2 - 0.15) <= 1e-6);
}

TEST_CASE("insufficient data and rank deficiency") {
    CHECK_THROWS_AS(fit_harmonic(make_series({0, 1}, {1, 2}), false), InsufficientData);
    CHECK_THROWS_AS(fit_harmonic(make_series({0, 1, 2}, {1, 2, 3}), true), InsufficientData);

    // all observations at a single instant
    ObservationSeries one_t = make_series({5, 5, 5, 5}, {1, 2, 3, 4});
    CHECK_THROWS_AS(fit_harmonic(one_t, false), RankDeficient);

    // sampling at exact period multiples aliases cos with the intercept
    ObservationSeries aliased =
        make_series({0, 365, 730, 1095, 1460}, {1, 1.1, 0.9, 1.05, 0.95});
    CHECK_THROWS_AS(fit_harmonic(aliased, false), RankDeficient);
    try {
        fit_harmonic(aliased, false);
    } catch (const RankDeficient& e) {
        CHECK(e.condition() >= 1e10);
    }
}

TEST_CASE("weighted fit matches the weighted normal-equations oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    std::uniform_real_distribution<double> weight(0.2, 5.0);
    std::vector<double> t, v, w;
    for (int i = 0; i < 60; ++i) {
        t.push_back(i * 13.0);
        v.push_back(0.4 + 0.1 * std::cos(2 * std::numbers::pi * t.back() / 365.0) +
                    noise(rng));
        w.push_back(weight(rng));
    }
    ObservationSeries s = make_series(t, v, w);
    HarmonicFit fit = fit_harmonic(s, true);
    auto x = oracle::solve_normal_equations(design(s, 365.0, true), values_of(s),
                                            weights_of(s));
    auto c = coefs_of(fit);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(c[j] == doctest::Approx(x[j]).epsilon(1e-8));
}

TEST_CASE("50 random series: residual sum of squares matches the oracle to 1e-9") {
    std::mt19937_64 rng(20240201);
    for (int rep = 0; rep < 50; ++rep) {
        std::uniform_int_distribution<int> n_dist(10, 200);
        int n = n_dist(rng);
        std::uniform_real_distribution<double> tstep(1.0, 18.0);
        std::uniform_real_distribution<double> value(-2.0, 2.0);
        std::vector<double> t, v;
        double tt = 0.0;
        for (int i = 0; i < n; ++i) {
            tt += tstep(rng);
            t.push_back(tt);
            v.push_back(value(rng));
        }
        ObservationSeries s = make_series(t, v);
        bool trend = rep % 2 == 0;
        HarmonicFit fit = fit_harmonic(s, trend);

        auto A = design(s, 365.0, trend);
        auto w = weights_of(s);
        auto x = oracle::solve_normal_equations(A, values_of(s), w);
        double oracle_rss = oracle::weighted_rss(A, values_of(s), w, x);
        double fit_rss = fit.rmse * fit.rmse * double(n);
        CAPTURE(rep);
        CHECK(fit_rss ==
              doctest::Approx(oracle_rss).epsilon(1e-9).scale(std::max(1.0, oracle_rss)));
    }
}

TEST_CASE("residuals are orthogonal to every design column") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> t, v;
        for (int i = 0; i < 40; ++i) {
            t.push_back(i * 9.5 + double(rng() % 5));
            v.push_back(value(rng));
        }
        ObservationSeries s = make_series(t, v);
        bool trend = rep % 2 == 0;
        HarmonicFit fit = fit_harmonic(s, trend);
        auto A = design(s, 365.0, trend);
        std::vector<double> resid;
        for (const Observation& o : s.obs) resid.push_back(o.value - predict(fit, o.t));
        double rnorm = 0.0;
        for (double r : resid) rnorm += r * r;
        rnorm = std::sqrt(rnorm);
        for (std::size_t col = 0; col < A[0].size(); ++col) {
            double dot = 0.0, cnorm = 0.0;
            for (std::size_t i = 0; i < A.size(); ++i) {
                dot += A[i][col] * resid[i];
                cnorm += A[i][col] * A[i][col];
            }
            cnorm = std::sqrt(cnorm);
            CHECK(std::fabs(dot) / (cnorm * rnorm + 1e-30) <= 1e-8);
        }
    }
}

TEST_CASE("exact interpolation when n equals the coefficient count") {
    ObservationSeries s = make_series({10, 80, 170}, {0.3, 0.7, 0.5});
    HarmonicFit fit = fit_harmonic(s, false);
    CHECK(fit.rmse <= 1e-10);
    for (const Observation& o : s.obs)
        CHECK(predict(fit, o.t) == doctest::Approx(o.value).epsilon(1e-9));

    ObservationSeries s4 = make_series({10, 80, 170, 260}, {0.3, 0.7, 0.5, 0.4});
    CHECK(fit_harmonic(s4, true).rmse <= 1e-10);
}

TEST_CASE("shift equivariance in the value") {
    ObservationSeries s =
        make_series({3, 50, 120, 200, 280, 340}, {0.1, 0.4, 0.3, 0.5, 0.2, 0.35});
    HarmonicFit base = fit_harmonic(s, true);
    ObservationSeries shifted = s;
    for (Observation& o : shifted.obs) o.value += 2.5;
    HarmonicFit moved = fit_harmonic(shifted, true);
    CHECK(moved.mu - base.mu == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(moved.alpha1 == doctest::Approx(base.alpha1).epsilon(1e-10));
    CHECK(moved.alpha2 == doctest::Approx(base.alpha2).epsilon(1e-10));
    CHECK(*moved.beta == doctest::Approx(*base.beta).scale(1.0).epsilon(1e-10));
}

TEST_CASE("shifting time by one period leaves coefficients unchanged") {
    ObservationSeries s =
        make_series({3, 50, 120, 200, 280, 340}, {0.1, 0.4, 0.3, 0.5, 0.2, 0.35});
    HarmonicFit base = fit_harmonic(s, false);
    ObservationSeries shifted = s;
    for (Observation& o : shifted.obs) o.t += 365.0;
    HarmonicFit moved = fit_harmonic(shifted, false);
    CHECK(moved.mu == doctest::Approx(base.mu).epsilon(1e-8));
    CHECK(moved.alpha1 == doctest::Approx(base.alpha1).epsilon(1e-8));
    CHECK(moved.alpha2 == doctest::Approx(base.alpha2).epsilon(1e-8));
}

TEST_CASE("standard errors match the closed-form covariance") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    std::vector<double> t, v;
    for (int i = 0; i < 48; ++i) {
        t.push_back(i * 16.0);
        v.push_back(0.5 + 0.2 * std::cos(2 * std::numbers::pi * t.back() / 365.0) +
                    noise(rng));
    }
    ObservationSeries s = make_series(t, v);
    HarmonicFit fit = fit_harmonic(s, false);

    // independent covariance: sigma^2 * inverse(A^T A) by Gauss-Jordan
    auto A = design(s, 365.0, false);
    const std::size_t k = 3, n = A.size();
    double M[3][6] = {};
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t r = 0; r < n; ++r) M[i][j] += A[r][i] * A[r][j];
        M[i][k + i] = 1.0;
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
        std::swap(M[col], M[piv]);
        double d = M[col][col];
        for (std::size_t c = 0; c < 2 * k; ++c) M[col][c] /= d;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = M[r][col];
            for (std::size_t c = 0; c < 2 * k; ++c) M[r][c] -= f * M[col][c];
        }
    }
    double rss = 0.0;
    for (const Observation& o : s.obs) {
        double r = o.value - predict(fit, o.t);
        rss += r * r;
    }
    double sigma2 = rss / double(n - k);
    REQUIRE(fit.coef_stderr.size() == k);
    for (std::size_t j = 0; j < k; ++j)
        CHECK(fit.coef_stderr[j] ==
              doctest::Approx(std::sqrt(sigma2 * M[j][k + j])).epsilon(1e-7));
}

TEST_CASE("predict evaluates the fitted expression") {
    HarmonicFit f;
    f.rank_ok = true;
    f.mu = 0.5;
    CHECK(predict(f, 123.4) == 0.5);
    f.mu = 0.0;
    f.alpha1 = 1.0;
    CHECK(predict(f, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    f.alpha1 = 0.0;
    f.alpha2 = 1.0;
    CHECK(predict(f, 365.0 / 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    f.beta = 0.01;
    f.alpha2 = 0.0;
    CHECK(predict(f, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-finite observations are rejected") {
    ObservationSeries bad = make_series({0, 10, 20, 30}, {1, 2, 3, 4});
    bad.obs[2].value = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_harmonic(bad, false), ValidationError);
    bad = make_series({0, 10, 20, 30}, {1, 2, 3, 4});
    bad.obs[1].weight = 0.0;
    CHECK_THROWS_AS(fit_harmonic(bad, false), ValidationError);
}

} // TEST_SUITE

TEST_SUITE("timeseries.trend") {

TEST_CASE("monotone series") {
    TrendResult r = mann_kendall(make_series({0, 1, 2, 3, 4}, {1, 2, 3, 4, 5}));
    CHECK(r.s_statistic == 10);
    CHECK(r.tau == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.direction == TrendDirection::increasing);
    CHECK(r.p_value < 0.05);
}

TEST_CASE("all-tie series") {
    TrendResult r = mann_kendall(make_series({0, 1, 2, 3}, {3, 3, 3, 3}));
    CHECK(r.s_statistic == 0);
    CHECK(r.tau == 0.0);
    CHECK(r.direction == TrendDirection::none);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("exhaustive: S and tau match the pairwise oracle for every short series") {
    // every series of length 2..7 over the alphabet {1,2,3}
    for (int n = 2; n <= 7; ++n) {
        int total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        for (int code = 0; code < total; ++code) {
            std::vector<double> v;
            std::vector<double> t;
            int c = code;
            for (int i = 0; i < n; ++i) {
                v.push_back(double(1 + c % 3));
                t.push_back(double(i));
                c /= 3;
            }
            TrendResult r = mann_kendall(make_series(t, v));
            long long s = oracle::mk_s(v);
            CHECK(r.s_statistic == s);
            CHECK(r.tau == doctest::Approx(oracle::mk_tau(v)).epsilon(1e-15));
            bool monotone_up = true, monotone_down = true;
            for (int i = 1; i < n; ++i) {
                monotone_up = monotone_up && v[i] > v[i - 1];
                monotone_down = monotone_down && v[i] < v[i - 1];
            }
            if (monotone_up) CHECK(r.tau == 1.0);
            if (monotone_down) CHECK(r.tau == -1.0);
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
        }
    }
}

TEST_CASE("antisymmetry: negating values negates S and tau and flips direction") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> t, v;
        for (int i = 0; i < 25; ++i) {
            t.push_back(double(i));
            v.push_back(double(int(rng() % 19)) - 9.0 + 0.3 * double(rng() % 4));
        }
        TrendResult a = mann_kendall(make_series(t, v));
        for (double& x : v) x = -x;
        TrendResult b = mann_kendall(make_series(t, v));
        CHECK(a.s_statistic == -b.s_statistic);
        CHECK(a.tau == doctest::Approx(-b.tau).epsilon(1e-15));
        CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-12));
        if (a.direction == TrendDirection::increasing)
            CHECK(b.direction == TrendDirection::decreasing);
        if (a.direction == TrendDirection::none) CHECK(b.direction == TrendDirection::none);
    }
}

TEST_CASE("Sen slope scales linearly with the values") {
    std::mt19937_64 rng(123);
    std::vector<double> t, v;
    for (int i = 0; i < 20; ++i) {
        t.push_back(i * 3.0);
        v.push_back(std::sin(i * 0.7) + 0.05 * i);
    }
    TrendResult base = mann_kendall(make_series(t, v));
    for (double k : {2.0, 7.5, 0.25}) {
        std::vector<double> scaled = v;
        for (double& x : scaled) x *= k;
        TrendResult r = mann_kendall(make_series(t, scaled));
        CHECK(r.slope == doctest::Approx(k * base.slope).epsilon(1e-12));
    }
}

TEST_CASE("duplicate timestamps are excluded from Sen's slope but kept in S") {
    ObservationSeries s = make_series({0, 0, 1, 2}, {1, 2, 3, 4});
    TrendResult r = mann_kendall(s);
    CHECK(r.s_statistic == 6); // all six pairs increasing
    CHECK(std::isfinite(r.slope));
}

TEST_CASE("small n yields p = 1 and no direction") {
    TrendResult r3 = mann_kendall(make_series({0, 1, 2}, {1, 2, 3}));
    CHECK(r3.p_value == 1.0);
    CHECK(r3.direction == TrendDirection::none);
    CHECK(r3.s_statistic == 3);
    CHECK_THROWS_AS(mann_kendall(make_series({0}, {1})), InsufficientData);
}

TEST_CASE("Monte Carlo rejection rate under the null is near alpha") {
    std::mt19937_64 rng(424242);
    const int reps = 2000;
    int rejected = 0;
    std::vector<double> t(40);
    for (int i = 0; i < 40; ++i) t[i] = double(i);
    std::vector<double> v(40);
    for (int i = 0; i < 40; ++i) v[i] = double(i);
    for (int rep = 0; rep < reps; ++rep) {
        std::shuffle(v.begin(), v.end(), rng);
        TrendResult r = mann_kendall(make_series(t, v));
        CHECK(r.s_statistic == oracle::mk_s(v));
        if (r.p_value < 0.05) ++rejected;
    }
    double rate = double(rejected) / reps;
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.08);
}

TEST_CASE("ols exact line") {
    TrendResult r = ols_slope(make_series({0, 1, 2}, {0, 2, 4}));
    CHECK(r.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(r.rmse <= 1e-12);
    CHECK(r.p_value == 0.0); // zero residual variance, nonzero slope
    CHECK(r.direction == TrendDirection::increasing);
    CHECK(r.method == TrendMethod::ols);
}

TEST_CASE("ols symmetric V has zero slope") {
    TrendResult r = ols_slope(make_series({0, 1, 2}, {1, 0, 1}));
    CHECK(r.slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(r.direction == TrendDirection::none);
}

TEST_CASE("ols noisy line recovers the slope against the closed form") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> noise(-0.4, 0.4);
    std::vector<double> t, v;
    for (int i = 0; i < 10; ++i) {
        t.push_back(double(i));
        v.push_back(0.5 * i + noise(rng));
    }
    TrendResult r = ols_slope(make_series(t, v));
    CHECK(std::fabs(r.slope - 0.5) <= 0.1);
    oracle::SimpleLine line = oracle::simple_regression(t, v);
    CHECK(r.slope == doctest::Approx(line.slope).epsilon(1e-12));
    CHECK(r.intercept == doctest::Approx(line.intercept).epsilon(1e-12));
}

TEST_CASE("ols error taxonomy") {
    CHECK_THROWS_AS(ols_slope(make_series({0, 1}, {1, 2})), InsufficientData);
    CHECK_THROWS_AS(ols_slope(make_series({2, 2, 2}, {1, 2, 3})), DegenerateAbscissa);
}

TEST_CASE("student t two-sided p matches frozen references") {
    // reference values: scipy 1.15.3, 2*stats.t.sf(t, dof)
    struct Ref { double t, dof, p; };
    const Ref refs[] = {
        {0.5, 1, 0.704832764699134},    {1.0, 2, 0.422649730810374},
        {2.0, 5, 0.101939478829858},    {2.5, 10, 0.0314468442366088},
        {3.2, 30, 0.00323860171195314}, {1.96, 200, 0.0513848408458134},
        {4.0, 3, 0.0280084560101462},   {0.1, 8, 0.922804909430597},
        {6.5, 60, 1.7707670188311e-08}, {2.0, 38, 0.052685070967667},
    };
    for (const Ref& r : refs) {
        CHECK(student_t_two_sided_p(r.t, r.dof) == doctest::Approx(r.p).epsilon(1e-10));
        CHECK(student_t_two_sided_p(-r.t, r.dof) == doctest::Approx(r.p).epsilon(1e-10));
    }
    CHECK(student_t_two_sided_p(0.0, 10) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(student_t_two_sided_p(std::numeric_limits<double>::infinity(), 4) == 0.0);
}

} // TEST_SUITE

TEST_SUITE("timeseries.annual") {

TEST_CASE("one observation per year is the identity on values") {
    ObservationSeries s;
    s.epoch = {2015, 1, 1};
    for (int y = 0; y < 5; ++y)
        s.obs.push_back({365.25 * y + 40.0, double(y) + 0.5, 1.0});
    ObservationSeries annual = annual_aggregate(s, AnnualStatistic::mean);
    REQUIRE(annual.size() == 5);
    for (int y = 0; y < 5; ++y) {
        CHECK(annual.obs[y].value == double(y) + 0.5);
        int year = year_of(s.epoch, annual.obs[y].t);
        CHECK(annual.obs[y].t == doctest::Approx(midyear_t(s.epoch, year)).epsilon(1e-12));
    }
}

TEST_CASE("two observations in one year aggregate to their mean") {
    ObservationSeries s;
    s.epoch = {2020, 1, 1};
    s.obs = {{10.0, 4.0, 1.0}, {200.0, 6.0, 1.0}};
    ObservationSeries annual = annual_aggregate(s, AnnualStatistic::mean);
    REQUIRE(annual.size() == 1);
    CHECK(annual.obs[0].value == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("median statistic") {
    ObservationSeries s;
    s.epoch = {2020, 1, 1};
    s.obs = {{1.0, 1.0, 1.0}, {2.0, 9.0, 1.0}, {3.0, 2.0, 1.0}};
    CHECK(annual_aggregate(s, AnnualStatistic::median).obs[0].value == 2.0);
    s.obs.push_back({4.0, 5.0, 1.0});
    CHECK(annual_aggregate(s, AnnualStatistic::median).obs[0].value ==
          doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("36 observations over a decade match a brute-force group-by") {
    std::mt19937_64 rng(2024);
    ObservationSeries s;
    s.epoch = {2014, 1, 1};
    std::uniform_real_distribution<double> val(0.0, 10.0);
    // 36 points spread over ten consecutive years (offsets keep each point
    // safely inside its target calendar year)
    std::uniform_real_distribution<double> offset(10.0, 350.0);
    for (int i = 0; i < 36; ++i)
        s.obs.push_back({365.25 * double(i % 10) + offset(rng), val(rng), 1.0});
    s.sort_by_time();

    std::map<int, std::pair<double, int>> sums;
    for (const Observation& o : s.obs) {
        auto& [sum, count] = sums[year_of(s.epoch, o.t)];
        sum += o.value;
        ++count;
    }
    ObservationSeries annual = annual_aggregate(s, AnnualStatistic::mean);
    CHECK(annual.size() == sums.size());
    CHECK(annual.size() == 10);
    std::size_t i = 0;
    for (const auto& [year, sc] : sums) {
        CHECK(year_of(s.epoch, annual.obs[i].t) == year);
        CHECK(annual.obs[i].value == doctest::Approx(sc.first / sc.second).epsilon(1e-12));
        ++i;
    }
}

TEST_CASE("empty in, empty out") {
    ObservationSeries s;
    CHECK(annual_aggregate(s, AnnualStatistic::mean).empty());
}

TEST_CASE("change ratio") {
    ObservationSeries s;
    s.epoch = {2015, 1, 1};
    double v[] = {1.0, 4.0, 10.0};
    for (int y = 0; y < 3; ++y) s.obs.push_back({midyear_t(s.epoch, 2015 + y), v[y], 1.0});
    CHECK(change_ratio(s, 2015, 2017) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(change_ratio(s, 2016, 2016) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(change_ratio(s, 2015, 2019), MissingYear);

    ObservationSeries z;
    z.epoch = {2015, 1, 1};
    z.obs = {{midyear_t(z.epoch, 2015), 0.0, 1.0}, {midyear_t(z.epoch, 2016), 5.0, 1.0}};
    CHECK_THROWS_AS(change_ratio(z, 2015, 2016), NonpositiveBaseline);
}

TEST_CASE("change ratio: three annual values, first to last") {
    ObservationSeries s;
    s.epoch = {2015, 1, 1};
    double v[] = {2.0, 5.0, 24.0};
    for (int y = 0; y < 3; ++y) s.obs.push_back({midyear_t(s.epoch, 2015 + y), v[y], 1.0});
    CHECK(change_ratio(s, 2015, 2017) == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("dips: monotone has none, local minimum found") {
    ObservationSeries up;
    up.epoch = {2015, 1, 1};
    for (int y = 0; y < 5; ++y)
        up.obs.push_back({midyear_t(up.epoch, 2015 + y), double(y + 1), 1.0});
    CHECK(detect_dips(up).empty());

    ObservationSeries dip;
    dip.epoch = {2018, 1, 1};
    double v[] = {5.0, 7.0, 6.0, 8.0};
    for (int y = 0; y < 4; ++y) dip.obs.push_back({midyear_t(dip.epoch, 2018 + y), v[y], 1.0});
    std::vector<int> years = detect_dips(dip);
    REQUIRE(years.size() == 1);
    CHECK(years[0] == 2020);

    ObservationSeries two;
    two.epoch = {2018, 1, 1};
    two.obs = {{0.0, 1.0, 1.0}, {400.0, 2.0, 1.0}};
    CHECK_THROWS_AS(detect_dips(two), InsufficientData);
}

TEST_CASE("dips on a random 20-year series match the brute-force scan") {
    std::mt19937_64 rng(515151);
    ObservationSeries s;
    s.epoch = {2000, 1, 1};
    std::vector<double> v;
    for (int y = 0; y < 20; ++y) {
        v.push_back(double(rng() % 100));
        s.obs.push_back({midyear_t(s.epoch, 2000 + y), v.back(), 1.0});
    }
    std::vector<int> expect;
    for (int y = 1; y < 19; ++y)
        if (v[y] < v[y - 1] && v[y] < v[y + 1]) expect.push_back(2000 + y);
    CHECK(detect_dips(s) == expect);
}

} // TEST_SUITE

TEST_SUITE("timeseries.csv") {

TEST_CASE("write-read roundtrip") {
    ObservationSeries s = make_series({0.5, 17.25, 400.0}, {0.125, -3.5, 2.75},
                                      {1.0, 2.5, 0.5});
    ObservationSeries back = read_series_csv(write_series_csv(s));
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.obs[i].t == s.obs[i].t);
        CHECK(back.obs[i].value == s.obs[i].value);
        CHECK(back.obs[i].weight == s.obs[i].weight);
    }
}

TEST_CASE("weight column optional; rows sorted by time") {
    ObservationSeries s = read_series_csv("t_days,value\n10,2.0\n0,1.0\n");
    REQUIRE(s.size() == 2);
    CHECK(s.obs[0].t == 0.0);
    CHECK(s.obs[0].weight == 1.0);
    CHECK(s.obs[1].t == 10.0);
}

TEST_CASE("bad headers and rows are rejected") {
    CHECK_THROWS_AS(read_series_csv(""), ValidationError);
    CHECK_THROWS_AS(read_series_csv("time,value\n1,2\n"), ValidationError);
    CHECK_THROWS_AS(read_series_csv("t_days,value\n1\n"), ValidationError);
    CHECK_THROWS_AS(read_series_csv("t_days,value\nx,2\n"), ValidationError);
    CHECK_THROWS_AS(read_series_csv("t_days,value,weight\n1,2,0\n"), ValidationError);
}

} // TEST_SUITE
