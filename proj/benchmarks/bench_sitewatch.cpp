// Microbenchmarks for the numeric and I/O hot paths.
#include <benchmark/benchmark.h>

#include "sitewatch/geotiff.hpp"
#include "sitewatch/indices.hpp"
#include "sitewatch/sites.hpp"
#include "sitewatch/timeseries.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace sitewatch;

namespace {

ObservationSeries synthetic_series(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.02);
    ObservationSeries s;
    s.epoch = {2014, 1, 1};
    const double omega = 2.0 * std::numbers::pi / 365.0;
    for (int i = 0; i < n; ++i) {
        double t = double(i) * 16.0;
        double v = 0.6 + 0.15 * std::cos(omega * t) - 2.7e-5 * t + noise(rng);
        s.obs.push_back({t, v, 1.0});
    }
    return s;
}

RasterGrid synthetic_grid(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    RasterGrid g;
    g.width = w;
    g.height = h;
    g.origin_x = -77.6;
    g.origin_y = 39.0;
    g.pixel_scale_x = 0.005;
    g.pixel_scale_y = 0.005;
    g.crs_tag = "EPSG:4326";
    g.values.resize(std::size_t(w) * std::size_t(h));
    for (double& v : g.values) v = double(float(val(rng)));
    return g;
}

void BM_fit_harmonic(benchmark::State& state) {
    auto series = synthetic_series(int(state.range(0)), 1);
    for (auto _ : state) {
        HarmonicFit fit = fit_harmonic(series, true);
        benchmark::DoNotOptimize(fit.mu);
    }
}
BENCHMARK(BM_fit_harmonic)->Arg(80)->Arg(230)->Arg(1000);

void BM_mann_kendall(benchmark::State& state) {
    auto series = synthetic_series(int(state.range(0)), 2);
    for (auto _ : state) {
        TrendResult res = mann_kendall(series);
        benchmark::DoNotOptimize(res.p_value);
    }
}
BENCHMARK(BM_mann_kendall)->Arg(80)->Arg(230)->Arg(1000);

void BM_geotiff_write(benchmark::State& state) {
    auto grid = synthetic_grid(int(state.range(0)), int(state.range(0)), 3);
    GeoTiffWriteOptions opts;
    opts.compression =
        state.range(1) ? TiffCompression::deflate : TiffCompression::none;
    for (auto _ : state) {
        auto bytes = write_geotiff(grid, opts);
        benchmark::DoNotOptimize(bytes.data());
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(grid.values.size()) * 4);
}
BENCHMARK(BM_geotiff_write)->Args({128, 0})->Args({128, 1})->Args({512, 1});

void BM_geotiff_parse(benchmark::State& state) {
    auto grid = synthetic_grid(int(state.range(0)), int(state.range(0)), 4);
    GeoTiffWriteOptions opts;
    opts.compression =
        state.range(1) ? TiffCompression::deflate : TiffCompression::none;
    auto bytes = write_geotiff(grid, opts);
    for (auto _ : state) {
        RasterGrid parsed = parse_geotiff(bytes);
        benchmark::DoNotOptimize(parsed.values.data());
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(bytes.size()));
}
BENCHMARK(BM_geotiff_parse)->Args({128, 0})->Args({128, 1})->Args({512, 1});

void BM_ndvi(benchmark::State& state) {
    int n = int(state.range(0));
    BandPair pair;
    pair.nir = synthetic_grid(n, n, 5);
    pair.red = synthetic_grid(n, n, 6);
    for (auto _ : state) {
        RasterGrid index = ndvi(pair);
        benchmark::DoNotOptimize(index.values.data());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n) * int64_t(n));
}
BENCHMARK(BM_ndvi)->Arg(128)->Arg(512);

void BM_zonal_mean(benchmark::State& state) {
    int n = int(state.range(0));
    auto grid = synthetic_grid(n, n, 7);
    Site site;
    site.id = "bench";
    site.lat = grid.pixel_center_y(n / 2);
    site.lon = grid.pixel_center_x(n / 2);
    site.aoi = CircleAoi{double(n) * 0.0025 * 111000.0 * 0.5};
    PixelMask mask = aoi_mask(site, grid);
    for (auto _ : state) {
        ZonalStats stats = zonal_mean(grid, mask);
        benchmark::DoNotOptimize(stats.mean);
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n) * int64_t(n));
}
BENCHMARK(BM_zonal_mean)->Arg(128)->Arg(512);

void BM_aoi_mask(benchmark::State& state) {
    int n = int(state.range(0));
    auto grid = synthetic_grid(n, n, 8);
    Site site;
    site.id = "bench";
    site.lat = grid.pixel_center_y(n / 2);
    site.lon = grid.pixel_center_x(n / 2);
    site.aoi = CircleAoi{2000.0};
    for (auto _ : state) {
        PixelMask mask = aoi_mask(site, grid);
        benchmark::DoNotOptimize(mask.selected.data());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n) * int64_t(n));
}
BENCHMARK(BM_aoi_mask)->Arg(128)->Arg(512);

} // namespace

BENCHMARK_MAIN();
