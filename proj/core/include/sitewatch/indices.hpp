#pragma once

#include <optional>
#include <vector>

#include "sitewatch/raster.hpp"
#include "sitewatch/sites.hpp"
#include "sitewatch/timeseries.hpp"

namespace sitewatch {

// NIR + red reflectance grids (plus optional QA word grid) sharing
// dimensions, geotransform and timestamp.
struct BandPair {
    RasterGrid nir;
    RasterGrid red;
    std::optional<RasterGrid> qa;

    void validate() const; // throws GridMismatch
};

inline constexpr double kIndexNodata = -9999.0;

// (nir - red) / (nir + red) per pixel; nodata where either input is nodata,
// where the QA word rejects the pixel, or where nir + red == 0.
RasterGrid ndvi(const BandPair& pair, const QaBitSpec& qa_spec = QaBitSpec::landsat_c2_default());

struct ZonalStats {
    double mean = 0.0;
    long long count = 0;
    double stddev = 0.0; // population standard deviation
};

// Statistics over selected, non-nodata pixels. Throws EmptyMask when no
// pixel qualifies; callers treating a raster stack skip that timestamp.
ZonalStats zonal_mean(const RasterGrid& grid, const PixelMask& mask);

struct StackEntry {
    double timestamp = 0.0; // days since the series epoch
    RasterGrid grid;
    std::optional<RasterGrid> qa;
};

struct ExtractOptions {
    QaBitSpec qa_spec = QaBitSpec::landsat_c2_default();
    // Minimum fraction of AOI pixels that must survive nodata/QA screening
    // for a timestamp to yield an observation. 0 = any clear pixel counts.
    double min_clear_fraction = 0.0;
};

// Per-timestamp AOI zonal mean after QA screening; screened-out timestamps
// are omitted (sparseness preserved, never imputed). Output sorted by t.
ObservationSeries extract_series(const std::vector<StackEntry>& stack, const Site& site,
                                 Variable variable, const CivilDate& epoch,
                                 const ExtractOptions& opts = {});

} // namespace sitewatch
