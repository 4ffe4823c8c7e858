#include "sitewatch/indices.hpp"

#include "sitewatch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sitewatch {

void BandPair::validate() const {
    if (!nir.same_shape(red)) throw GridMismatch("nir and red grids differ in shape");
    if (nir.timestamp != red.timestamp)
        throw GridMismatch("nir and red grids differ in timestamp");
    if (qa) {
        if (!nir.same_shape(*qa)) throw GridMismatch("qa grid differs in shape");
        if (nir.timestamp != qa->timestamp) throw GridMismatch("qa grid differs in timestamp");
    }
}

RasterGrid ndvi(const BandPair& pair, const QaBitSpec& qa_spec) {
    pair.validate();
    qa_spec.validate();

    RasterGrid out;
    out.width = pair.nir.width;
    out.height = pair.nir.height;
    out.origin_x = pair.nir.origin_x;
    out.origin_y = pair.nir.origin_y;
    out.pixel_scale_x = pair.nir.pixel_scale_x;
    out.pixel_scale_y = pair.nir.pixel_scale_y;
    out.crs_tag = pair.nir.crs_tag;
    out.band_kind = BandKind::index;
    out.timestamp = pair.nir.timestamp;
    out.nodata = kIndexNodata;
    out.values.assign(pair.nir.values.size(), kIndexNodata);

    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double nir = pair.nir.values[i];
        double red = pair.red.values[i];
        if (pair.nir.is_nodata(nir) || pair.red.is_nodata(red)) continue;
        if (pair.qa) {
            double qa_value = pair.qa->values[i];
            if (pair.qa->is_nodata(qa_value)) continue;
            if (!decode_qa(static_cast<std::uint16_t>(qa_value), qa_spec)) continue;
        }
        double sum = nir + red;
        if (sum == 0.0) continue;
        out.values[i] = (nir - red) / sum;
    }
    return out;
}

ZonalStats zonal_mean(const RasterGrid& grid, const PixelMask& mask) {
    if (mask.width != grid.width || mask.height != grid.height)
        throw GridMismatch("mask dimensions do not match the grid");

    double sum = 0.0;
    long long count = 0;
    for (int row = 0; row < grid.height; ++row) {
        for (int col = 0; col < grid.width; ++col) {
            if (!mask.at(row, col)) continue;
            double v = grid.at(row, col);
            if (grid.is_nodata(v)) continue;
            sum += v;
            ++count;
        }
    }
    if (count == 0) throw EmptyMask();

    ZonalStats stats;
    stats.count = count;
    stats.mean = sum / double(count);
    double ss = 0.0;
    for (int row = 0; row < grid.height; ++row) {
        for (int col = 0; col < grid.width; ++col) {
            if (!mask.at(row, col)) continue;
            double v = grid.at(row, col);
            if (grid.is_nodata(v)) continue;
            double d = v - stats.mean;
            ss += d * d;
        }
    }
    stats.stddev = std::sqrt(ss / double(count));
    return stats;
}

ObservationSeries extract_series(const std::vector<StackEntry>& stack, const Site& site,
                                 Variable variable, const CivilDate& epoch,
                                 const ExtractOptions& opts) {
    ObservationSeries out;
    out.variable = variable;
    out.epoch = epoch;

    for (const StackEntry& entry : stack) {
        PixelMask mask = aoi_mask(site, entry.grid);
        std::size_t aoi_pixels = mask.count();
        if (aoi_pixels == 0) continue;

        // Screen with the QA band by clearing mask bits before the zonal pass.
        if (entry.qa) {
            if (!entry.grid.same_shape(*entry.qa))
                throw GridMismatch("qa grid differs in shape");
            for (int row = 0; row < mask.height; ++row) {
                for (int col = 0; col < mask.width; ++col) {
                    std::size_t i = static_cast<std::size_t>(row) * mask.width + col;
                    if (!mask.selected[i]) continue;
                    double qa_value = entry.qa->at(row, col);
                    if (entry.qa->is_nodata(qa_value) ||
                        !decode_qa(static_cast<std::uint16_t>(qa_value), opts.qa_spec))
                        mask.selected[i] = 0;
                }
            }
        }

        ZonalStats stats;
        try {
            stats = zonal_mean(entry.grid, mask);
        } catch (const EmptyMask&) {
            continue; // fully screened-out date: preserve sparseness
        }
        if (opts.min_clear_fraction > 0.0 &&
            double(stats.count) < opts.min_clear_fraction * double(aoi_pixels))
            continue;
        out.obs.push_back({entry.timestamp, stats.mean, 1.0});
    }
    out.sort_by_time();
    return out;
}

} // namespace sitewatch
