#pragma once

#include <cstdint>
#include <string>

#include "sitewatch/pipeline.hpp"

namespace sitewatch {

// Writes a self-contained synthetic dataset under root_dir:
//   sites.csv, zones.csv, rasters/ndvi (nir/red/qa triplets),
//   rasters/ntl (annual composites), rasters/uvai (monthly).
// Returns a RunConfig pointing at the generated inputs, with reports
// going to root_dir/reports. Deterministic for a given seed.
RunConfig generate_demo_dataset(const std::string& root_dir, std::uint64_t seed);

} // namespace sitewatch
