#pragma once

// Text serialization of scan grids, layouts and sampled trajectories.
// Numbers are written with 12 significant digits.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dmcp/photonics.hpp"
#include "dmcp/robustness.hpp"

namespace dmcp {

/// Header: axis names then channel names. One row per grid point, last axis
/// fastest; categorical axes print their labels.
void write_scan_csv(std::ostream& out, const ScanResult& scan);
/// {"axes": [...], "channels": [...], "values": {channel: nested arrays}, "metadata": {...}}
void write_scan_json(std::ostream& out, const ScanResult& scan);

/// Inverse of write_scan_json, used for round-trip checks.
ScanResult read_scan_json(std::istream& in);

void write_layout_json(std::ostream& out, const WaveguideLayout& layout);
/// z,I1,I2
void write_intensity_csv(std::ostream& out, const std::vector<IntensitySample>& samples);

/// t,P0,...,P{n-1}
void write_population_csv(std::ostream& out,
                          const std::vector<std::pair<double, std::vector<double>>>& rows);

/// %.12g
std::string format_number(double v);

}  // namespace dmcp
