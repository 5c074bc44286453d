#pragma once

#include <string>

#include "homlab/eventsim.hpp"
#include "homlab/syncloop.hpp"

namespace homlab {

// Scan CSV schema (RFC-4180 style, '\n' newlines, header mandatory):
//   set_delay_s,block_index,realized_delay_s,fourfold_counts
// Delays are written in full-precision scientific notation; counts as
// integers. One row per (point, block).
void write_scan_csv(const ScanResult& scan, const std::string& path);

// Reads the scan schema back; consecutive rows with equal set_delay form one
// point. The returned result carries a default config (dip width 0), which
// disables the span precondition in fit_dip.
ScanResult read_scan_csv(const std::string& path);

// Jitter series schema: time_s,timing_error_s
void write_jitter_csv(const JitterSeries& series, const std::string& path);

// Histogram schema: bin_center_s,count
void write_jitter_histogram_csv(const JitterSeries& series, double discard_s,
                                int bins, const std::string& path);

}  // namespace homlab
