#include "homlab/csvio.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "homlab/errors.hpp"

namespace homlab {

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write to '" + path + "'");
  return out;
}

}  // namespace

void write_scan_csv(const ScanResult& scan, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "set_delay_s,block_index,realized_delay_s,fourfold_counts\n";
  for (const ScanPoint& p : scan.points) {
    for (size_t b = 0; b < p.fourfold_counts.size(); ++b) {
      out << full_precision(p.set_delay_s) << ',' << b << ','
          << full_precision(p.realized_delay_s[b]) << ','
          << p.fourfold_counts[b] << '\n';
    }
  }
  out.flush();
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

ScanResult read_scan_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("'" + path + "': empty file, expected a header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "set_delay_s,block_index,realized_delay_s,fourfold_counts")
    throw ValidationError("'" + path + "': unexpected header '" + line + "'");

  ScanResult scan;
  scan.config.dip = DipModel{0.0, 0.0, 0.0};  // unknown provenance
  int line_no = 1;
  bool have_point = false;
  double current_delay = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double set_delay = 0.0, realized = 0.0;
    long long block = 0;
    unsigned long long counts = 0;
    char tail = 0;
    const int got = std::sscanf(line.c_str(), "%lf,%lld,%lf,%llu%c", &set_delay,
                                &block, &realized, &counts, &tail);
    if (got != 4) {
      std::ostringstream os;
      os << "'" << path << "' line " << line_no << ": malformed row '" << line
         << "'";
      throw ValidationError(os.str());
    }
    if (!have_point || set_delay != current_delay) {
      scan.points.push_back(ScanPoint{set_delay, {}, {}});
      current_delay = set_delay;
      have_point = true;
    }
    scan.points.back().realized_delay_s.push_back(realized);
    scan.points.back().fourfold_counts.push_back(counts);
  }
  return scan;
}

void write_jitter_csv(const JitterSeries& series, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "time_s,timing_error_s\n";
  for (size_t k = 0; k < series.samples_s.size(); ++k) {
    out << full_precision(static_cast<double>(k) * series.timestep_s) << ','
        << full_precision(series.samples_s[k]) << '\n';
  }
  out.flush();
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

void write_jitter_histogram_csv(const JitterSeries& series, double discard_s,
                                int bins, const std::string& path) {
  if (bins < 2) throw ValidationError("histogram needs >= 2 bins");
  const size_t skip = series.timestep_s > 0.0
                          ? static_cast<size_t>(std::ceil(discard_s / series.timestep_s))
                          : 0;
  if (skip >= series.samples_s.size())
    throw ValidationError("histogram discard leaves no samples");
  const auto begin = series.samples_s.begin() + static_cast<long>(skip);
  const auto [lo_it, hi_it] = std::minmax_element(begin, series.samples_s.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 1e-18;
    hi += 1e-18;
  }
  std::vector<std::uint64_t> hist(static_cast<size_t>(bins), 0);
  for (auto it = begin; it != series.samples_s.end(); ++it) {
    const int b = std::min(bins - 1, static_cast<int>((*it - lo) / (hi - lo) *
                                                      static_cast<double>(bins)));
    ++hist[static_cast<size_t>(std::max(0, b))];
  }
  std::ofstream out = open_for_write(path);
  out << "bin_center_s,count\n";
  for (int b = 0; b < bins; ++b) {
    const double center = lo + (b + 0.5) * (hi - lo) / static_cast<double>(bins);
    out << full_precision(center) << ',' << hist[static_cast<size_t>(b)] << '\n';
  }
  out.flush();
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace homlab
