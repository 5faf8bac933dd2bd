#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace birkhoff {

struct TimeSeriesRecord {
  double t = 0.0;
  std::optional<double> volume;
  std::optional<double> purity;
  std::optional<double> defect;
  std::string flags;  // ';'-separated markers, empty when clean

  void add_flag(const std::string& flag) {
    if (!flags.empty()) flags += ';';
    flags += flag;
  }
};

struct TimeSeries {
  std::vector<TimeSeriesRecord> records;

  std::size_t size() const { return records.size(); }
  const TimeSeriesRecord& operator[](std::size_t i) const { return records[i]; }
  TimeSeriesRecord& operator[](std::size_t i) { return records[i]; }
};

/// n_steps + 1 evenly spaced points on [0, t_max].
std::vector<double> uniform_grid(double t_max, int n_steps);

/// Throws std::invalid_argument on an empty or non-increasing grid.
void check_grid(std::span<const double> grid);

/// Series with one empty record per grid point.
TimeSeries make_series(std::span<const double> grid);

/// Shortest representation that round-trips (at most 17 significant digits).
std::string format_double(double x);

/// Header `t,V,purity,d_B,flags`, LF line endings, empty fields for absent
/// values.
void write_csv(std::ostream& os, const TimeSeries& series);
TimeSeries read_csv(std::istream& is);

}  // namespace birkhoff
