#include "birkhoff/timeseries.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace birkhoff {

std::vector<double> uniform_grid(double t_max, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  std::vector<double> grid(static_cast<std::size_t>(n_steps) + 1);
  for (int i = 0; i <= n_steps; ++i) grid[i] = t_max * static_cast<double>(i) / n_steps;
  return grid;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("time grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
}

TimeSeries make_series(std::span<const double> grid) {
  TimeSeries s;
  s.records.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s.records[i].t = grid[i];
  return s;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

void put(std::ostream& os, const std::optional<double>& v) {
  if (v) os << format_double(*v);
}

std::optional<double> parse_field(const std::string& field, std::size_t line) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + field + "'");
  return v;
}

}  // namespace

void write_csv(std::ostream& os, const TimeSeries& series) {
  os << "t,V,purity,d_B,flags\n";
  for (const auto& r : series.records) {
    os << format_double(r.t) << ',';
    put(os, r.volume);
    os << ',';
    put(os, r.purity);
    os << ',';
    put(os, r.defect);
    os << ',' << r.flags << '\n';
  }
}

TimeSeries read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,V,purity,d_B,flags")
    throw std::runtime_error("csv: missing or unexpected header");
  TimeSeries series;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields(1);
    for (char c : line) {
      if (c == ',' && fields.size() < 5) fields.emplace_back();
      else fields.back() += c;
    }
    if (fields.size() != 5)
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected 5 fields");
    TimeSeriesRecord r;
    const auto t = parse_field(fields[0], line_no);
    if (!t) throw std::runtime_error("csv line " + std::to_string(line_no) + ": missing t");
    r.t = *t;
    r.volume = parse_field(fields[1], line_no);
    r.purity = parse_field(fields[2], line_no);
    r.defect = parse_field(fields[3], line_no);
    r.flags = fields[4];
    series.records.push_back(std::move(r));
  }
  return series;
}

}  // namespace birkhoff
