#include "lab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace birkhoff::lab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view v, int line, const std::string& key) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("line " + std::to_string(line) + ": " + key + ": expected a finite number, got '" +
                          std::string(v) + "'",
                      line, key);
  return x;
}

template <typename Int>
Int parse_integer(std::string_view v, int line, const std::string& key) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line) + ": " + key + ": expected an integer, got '" +
                          std::string(v) + "'",
                      line, key);
  return x;
}

bool parse_bool(std::string_view v, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("line " + std::to_string(line) + ": " + key + ": expected true or false", line, key);
}

struct Psi0Parts {
  double re0 = 1.0, im0 = 0.0, re1 = 0.0, im1 = 0.0;
};

using Setter = std::function<void(RunConfig&, Psi0Parts&, std::string_view, int, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"omega1", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.model.omega1 = parse_real(v, l, k); }},
      {"omega2", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.model.omega2 = parse_real(v, l, k); }},
      {"kappa1", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.model.kappa1 = parse_real(v, l, k); }},
      {"kappa2", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.model.kappa2 = parse_real(v, l, k); }},
      {"gamma_x", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.model.field[0] = parse_real(v, l, k); }},
      {"gamma_y", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.model.field[1] = parse_real(v, l, k); }},
      {"gamma_z", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.model.field[2] = parse_real(v, l, k); }},
      {"psi0_re0", [](RunConfig&, Psi0Parts& p, std::string_view v, int l, const std::string& k) { p.re0 = parse_real(v, l, k); }},
      {"psi0_im0", [](RunConfig&, Psi0Parts& p, std::string_view v, int l, const std::string& k) { p.im0 = parse_real(v, l, k); }},
      {"psi0_re1", [](RunConfig&, Psi0Parts& p, std::string_view v, int l, const std::string& k) { p.re1 = parse_real(v, l, k); }},
      {"psi0_im1", [](RunConfig&, Psi0Parts& p, std::string_view v, int l, const std::string& k) { p.im1 = parse_real(v, l, k); }},
      {"gamma_decay", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.gamma_decay = parse_real(v, l, k); }},
      {"t_max", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.t_max = parse_real(v, l, k); }},
      {"n_steps", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.n_steps = parse_integer<int>(v, l, k); }},
      {"seed", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.seed = parse_integer<std::uint64_t>(v, l, k); }},
      {"rho0", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) {
         if (v == "uniform") c.rho0 = Rho0::uniform;
         else if (v == "mixed") c.rho0 = Rho0::mixed;
         else throw ConfigError("line " + std::to_string(l) + ": rho0: expected uniform or mixed", l, k);
       }},
      {"defect.k", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.defect_k = parse_integer<int>(v, l, k); }},
      {"defect.starts", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.defect_starts = parse_integer<int>(v, l, k); }},
      {"defect.tol", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.defect_tol = parse_real(v, l, k); }},
      {"defect.mode", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) {
         if (v == "diagonal") c.defect_mode = DefectMode::diagonal;
         else if (v == "general") c.defect_mode = DefectMode::general;
         else throw ConfigError("line " + std::to_string(l) + ": defect.mode: expected diagonal or general", l, k);
       }},
      {"defect.warm_start", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.defect_warm_start = parse_bool(v, l, k); }},
      {"defect.threshold", [](RunConfig& c, Psi0Parts&, std::string_view v, int l, const std::string& k) { c.defect_threshold = parse_real(v, l, k); }},
      {"output", [](RunConfig& c, Psi0Parts&, std::string_view v, int, const std::string&) { c.output = std::string(v); }},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what, 0, key);
}

}  // namespace

DefectConfig RunConfig::defect() const {
  DefectConfig d;
  d.k = defect_k;
  d.starts = defect_starts;
  d.tol = defect_tol;
  d.seed = seed;
  d.mode = defect_mode;
  return d;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  Psi0Parts psi;
  std::set<std::string> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no, "");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key", line_no, "");
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (it == table.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'", line_no, key);
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" + key + "'", line_no, key);
    if (value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": " + key + ": missing value", line_no, key);
    it->second(cfg, psi, value, line_no, key);
  }

  require(cfg.n_steps >= 1, "n_steps", "must be at least 1");
  require(cfg.t_max > 0.0, "t_max", "must be positive");
  require(cfg.gamma_decay >= 0.0, "gamma_decay", "must be non-negative");
  require(cfg.defect_k >= 1, "defect.k", "must be at least 1");
  require(cfg.defect_starts >= 1, "defect.starts", "must be at least 1");
  require(cfg.defect_tol > 0.0, "defect.tol", "must be positive");
  require(cfg.defect_threshold >= 0.0, "defect.threshold", "must be non-negative");

  ComplexVector amps(2);
  amps << cplx(psi.re0, psi.im0), cplx(psi.re1, psi.im1);
  const double drift = std::abs(amps.norm() - 1.0);
  if (drift > 1e-6)
    throw ConfigError("psi0: amplitudes have norm " + std::to_string(amps.norm()) + ", expected 1", 0, "psi0");
  if (drift > 1e-9) cfg.warnings.push_back("psi0: renormalized (norm drift " + std::to_string(drift) + ")");
  cfg.model.psi0 = PureState::normalized(amps);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string(), 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::optional<Command> command_from_name(std::string_view name) {
  if (name == "volume") return Command::volume;
  if (name == "purity") return Command::purity;
  if (name == "defect") return Command::defect;
  if (name == "all") return Command::all;
  return std::nullopt;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::volume: return "volume";
    case Command::purity: return "purity";
    case Command::defect: return "defect";
    case Command::all: return "all";
  }
  return "";
}

DensityMatrix initial_system_state(Rho0 r) {
  if (r == Rho0::mixed) return DensityMatrix::maximally_mixed(4);
  return DensityMatrix::from_pure(PureState(ComplexVector::Constant(4, cplx(0.5))));
}

TimeSeries run_command(Command c, const RunConfig& cfg) {
  const std::vector<double> grid = cfg.grid();
  TimeSeries out = make_series(grid);
  const bool all = c == Command::all;
  if (all || c == Command::volume) {
    const TimeSeries v = volume_time_series(cfg.model, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i].volume = v[i].volume;
  }
  if (all || c == Command::purity) {
    const TimeSeries p = purity_series(cfg.lindblad(), initial_system_state(cfg.rho0), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i].purity = p[i].purity;
  }
  if (all || c == Command::defect) {
    const TimeSeries d = defect_series(cfg.lindblad(), grid, cfg.defect(), {cfg.defect_warm_start});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i].defect = d[i].defect;
      if (!d[i].flags.empty()) out[i].add_flag(d[i].flags);
    }
  }
  if (all) {
    const double coplanar = tolerances().coplanar;
    for (auto& r : out.records)
      if (r.volume && r.defect && std::abs(*r.volume) <= coplanar && *r.defect > cfg.defect_threshold)
        r.add_flag("ru_violation");
  }
  return out;
}

void write_summary(std::ostream& os, const TimeSeries& series) {
  os << "rows: " << series.size() << "\n";
  auto column = [&](const char* name, std::optional<double> TimeSeriesRecord::*field) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    for (const auto& r : series.records) {
      const auto& v = r.*field;
      if (!v) continue;
      lo = n == 0 ? *v : std::min(lo, *v);
      hi = n == 0 ? *v : std::max(hi, *v);
      ++n;
    }
    if (n == 0) return;
    os << name << ": min " << format_double(lo) << " max " << format_double(hi);
    if (n != static_cast<int>(series.size())) os << " (" << series.size() - n << " missing)";
    os << "\n";
  };
  column("V", &TimeSeriesRecord::volume);
  column("purity", &TimeSeriesRecord::purity);
  column("d_B", &TimeSeriesRecord::defect);
  const auto flagged = std::count_if(series.records.begin(), series.records.end(),
                                     [](const auto& r) { return !r.flags.empty(); });
  if (flagged > 0) os << "flagged rows: " << flagged << "\n";
}

void write_validation(std::ostream& os, const RunConfig& cfg) {
  const ExtremalityReport r = extremality_conditions(cfg.model);
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "(I) asymmetric coupling: " << b(r.asymmetric_coupling) << "\n";
  os << "(II) transverse field: " << b(r.transverse_field) << "\n";
  os << "(III) longitudinal field: " << b(r.longitudinal_field) << "\n";
  os << "verdict: " << (r.all() ? "extremal channel expected at generic times" : "RU for all t") << "\n";
}

void write_series(const std::filesystem::path& path, const TimeSeries& series) {
  try {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(out, series);
    out.close();
    if (!out) throw std::runtime_error("error while writing " + path.string());
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw;
  }
}

std::string plot_script(const std::filesystem::path& csv) {
  std::ostringstream s;
  s << "import csv\n"
       "import matplotlib\n"
       "matplotlib.use('Agg')\n"
       "import matplotlib.pyplot as plt\n"
       "\n"
       "path = " << '"' << csv.filename().string() << '"' << "\n"
       "rows = list(csv.DictReader(open(path, newline='')))\n"
       "columns = [c for c in ('V', 'purity', 'd_B') if any(r[c] for r in rows)]\n"
       "fig, axes = plt.subplots(len(columns), 1, sharex=True, squeeze=False,\n"
       "                         figsize=(7, 2.5 * len(columns)))\n"
       "for ax, c in zip(axes[:, 0], columns):\n"
       "    pts = [(float(r['t']), float(r[c])) for r in rows if r[c]]\n"
       "    ax.plot([p[0] for p in pts], [p[1] for p in pts], lw=1)\n"
       "    ax.set_ylabel(c)\n"
       "axes[-1, 0].set_xlabel('t')\n"
       "fig.tight_layout()\n"
       "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n";
  return s.str();
}

}  // namespace birkhoff::lab
