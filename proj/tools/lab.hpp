#pragma once

// Front end shared by the birkhoff-lab executable and its tests: run
// configuration, the per-command series builders, and report text.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "birkhoff/defect.hpp"
#include "birkhoff/lindblad.hpp"
#include "birkhoff/timeseries.hpp"
#include "birkhoff/tqd_model.hpp"

namespace birkhoff::lab {

enum class Rho0 {
  uniform,  // pure state with all four amplitudes 1/2
  mixed,    // 1/4
};

struct RunConfig {
  ModelParams model;
  double gamma_decay = 0.0;
  double t_max = 10.0;
  int n_steps = 1000;
  std::uint64_t seed = 1;
  int defect_k = 8;
  int defect_starts = 16;
  double defect_tol = 1e-6;
  DefectMode defect_mode = DefectMode::diagonal;
  bool defect_warm_start = true;
  // Rows with |V| <= coplanar tolerance and d_B above this get flagged.
  double defect_threshold = 1e-4;
  Rho0 rho0 = Rho0::uniform;
  std::string output;  // empty: caller decides
  std::vector<std::string> warnings;

  LindbladParams lindblad() const { return {model, gamma_decay}; }
  DefectConfig defect() const;
  std::vector<double> grid() const { return uniform_grid(t_max, n_steps); }
};

/// Error in a config file. `line` is 0 for errors not tied to a line
/// (cross-key validation).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string key)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Flat `key = value` lines; `#` starts a comment. Unknown and repeated keys
/// are errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Names of every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

enum class Command { volume, purity, defect, all };

std::optional<Command> command_from_name(std::string_view name);
std::string command_name(Command c);

TimeSeries run_command(Command c, const RunConfig& cfg);

DensityMatrix initial_system_state(Rho0 r);

/// min / max of every populated column.
void write_summary(std::ostream& os, const TimeSeries& series);

/// Condition booleans and verdict.
void write_validation(std::ostream& os, const RunConfig& cfg);

/// Writes the CSV; on failure the partial file is removed and the error
/// rethrown.
void write_series(const std::filesystem::path& path, const TimeSeries& series);

/// Python/matplotlib script that plots every populated column of `csv`.
std::string plot_script(const std::filesystem::path& csv);

}  // namespace birkhoff::lab
