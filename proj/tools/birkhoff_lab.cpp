#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lab.hpp"

namespace fs = std::filesystem;
using namespace birkhoff;

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit dephasing experiments: tetrahedron volume, purity, Birkhoff defect"};
  std::string command;
  std::string config_path;
  std::string out_path;
  bool plot = false;
  app.add_option("command", command, "volume | purity | defect | all | validate")
      ->required()
      ->check(CLI::IsMember({"volume", "purity", "defect", "all", "validate"}));
  app.add_option("--config", config_path, "flat key = value config file")->required();
  app.add_option("--out", out_path, "CSV path (overrides the config's output key)");
  app.add_flag("--plot-script", plot, "also write a matplotlib script next to the CSV");
  CLI11_PARSE(app, argc, argv);

  lab::RunConfig cfg;
  try {
    cfg = lab::load_config(config_path);
  } catch (const lab::ConfigError& e) {
    std::cerr << "birkhoff-lab: " << config_path << ": " << e.what() << "\n";
    return 2;
  }
  for (const auto& w : cfg.warnings) std::cerr << "birkhoff-lab: warning: " << w << "\n";

  if (command == "validate") {
    lab::write_validation(std::cout, cfg);
    return 0;
  }

  const lab::Command cmd = *lab::command_from_name(command);
  fs::path out = !out_path.empty() ? fs::path(out_path)
                 : !cfg.output.empty() ? fs::path(cfg.output)
                                       : fs::path("birkhoff_" + command + ".csv");
  bool wrote = false;
  try {
    const TimeSeries series = lab::run_command(cmd, cfg);
    lab::write_series(out, series);
    wrote = true;
    if (plot) {
      fs::path script = out;
      script.replace_extension(".py");
      std::ofstream s(script, std::ios::binary);
      s << lab::plot_script(out);
      if (!s) throw std::runtime_error("cannot write " + script.string());
    }
    std::cout << "wrote " << out.string() << "\n";
    lab::write_summary(std::cout, series);
  } catch (const std::exception& e) {
    std::error_code ec;
    if (wrote) fs::remove(out, ec);
    std::cerr << "birkhoff-lab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
