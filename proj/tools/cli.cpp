#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qtrap/error.hpp"
#include "qtrap/scenario.hpp"

namespace qtrap::cli {

namespace {

std::filesystem::path resolve_output(const std::string& flag, const Scenario& scenario) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QTRAP_OUT"); env != nullptr && *env != '\0') return env;
  if (!scenario.output_dir.empty()) return scenario.output_dir;
  return "qtrap_out";
}

Scenario load(const std::string& source) {
  if (std::filesystem::exists(source)) return load_scenario(source);
  if (auto text = preset_text(source)) {
    Scenario s = parse_scenario(*text);
    if (s.name.empty()) s.name = std::filesystem::path(source).stem().string();
    return s;
  }
  throw ConfigError("no scenario file or bundled preset named '" + source + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-level atom in a q-deformed oscillator trap"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run a scenario file or bundled preset");
  std::string scenario_path;
  std::string out_dir;
  std::string mode;
  int threads = 1;
  bool dump_coupling = false;
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON file or preset name")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--mode", mode, "Coupling evaluation")->check(CLI::IsMember({"exact", "paper"}));
  run_cmd->add_option("--threads", threads, "Sweep entries run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--dump-coupling", dump_coupling, "Also write |F_mn| for each sweep entry");

  auto* presets_cmd = app.add_subcommand("presets", "Inspect bundled presets");
  presets_cmd->require_subcommand(1);
  auto* list_cmd = presets_cmd->add_subcommand("list", "List bundled presets");
  auto* show_cmd = presets_cmd->add_subcommand("show", "Print a bundled preset");
  std::string show_name;
  show_cmd->add_option("name", show_name)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qtrap: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (*list_cmd) {
    for (const auto& name : preset_names()) out << name << "\n";
    return kExitOk;
  }
  if (*show_cmd) {
    const auto text = preset_text(show_name);
    if (!text) {
      err << "qtrap: no preset named '" << show_name << "'\n";
      return kExitConfig;
    }
    out << *text;
    return kExitOk;
  }

  try {
    const Scenario scenario = load(scenario_path);
    RunOptions options;
    options.output_dir = resolve_output(out_dir, scenario);
    if (mode == "exact") options.mode = CouplingMode::ExactExponential;
    if (mode == "paper") options.mode = CouplingMode::PaperClosedForm;
    options.threads = threads;
    options.dump_coupling = dump_coupling;

    for (const auto& r : run_scenario(scenario, options)) {
      std::string files;
      for (const auto& file : r.files) files += (files.empty() ? "" : " ") + file.string();
      out << fmt::format("{:<12} {:<15} {:>8.3f} s  {}\n", tau_tag(r.tau), r.job, r.seconds, files);
      if (!r.warning.empty()) err << "warning: " << tau_tag(r.tau) << " " << r.job << ": " << r.warning << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "qtrap: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "qtrap: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "qtrap: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "qtrap: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace qtrap::cli
