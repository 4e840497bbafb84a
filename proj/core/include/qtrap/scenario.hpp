#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtrap/dynamics.hpp"
#include "qtrap/observables.hpp"

namespace qtrap {

enum class JobKind { Inversion, QFunction, Spectrum, CouplingDump, RabiTable, RevivalReport };

std::string_view job_name(JobKind kind);

struct Job {
  JobKind kind = JobKind::Inversion;
  /// Snapshot times for QFunction jobs.
  std::vector<double> times;
  /// When non-empty, the job only runs for these sweep entries.
  std::vector<DeformationParameter> only_taus;

  bool applies_to(const DeformationParameter& d) const;
};

/// One simulation setup, a deformation sweep and the jobs to run for each entry.
///
/// JSON layout (snake_case keys; unknown keys are rejected):
///   {
///     "name": "paper_fig1",
///     "tau": [{"magnitude": 0.0, "kind": "real"}, ...],   // or a single object
///     "omega_bar": 50, "delta_bar": -50, "eps": 0.055,
///     "alpha": 4 | [re, im] | {"re": 4, "im": 0},
///     "truncation": 32, "t_max": 200, "n_samples": 4001,
///     "coupling_mode": "exact" | "paper",
///     "closed_form_prefactor": "printed" | "bch" | "commutator",
///     "coupling_padding": 32,
///     "q_grid": {"min": -6, "max": 6, "step": 0.1},
///     "q_probe": "deformed" | "undeformed",
///     "revival": {"window": 5, "floor_ratio": 1.5, "min_height": 0.05},
///     "output_dir": "out/fig1",
///     "jobs": [{"type": "inversion"}, {"type": "qfunction", "times": [0, 30]}, ...]
///   }
/// Job types: inversion, qfunction, spectrum, coupling_dump, rabi_table,
/// revival_report. Any job may carry "taus": [...] to restrict it.
struct Scenario {
  std::string name;
  SimulationConfig config;
  std::vector<DeformationParameter> taus;
  std::vector<Job> jobs;
  std::string output_dir;
  GridSpec q_grid;
  ProbeKind q_probe = ProbeKind::Deformed;
  RevivalOptions revival;

  /// Config for one sweep entry.
  SimulationConfig config_for(const DeformationParameter& d) const;
};

/// Throws ConfigError (naming the offending key) on malformed or invalid input.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Bundled presets, e.g. "paper_fig1.json".
std::vector<std::string> preset_names();
/// Accepts the name with or without the ".json" suffix.
std::optional<std::string> preset_text(std::string_view name);

/// File-name fragment for a deformation, e.g. "tau0.003" or "tau0.003i".
std::string tau_tag(const DeformationParameter& d);

struct RunOptions {
  std::filesystem::path output_dir;
  std::optional<CouplingMode> mode;
  int threads = 1;
  bool dump_coupling = false;
};

struct JobReport {
  DeformationParameter tau;
  std::string job;
  std::vector<std::filesystem::path> files;
  double seconds = 0.0;
  std::string warning;
};

/// Runs every job for every sweep entry, writing CSVs into options.output_dir
/// plus a run_metadata.json sidecar (the only file carrying timestamps).
/// Reports come back in sweep order, then job order.
std::vector<JobReport> run_scenario(const Scenario& scenario, const RunOptions& options);

}  // namespace qtrap
