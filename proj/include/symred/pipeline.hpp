#pragma once

#include "symred/config.hpp"
#include "symred/rom.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace symred {

struct RunOptions {
  int jobs = 1;
  /// Overrides output.dir.
  std::optional<std::filesystem::path> out;
  bool fresh_snapshots = false;
  std::ostream* log = nullptr;
};

std::filesystem::path output_dir(const ExperimentConfig& c, const RunOptions& o);

// Artifact layout under the output directory:
//   snapshots/  states.smrb nonlinear.smrb provenance.csv meta.json
//   basis/<method>/  basis.smrb meta.json singular_values.csv | greedy_report.csv
//   deim/  U.smrb indices.csv basis.smrb (sdeim) meta.json hamiltonicity.csv
//   sim/<label>/  error_series.csv fom_states.smrb rom_states.smrb reduced_linear.smrb rom.json
//   report/  per-figure csv files and summary.txt

void cmd_snapshots(const ExperimentConfig& c, const RunOptions& o);
void cmd_build_basis(const ExperimentConfig& c, const RunOptions& o);
void cmd_build_deim(const ExperimentConfig& c, const RunOptions& o);
void cmd_simulate(const ExperimentConfig& c, const RunOptions& o);
void cmd_report(const ExperimentConfig& c, const RunOptions& o);

/// ROM for the configured basis and DEIM choice, assembled from the
/// artifacts under `out`.
ReducedModel load_rom(const ExperimentConfig& c, const std::filesystem::path& out,
                      std::shared_ptr<const HamiltonianModel> model, const ParameterPoint& omega);

/// Directory name under sim/ for the configured method.
std::string simulation_label(const ExperimentConfig& c, const HamiltonianModel& model);

}  // namespace symred
