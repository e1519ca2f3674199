#pragma once

#include "symred/basis.hpp"
#include "symred/integrators.hpp"
#include "symred/models.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace symred {

/// One experiment: model, training grid, basis and DEIM choices, stepping and
/// output location. Parsed from an INI file with sections [model],
/// [parameters], [basis], [deim], [integrator], [output], [run].
struct ExperimentConfig {
  std::string model_type = "wave";  // wave | nls
  GridSpec grid;
  double c2 = 0.1;        // wave
  double scaling = 0.11;  // nls, domain length 2 pi / scaling
  double carrier = 1.0;   // nls
  double center = -1.0;   // nls, negative = middle of the domain

  int param_per_dim = 3;
  ParameterPoint test;

  std::string basis_method = "greedy";  // greedy | pod | cotangent | csvd | identity
  Indicator indicator = Indicator::hamiltonian_error;
  double delta = 5e-3;
  Eigen::Index max_k = 10;
  Eigen::Index pod_k = 20;
  Eigen::Index svd_k = 10;
  double training_t_final = 1.0;
  Eigen::Index snapshot_stride = 1;
  bool fresh_snapshots = false;

  std::string deim_method = "none";  // none | deim | sdeim
  double deim_delta = 1e-4;
  Eigen::Index deim_m = 0;

  Scheme scheme = Scheme::stormer_verlet;
  NewtonConfig newton;

  std::string out_dir = "out";
  std::uint64_t seed = 1;

  bool operator==(const ExperimentConfig&) const = default;

  /// Same grid with t_final replaced by the training horizon.
  GridSpec training_grid() const;
  IntegrateOptions integrate_options(Eigen::Index stride = 1) const;
};

/// Throws ConfigError on syntax errors, unknown or missing keys and values
/// out of range.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
ExperimentConfig load_preset(const std::string& name);

/// Canonical INI text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

/// FNV-1a of the canonical text, 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

void validate_config(const ExperimentConfig& c);

std::shared_ptr<const HamiltonianModel> build_model(const ExperimentConfig& c);

/// Tensor grid over the model's parameter box.
std::vector<ParameterPoint> parameter_grid(const ExperimentConfig& c, const HamiltonianModel& model);

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

}  // namespace symred
