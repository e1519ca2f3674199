// Command-line driver: symred <snapshots|build-basis|build-deim|simulate|report>
#include "symred/errors.hpp"
#include "symred/pipeline.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving reduced models for parametric Hamiltonian systems"};
  app.require_subcommand(1);

  std::string config_path, preset;
  std::string out;
  int jobs = 1;
  bool fresh = false;

  using Cmd = void (*)(const symred::ExperimentConfig&, const symred::RunOptions&);
  const std::pair<const char*, Cmd> cmds[] = {
      {"snapshots", symred::cmd_snapshots},   {"build-basis", symred::cmd_build_basis},
      {"build-deim", symred::cmd_build_deim}, {"simulate", symred::cmd_simulate},
      {"report", symred::cmd_report},
  };
  const char* help[] = {
      "integrate the full model over the training grid",
      "build the reduced basis (greedy, pod, cotangent, csvd)",
      "build the DEIM operator or the SDEIM-enlarged basis",
      "run full and reduced model at the test parameter",
      "write plot-ready CSV files and a summary table",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(cmds); ++i) {
    auto* s = app.add_subcommand(cmds[i].first, help[i]);
    auto* c = s->add_option("--config", config_path, "INI experiment file")->check(CLI::ExistingFile);
    auto* p = s->add_option("--preset", preset, "built-in config: " + [] {
      std::string names;
      for (const auto& n : symred::preset_names()) names += (names.empty() ? "" : ", ") + n;
      return names;
    }());
    c->excludes(p);
    s->add_option("--jobs", jobs, "worker threads for parameter sweeps")->check(CLI::PositiveNumber);
    s->add_option("--out", out, "output directory (overrides output.dir)");
    s->add_flag("--fresh-snapshots", fresh, "greedy: search only the newest trajectory");
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (config_path.empty() == preset.empty()) {
      throw symred::ConfigError("give exactly one of --config or --preset");
    }
    const auto cfg = preset.empty() ? symred::load_config(config_path) : symred::load_preset(preset);
    symred::RunOptions opts;
    opts.jobs = jobs;
    if (!out.empty()) opts.out = out;
    opts.fresh_snapshots = fresh;
    opts.log = &std::cerr;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) cmds[i].second(cfg, opts);
    }
  } catch (const symred::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const symred::ZeroResidual& e) {
    std::cerr << "numerical error: " << e.what() << " (column " << e.column() << ")\n";
    return kNumericalError;
  } catch (const symred::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
