#include "symred/pipeline.hpp"

#include "symred/deim.hpp"
#include "symred/errors.hpp"
#include "symred/io.hpp"
#include "symred/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace symred {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void say(const RunOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << '\n';
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing artifact " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Matrix require_matrix(const fs::path& path, const char* hint) {
  if (!fs::exists(path)) throw ConfigError("missing artifact " + path.string() + " (run " + hint + " first)");
  return read_matrix_binary(path);
}

json point_json(const ParameterPoint& p) { return json(p.coords); }

bool is_symplectic_method(const std::string& m) { return m != "pod"; }

SnapshotSet as_set(const Matrix& s) {
  SnapshotSet set;
  set.states = s;
  set.times.assign(static_cast<std::size_t>(s.cols()), 0.0);
  set.params.assign(static_cast<std::size_t>(s.cols()), ParameterPoint{});
  return set;
}

SymplecticBasis basis_from_matrix(const Matrix& a, const fs::path& where) {
  if (a.cols() % 2 != 0) throw ConfigError(where.string() + ": odd column count for a symplectic basis");
  try {
    return SymplecticBasis::from_e_block(a.leftCols(a.cols() / 2));
  } catch (const SymplecticityError& e) {
    throw SymplecticityError(where.string() + ": " + e.what());
  }
}

fs::path nonlinear_source(const ExperimentConfig& c, const fs::path& out) {
  return c.basis_method == "greedy" ? out / "basis" / "greedy" / "nonlinear.smrb"
                                    : out / "snapshots" / "nonlinear.smrb";
}

std::vector<double> report_times(const ExperimentConfig& c) {
  return c.model_type == "wave" ? std::vector<double>{0, 1, 2} : std::vector<double>{0, 10, 20};
}

// "a,b,c" lines of a CSV with header; cells kept as text.
std::vector<std::vector<std::string>> read_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing artifact " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

fs::path output_dir(const ExperimentConfig& c, const RunOptions& o) { return o.out ? *o.out : fs::path(c.out_dir); }

std::string simulation_label(const ExperimentConfig& c, const HamiltonianModel& model) {
  std::string label = c.basis_method;
  if (model.nonlinearity && c.deim_method != "none") label += "-" + c.deim_method;
  return label;
}

void cmd_snapshots(const ExperimentConfig& c, const RunOptions& o) {
  const auto model = build_model(c);
  const fs::path dir = output_dir(c, o) / "snapshots";
  const auto params = parameter_grid(c, *model);
  say(o, "snapshots: " + std::to_string(params.size()) + " parameter points, " + model->id);
  Stopwatch sw;
  const SnapshotSet s = collect_snapshots(model, params, c.training_grid(), c.integrate_options(c.snapshot_stride),
                                          model->nonlinearity.has_value(), o.jobs);
  const double secs = sw.seconds();
  write_matrix_binary(dir / "states.smrb", s.states);
  write_matrix_binary(dir / "nonlinear.smrb", s.has_nonlinear() ? s.nonlinear : Matrix(s.states.rows(), 0));
  {
    std::ofstream prov(dir / "provenance.csv");
    prov << "column,t,omega\n";
    for (std::size_t j = 0; j < s.times.size(); ++j) {
      prov << j << ',' << format_double(s.times[j]) << ',';
      for (std::size_t d = 0; d < s.params[j].size(); ++d) prov << (d ? ";" : "") << format_double(s.params[j][d]);
      prov << '\n';
    }
  }
  write_json(dir / "meta.json", {{"model", model->id},
                                 {"n", model->n},
                                 {"dt", c.grid.dt},
                                 {"t_final", c.training_t_final},
                                 {"stride", c.snapshot_stride},
                                 {"parameter_points", params.size()},
                                 {"columns", s.cols()},
                                 {"config_hash", config_hash(c)},
                                 {"wall_seconds", secs}});
  say(o, "snapshots: wrote " + std::to_string(s.cols()) + " columns to " + dir.string());
}

void cmd_build_basis(const ExperimentConfig& c, const RunOptions& o) {
  const auto model = build_model(c);
  const fs::path out = output_dir(c, o);
  const fs::path dir = out / "basis" / c.basis_method;
  json meta{{"method", c.basis_method}, {"n", model->n}, {"config_hash", config_hash(c)}};
  Stopwatch sw;
  Matrix written;
  Vector sv;
  double upstream_seconds = 0.0;

  if (c.basis_method == "greedy") {
    GreedyConfig g;
    g.delta = c.delta;
    g.param_grid = parameter_grid(c, *model);
    g.max_k = c.max_k;
    g.indicator = c.indicator;
    g.training = c.training_grid();
    g.integrate = c.integrate_options(c.snapshot_stride);
    g.fresh_snapshots = c.fresh_snapshots || o.fresh_snapshots;
    g.record_nonlinear = model->nonlinearity.has_value();
    g.jobs = o.jobs;
    say(o, std::string("build-basis: greedy over ") + std::to_string(g.param_grid.size()) + " points, indicator " +
               to_string(g.indicator));
    const auto res = greedy_symplectic_basis(model, g);
    written = res.basis.matrix();
    write_greedy_report_csv(dir / "greedy_report.csv", res.report);
    if (g.record_nonlinear) write_matrix_binary(dir / "nonlinear.smrb", res.snapshots.nonlinear);
    meta["k"] = res.basis.k();
    meta["converged"] = res.report.converged;
    meta["stop_reason"] = res.report.stop_reason;
    meta["fresh_snapshots"] = g.fresh_snapshots;
  } else if (c.basis_method == "identity") {
    Matrix e = Matrix::Zero(2 * model->n, model->n);
    e.topRows(model->n).setIdentity();
    written = SymplecticBasis::from_e_block(e).matrix();
    meta["k"] = model->n;
  } else {
    const Matrix s = require_matrix(out / "snapshots" / "states.smrb", "snapshots");
    if (s.rows() != 2 * model->n) throw ConfigError("snapshot dimension does not match the model");
    upstream_seconds = read_json(out / "snapshots" / "meta.json").value("wall_seconds", 0.0);
    if (c.basis_method == "pod") {
      written = pod_basis(s, std::min<Eigen::Index>(c.pod_k, s.cols()), &sv);
      meta["k"] = written.cols();
    } else {
      const auto set = as_set(s);
      const auto a = c.basis_method == "cotangent" ? cotangent_lift_basis(set, c.svd_k, &sv)
                                                   : complex_svd_basis(set, c.svd_k, &sv);
      written = a.matrix();
      meta["k"] = a.k();
    }
  }
  const double secs = sw.seconds();
  write_matrix_binary(dir / "basis.smrb", written);
  if (sv.size() > 0) {
    std::ofstream f(dir / "singular_values.csv");
    f << "index,sigma\n";
    for (Eigen::Index i = 0; i < sv.size(); ++i) f << i + 1 << ',' << format_double(sv[i]) << '\n';
  }
  meta["columns"] = written.cols();
  meta["orthonormality_residual"] = orthonormality_residual(written);
  if (is_symplectic_method(c.basis_method)) meta["symplectic_residual"] = check_symplectic(written);
  meta["wall_seconds"] = secs;
  meta["offline_seconds"] = secs + upstream_seconds;
  write_json(dir / "meta.json", meta);
  say(o, "build-basis: " + c.basis_method + " with " + std::to_string(written.cols()) + " columns in " +
             dir.string());
}

void cmd_build_deim(const ExperimentConfig& c, const RunOptions& o) {
  if (c.deim_method == "none") {
    say(o, "build-deim: deim.method = none, nothing to do");
    return;
  }
  const auto model = build_model(c);
  if (!model->nonlinearity) throw ConfigError("build-deim: model " + model->id + " has no nonlinear term");
  const fs::path out = output_dir(c, o);
  const fs::path dir = out / "deim";
  const fs::path src = nonlinear_source(c, out);
  const Matrix sg = require_matrix(src, c.basis_method == "greedy" ? "build-basis" : "snapshots");
  if (sg.cols() == 0) throw ConfigError("build-deim: empty nonlinear snapshot set in " + src.string());
  const fs::path basis_file = out / "basis" / c.basis_method / "basis.smrb";
  const Matrix basis = require_matrix(basis_file, "build-basis");

  json meta{{"method", c.deim_method}, {"m", c.deim_m}, {"source", src.string()}, {"config_hash", config_hash(c)}};
  Stopwatch sw;
  DeimOperator op;
  if (c.deim_method == "sdeim") {
    if (!is_symplectic_method(c.basis_method)) throw ConfigError("sdeim needs a symplectic basis");
    SdeimReport rep;
    const auto a = sdeim_basis(basis_from_matrix(basis, basis_file), sg, c.deim_delta, c.deim_m, &rep);
    const Matrix am = a.matrix();
    op = build_deim_operator(am, am, a.inverse());
    write_matrix_binary(dir / "basis.smrb", am);
    std::ofstream f(dir / "sdeim_errors.csv");
    f << "added_pairs,max_error\n";
    for (std::size_t i = 0; i < rep.max_errors.size(); ++i) f << i << ',' << format_double(rep.max_errors[i]) << '\n';
    meta["added_pairs"] = rep.added_pairs;
    meta["k"] = a.k();
    meta["symplectic_residual"] = check_symplectic(am);
  } else {
    const Matrix u = pod_basis(sg, std::min<Eigen::Index>(c.deim_m, sg.cols()));
    const Matrix left = is_symplectic_method(c.basis_method) ? symplectic_inverse(basis) : Matrix(basis.transpose());
    op = build_deim_operator(u, basis, left);
  }
  write_matrix_binary(dir / "U.smrb", op.u);
  write_index_csv(dir / "indices.csv", op.indices);
  std::vector<Eigen::Index> sorted = op.indices;
  std::sort(sorted.begin(), sorted.end());
  meta["samples"] = op.sample_count();
  meta["paired"] = op.paired;
  meta["closure_ok"] = pair_indices(op.indices, model->n) == sorted;
  meta["condition"] = op.condition;
  meta["wall_seconds"] = sw.seconds();

  if (is_symplectic_method(c.basis_method)) {
    // sampled check of rhs = J grad H~ at reduced states of the test trajectory
    const auto rom = load_rom(c, out, model, c.test);
    const auto fom = full_trajectory(model, c.test, c.training_grid(), c.integrate_options(1));
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, fom.states.cols() - 1);
    std::ofstream f(dir / "hamiltonicity.csv");
    f << "sample,t,residual\n";
    double worst = 0;
    for (int s = 0; s < 50; ++s) {
      const Eigen::Index j = pick(rng);
      const double r = hamiltonian_field_residual(rom, rom.reduce(fom.states.col(j)));
      worst = std::max(worst, r);
      f << s << ',' << format_double(fom.times[static_cast<std::size_t>(j)]) << ',' << format_double(r) << '\n';
    }
    meta["max_hamiltonicity_residual"] = worst;
  }
  write_json(dir / "meta.json", meta);
  say(o, "build-deim: " + c.deim_method + " with " + std::to_string(op.sample_count()) + " sampled entries");
}

ReducedModel load_rom(const ExperimentConfig& c, const fs::path& out, std::shared_ptr<const HamiltonianModel> model,
                      const ParameterPoint& omega) {
  const fs::path basis_file = out / "basis" / c.basis_method / "basis.smrb";
  const bool nonlinear = model->nonlinearity.has_value();
  const std::string deim = nonlinear ? c.deim_method : "none";
  NonlinearPath path = nonlinear ? NonlinearPath::dense : NonlinearPath::none;

  if (!is_symplectic_method(c.basis_method)) {
    const Matrix v = require_matrix(basis_file, "build-basis");
    if (deim == "sdeim") throw ConfigError("sdeim needs a symplectic basis");
    if (deim == "deim") {
      const Matrix u = require_matrix(out / "deim" / "U.smrb", "build-deim");
      const auto op = build_deim_operator(u, v, v.transpose());
      return assemble_pod_rom(model, omega, v, NonlinearPath::deim, &op);
    }
    return assemble_pod_rom(model, omega, v, path);
  }
  if (deim == "sdeim") {
    const fs::path f = out / "deim" / "basis.smrb";
    const auto a = basis_from_matrix(require_matrix(f, "build-deim"), f);
    const Matrix am = a.matrix();
    const auto op = build_deim_operator(am, am, a.inverse());
    return assemble_symplectic_rom(model, omega, a, NonlinearPath::sdeim, &op);
  }
  const auto a = basis_from_matrix(require_matrix(basis_file, "build-basis"), basis_file);
  if (deim == "deim") {
    const Matrix u = require_matrix(out / "deim" / "U.smrb", "build-deim");
    const auto op = build_deim_operator(u, a.matrix(), a.inverse());
    return assemble_symplectic_rom(model, omega, a, NonlinearPath::deim, &op);
  }
  return assemble_symplectic_rom(model, omega, a, path);
}

void cmd_simulate(const ExperimentConfig& c, const RunOptions& o) {
  const auto model = build_model(c);
  const fs::path out = output_dir(c, o);
  const std::string label = simulation_label(c, *model);
  const fs::path dir = out / "sim" / label;
  const auto rom = load_rom(c, out, model, c.test);
  say(o, "simulate: " + label + " ROM of dimension " + std::to_string(rom.dim()));

  Stopwatch fsw;
  const auto fom = full_trajectory(model, c.test, c.grid, c.integrate_options());
  const double fom_secs = fsw.seconds();
  Stopwatch rsw;
  const auto rt = simulate_rom(rom, c.grid, c.integrate_options());
  const double rom_secs = rsw.seconds();
  const auto es = error_series(fom, rom, rt);

  write_error_series_csv(dir / "error_series.csv", es);
  write_matrix_binary(dir / "fom_states.smrb", fom.states);
  write_matrix_binary(dir / "rom_states.smrb", rt.states);
  write_matrix_binary(dir / "reduced_linear.smrb", rom.reduced_linear);
  double dev = 0, max_l2 = 0;
  for (std::size_t i = 0; i < es.times.size(); ++i) {
    dev = std::max(dev, std::abs(es.delta_h[i] - es.delta_h[0]));
    max_l2 = std::max(max_l2, es.l2[i]);
  }
  json meta{{"label", label},
            {"kind", rom.kind == RomKind::symplectic ? "symplectic" : "pod_galerkin"},
            {"nonlinear_path", to_string(rom.path)},
            {"dim", rom.dim()},
            {"omega", point_json(c.test)},
            {"basis", (out / "basis" / c.basis_method / "basis.smrb").string()},
            {"final_l2", es.l2.back()},
            {"max_l2", max_l2},
            {"delta_h0", es.delta_h.front()},
            {"max_delta_h_deviation", dev},
            {"fom_seconds", fom_secs},
            {"rom_seconds", rom_secs},
            {"config_hash", config_hash(c)}};
  if (rom.deim) {
    meta["deim_samples"] = rom.deim->sample_count();
    meta["deim_indices"] = (out / "deim" / "indices.csv").string();
  }
  write_json(dir / "rom.json", meta);
  say(o, "simulate: final L2 error " + format_double(es.l2.back()) + ", written to " + dir.string());
}

void cmd_report(const ExperimentConfig& c, const RunOptions& o) {
  const auto model = build_model(c);
  const fs::path out = output_dir(c, o);
  const fs::path dir = out / "report";
  fs::create_directories(dir);
  int produced = 0;

  struct Row {
    std::string name;
    std::optional<double> offline, final_l2, dh_dev;
  };
  std::map<std::string, Row> rows;

  if (fs::exists(out / "basis")) {
    std::vector<fs::path> methods;
    for (const auto& e : fs::directory_iterator(out / "basis")) methods.push_back(e.path());
    std::sort(methods.begin(), methods.end());
    for (const auto& m : methods) {
      const std::string name = m.filename().string();
      if (fs::exists(m / "meta.json")) rows[name].offline = read_json(m / "meta.json").value("offline_seconds", 0.0);
      if (fs::exists(m / "singular_values.csv")) {
        fs::copy_file(m / "singular_values.csv", dir / ("singular_values_" + name + ".csv"),
                      fs::copy_options::overwrite_existing);
        ++produced;
      }
      if (fs::exists(m / "greedy_report.csv")) {
        std::ofstream f(dir / "greedy_convergence.csv");
        f << "k,max_l2_error,indicator\n";
        const double w = std::sqrt(model->grid.dx());
        for (const auto& r : read_rows(m / "greedy_report.csv")) {
          if (r.size() < 4) continue;
          f << r[0] << ',' << (r[3].empty() ? "" : format_double(w * std::stod(r[3]))) << ',' << r[2] << '\n';
        }
        ++produced;
      }
    }
  }

  if (fs::exists(out / "sim")) {
    std::vector<fs::path> sims;
    for (const auto& e : fs::directory_iterator(out / "sim")) sims.push_back(e.path());
    std::sort(sims.begin(), sims.end());
    for (const auto& s : sims) {
      const std::string label = s.filename().string();
      if (!fs::exists(s / "error_series.csv")) continue;
      const auto es = read_rows(s / "error_series.csv");
      {
        std::ofstream h(dir / ("hamiltonian_" + label + ".csv"));
        std::ofstream l(dir / ("l2_error_" + label + ".csv"));
        h << "t,H_full,H_rom\n";
        l << "t,l2\n";
        for (const auto& r : es) {
          h << r[0] << ',' << r[2] << ',' << r[3] << '\n';
          l << r[0] << ',' << r[1] << '\n';
        }
      }
      produced += 2;
      const auto meta = read_json(s / "rom.json");
      const std::string basis_name = label.substr(0, label.find('-'));
      Row& row = rows[label];
      row.final_l2 = meta.value("final_l2", 0.0);
      row.dh_dev = meta.value("max_delta_h_deviation", 0.0);
      if (!row.offline && rows.count(basis_name)) row.offline = rows[basis_name].offline;

      // solution panels
      const Matrix z = read_matrix_binary(s / "fom_states.smrb");
      const Matrix y = read_matrix_binary(s / "rom_states.smrb");
      const Matrix basis = read_matrix_binary(label.find("sdeim") != std::string::npos
                                                  ? out / "deim" / "basis.smrb"
                                                  : out / "basis" / basis_name / "basis.smrb");
      const Eigen::Index n = model->n;
      for (double t : report_times(c)) {
        const auto j = static_cast<Eigen::Index>(std::llround(t / c.grid.dt));
        if (j >= z.cols() || j >= y.cols()) continue;
        const Vector zr = basis * y.col(j);
        std::ostringstream name;
        name << "solution_" << label << "_t" << t << ".csv";
        std::ofstream f(dir / name.str());
        f << "x,q_full,p_full,q_rom,p_rom\n";
        for (Eigen::Index i = 0; i < n; ++i) {
          f << format_double(static_cast<double>(i + 1) * model->grid.dx()) << ',' << format_double(z(i, j)) << ','
            << format_double(z(n + i, j)) << ',' << format_double(zr[i]) << ',' << format_double(zr[n + i]) << '\n';
        }
        ++produced;
      }
    }
  }
  if (produced == 0) throw ConfigError("report: no artifacts under " + out.string());

  std::ofstream sum(dir / "summary.txt");
  sum << "model " << model->id << ", config " << config_hash(c) << "\n\n";
  sum << std::left << std::setw(20) << "method" << std::setw(16) << "offline [s]" << std::setw(24) << "final L2 error"
      << "max |dH(t) - dH(0)|\n";
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return std::string(buf);
  };
  for (const auto& [name, r] : rows) {
    sum << std::setw(20) << name << std::setw(16) << cell(r.offline) << std::setw(24) << cell(r.final_l2)
        << cell(r.dh_dev) << '\n';
  }
  if (rows.count("greedy") && rows["greedy"].offline) {
    for (const char* svd : {"cotangent", "csvd", "pod"}) {
      if (rows.count(svd) && rows[svd].offline && *rows[svd].offline > 0) {
        sum << "\noffline time greedy / " << svd << ": " << std::setprecision(3)
            << *rows["greedy"].offline / *rows[svd].offline;
      }
    }
    sum << '\n';
  }
  say(o, "report: " + std::to_string(produced) + " data files in " + dir.string());
}

}  // namespace symred
