#include "symred/basis.hpp"

#include "symred/errors.hpp"
#include "symred/parallel.hpp"
#include "symred/svd.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <sstream>

namespace symred {

std::string to_string(const ParameterPoint& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

void SnapshotSet::validate() const {
  const auto c = static_cast<std::size_t>(states.cols());
  if (times.size() != c || params.size() != c) {
    throw DimensionError("SnapshotSet: provenance length does not match the column count");
  }
  if (nonlinear.cols() != 0 && nonlinear.cols() != states.cols()) {
    throw DimensionError("SnapshotSet: nonlinear evaluations do not match the state columns");
  }
}

void SnapshotSet::append(const Trajectory& traj, const Matrix* nonlinear_evals) {
  const Eigen::Index old = states.cols();
  if (old > 0 && states.rows() != traj.states.rows()) {
    throw DimensionError("SnapshotSet::append: state dimension mismatch");
  }
  if (nonlinear_evals && nonlinear_evals->cols() != traj.states.cols()) {
    throw DimensionError("SnapshotSet::append: nonlinear evaluations do not match the trajectory");
  }
  if (old > 0 && (nonlinear_evals != nullptr) != (nonlinear.cols() > 0)) {
    throw DimensionError("SnapshotSet::append: mixing sets with and without nonlinear evaluations");
  }
  states.conservativeResize(traj.states.rows(), old + traj.states.cols());
  states.rightCols(traj.states.cols()) = traj.states;
  if (nonlinear_evals) {
    nonlinear.conservativeResize(nonlinear_evals->rows(), old + nonlinear_evals->cols());
    nonlinear.rightCols(nonlinear_evals->cols()) = *nonlinear_evals;
  }
  times.insert(times.end(), traj.times.begin(), traj.times.end());
  params.insert(params.end(), static_cast<std::size_t>(traj.states.cols()), traj.omega);
}

void SnapshotSet::append(const SnapshotSet& other) {
  Trajectory t;
  t.states = other.states;
  t.times = other.times;
  const Eigen::Index old = states.cols();
  append(t, other.has_nonlinear() ? &other.nonlinear : nullptr);
  std::copy(other.params.begin(), other.params.end(), params.begin() + old);
}

Trajectory full_trajectory(std::shared_ptr<const HamiltonianModel> model, const ParameterPoint& omega,
                           const GridSpec& grid, const IntegrateOptions& opts) {
  const Vector z0 = model->initial_state(omega);
  const FullOrderSystem sys(std::move(model), omega);
  // failures during a sweep are useless without the parameter that caused them
  try {
    return integrate(sys, z0, grid, omega, opts);
  } catch (const NonFiniteState& e) {
    throw NonFiniteState(std::string(e.what()) + " at omega = " + to_string(omega), e.step());
  } catch (const NewtonDivergence& e) {
    throw NewtonDivergence(std::string(e.what()) + " at omega = " + to_string(omega));
  }
}

Matrix nonlinear_snapshots(const HamiltonianModel& model, const Matrix& states,
                           const ParameterPoint& omega) {
  Matrix g(states.rows(), states.cols());
  for (Eigen::Index j = 0; j < states.cols(); ++j) g.col(j) = model.nonlinear_grad(states.col(j), omega);
  return g;
}

SnapshotSet collect_snapshots(std::shared_ptr<const HamiltonianModel> model,
                              const std::vector<ParameterPoint>& params, const GridSpec& grid,
                              const IntegrateOptions& opts, bool with_nonlinear, int jobs) {
  std::vector<Trajectory> trajs(params.size());
  std::vector<Matrix> evals(with_nonlinear ? params.size() : 0);
  parallel_for(params.size(), jobs, [&](std::size_t i) {
    trajs[i] = full_trajectory(model, params[i], grid, opts);
    if (with_nonlinear) evals[i] = nonlinear_snapshots(*model, trajs[i].states, params[i]);
  });
  SnapshotSet out;
  for (std::size_t i = 0; i < params.size(); ++i) out.append(trajs[i], with_nonlinear ? &evals[i] : nullptr);
  return out;
}

std::vector<ParameterPoint> tensor_grid(const ParameterBox& box, int per_dim) {
  if (per_dim < 1) throw DimensionError("tensor_grid: need at least one point per dimension");
  const std::size_t d = box.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_dim);
  std::vector<ParameterPoint> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ParameterPoint p;
    std::size_t rest = idx;
    for (std::size_t i = 0; i < d; ++i) {
      const auto j = static_cast<int>(rest % static_cast<std::size_t>(per_dim));
      rest /= static_cast<std::size_t>(per_dim);
      const double lo = box.lower[i], hi = box.upper[i];
      p.coords.push_back(per_dim == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * j / (per_dim - 1));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Matrix pod_basis(const Matrix& s, Eigen::Index k, Vector* singular_values) {
  if (k < 1) throw DimensionError("pod_basis: k must be positive");
  const auto svd = truncated_svd(s, k);
  if (singular_values) *singular_values = svd.singular_values;
  return svd.left_vectors;
}

Matrix pod_basis(const SnapshotSet& s, Eigen::Index k, Vector* singular_values) {
  return pod_basis(s.states, k, singular_values);
}

SymplecticBasis cotangent_lift_basis(const SnapshotSet& s, Eigen::Index k, Vector* singular_values) {
  const Eigen::Index n = s.states.rows() / 2;
  if (s.states.rows() % 2 != 0) throw DimensionError("cotangent_lift_basis: odd state dimension");
  if (k < 1 || k > n) throw DimensionError("cotangent_lift_basis: k must lie in [1, n]");
  Matrix combined(n, 2 * s.cols());
  combined << s.states.topRows(n), s.states.bottomRows(n);
  const auto svd = truncated_svd(combined, k);
  if (singular_values) *singular_values = svd.singular_values;
  Matrix e = Matrix::Zero(2 * n, k);
  e.topRows(n) = svd.left_vectors;
  return SymplecticBasis::from_e_block(std::move(e));
}

SymplecticBasis complex_svd_basis(const SnapshotSet& s, Eigen::Index k, Vector* singular_values) {
  const Eigen::Index n = s.states.rows() / 2;
  if (s.states.rows() % 2 != 0) throw DimensionError("complex_svd_basis: odd state dimension");
  if (k < 1 || k > n) throw DimensionError("complex_svd_basis: k must lie in [1, n]");
  const auto svd = complex_truncated_svd(s.states.topRows(n), s.states.bottomRows(n), k);
  if (singular_values) *singular_values = svd.singular_values;
  Matrix e(2 * n, k);
  e << svd.real_part, svd.imag_part;
  return SymplecticBasis::from_e_block(std::move(e));
}

double hamiltonian_error_indicator(const HamiltonianModel& model, const SymplecticBasis& a,
                                   const ParameterPoint& omega) {
  if (a.n() != model.n) throw DimensionError("hamiltonian_error_indicator: basis dimension mismatch");
  const Vector z0 = model.initial_state(omega);
  return std::abs(eval_hamiltonian(model, z0, omega) - eval_hamiltonian(model, a.project(z0), omega));
}

namespace {

Matrix residual(const Matrix& s, const Matrix& a, ProjectionKind kind) {
  if (s.rows() != a.rows()) throw DimensionError("projection_error: row count mismatch");
  if (a.cols() == 0) return s;
  if (kind == ProjectionKind::orthogonal) return s - a * (a.transpose() * s);
  return s - a * (symplectic_inverse(a) * s);
}

}  // namespace

double projection_error(const Matrix& s, const Matrix& a, ProjectionKind kind) {
  if (s.cols() == 0) return 0.0;
  return residual(s, a, kind).colwise().norm().maxCoeff();
}

double projection_error(const SnapshotSet& s, const SymplecticBasis& a, ProjectionKind kind) {
  return projection_error(s.states, a.matrix(), kind);
}

Vector projection_errors(const Matrix& s, const SymplecticBasis& a) {
  if (s.rows() != 2 * a.n()) throw DimensionError("projection_errors: row count mismatch");
  if (a.empty()) return s.colwise().norm().transpose();
  const Matrix m = a.matrix();
  // A A^+ s with A^+ = J^T A^T J
  const Matrix red = apply_J_rows(m.transpose() * apply_J_rows(s), true);
  return (s - m * red).colwise().norm().transpose();
}

const char* to_string(Indicator ind) {
  switch (ind) {
    case Indicator::hamiltonian_error: return "hamiltonian_error";
    case Indicator::symplectic_projection_error: return "symplectic_projection_error";
    case Indicator::orthogonal_projection_error: return "orthogonal_projection_error";
  }
  return "?";
}

Indicator indicator_from_string(const std::string& s) {
  if (s == "hamiltonian_error") return Indicator::hamiltonian_error;
  if (s == "symplectic_projection_error") return Indicator::symplectic_projection_error;
  if (s == "orthogonal_projection_error") return Indicator::orthogonal_projection_error;
  throw ConfigError("unknown greedy indicator '" + s + "'");
}

namespace {

// Column indices sorted by decreasing value, lowest index first on ties.
std::vector<Eigen::Index> order_desc(const Vector& v) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return v[a] > v[b]; });
  return idx;
}

// Enrich with the first non-degenerate candidate in decreasing-error order.
std::optional<SymplecticBasis> enrich_first(const SymplecticBasis& a, const Matrix& cand,
                                            const Vector& errs, const GramSchmidtOptions& gs) {
  for (Eigen::Index j : order_desc(errs)) {
    if (!(errs[j] > 0.0)) break;
    try {
      return enrich_basis(a, cand.col(j), gs);
    } catch (const DegenerateVector&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace

GreedyResult greedy_symplectic_basis(std::shared_ptr<const HamiltonianModel> model,
                                     const GreedyConfig& cfg) {
  if (cfg.param_grid.empty()) throw DimensionError("greedy: empty parameter grid");
  if (!(cfg.delta > 0.0)) throw DimensionError("greedy: delta must be positive");
  if (cfg.max_k < 1) throw DimensionError("greedy: max_k must be positive");
  for (const auto& w : cfg.param_grid) model->check_parameter(w);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t grid_size = cfg.param_grid.size();
  std::vector<std::optional<Trajectory>> cache(grid_size);
  auto trajectory = [&](std::size_t i) -> const Trajectory& {
    if (!cache[i]) cache[i] = full_trajectory(model, cfg.param_grid[i], cfg.training, cfg.integrate);
    return *cache[i];
  };
  const bool projection_indicator = cfg.indicator != Indicator::hamiltonian_error;
  if (projection_indicator) {
    parallel_for(grid_size, cfg.jobs, [&](std::size_t i) {
      cache[i] = full_trajectory(model, cfg.param_grid[i], cfg.training, cfg.integrate);
    });
  }

  GreedyResult out;
  const Vector z_init = model->initial_state(cfg.param_grid.front());
  try {
    out.basis = enrich_basis(SymplecticBasis(model->n), z_init, cfg.gram_schmidt);
  } catch (const DegenerateVector&) {
    throw DegenerateVector("greedy: initial state at the first grid point is zero");
  }
  out.report.selected_params.push_back(cfg.param_grid.front());

  std::vector<bool> in_cache(grid_size, false);
  auto sigma_on = [&](const Matrix& cand) {
    if (cfg.evaluation_set) return projection_error(*cfg.evaluation_set, out.basis.matrix(),
                                                    ProjectionKind::symplectic);
    return cand.cols() == 0 ? 0.0 : projection_errors(cand, out.basis).maxCoeff();
  };

  Vector ind(static_cast<Eigen::Index>(grid_size));
  while (true) {
    parallel_for(grid_size, cfg.jobs, [&](std::size_t i) {
      const auto& w = cfg.param_grid[i];
      switch (cfg.indicator) {
        case Indicator::hamiltonian_error:
          ind[static_cast<Eigen::Index>(i)] = hamiltonian_error_indicator(*model, out.basis, w);
          break;
        case Indicator::symplectic_projection_error:
          ind[static_cast<Eigen::Index>(i)] = projection_errors(cache[i]->states, out.basis).maxCoeff();
          break;
        case Indicator::orthogonal_projection_error:
          ind[static_cast<Eigen::Index>(i)] =
              projection_error(cache[i]->states, out.basis.matrix(), ProjectionKind::orthogonal);
          break;
      }
    });
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < ind.size(); ++i) {
      if (ind[i] > ind[best]) best = i;
    }
    out.report.indicator_values.push_back(ind[best]);
    out.report.wall_seconds.push_back(elapsed());
    if (!(ind[best] > cfg.delta)) {
      out.report.converged = true;
      out.report.stop_reason = "indicator below tolerance";
      break;
    }
    if (out.basis.k() >= cfg.max_k || out.basis.k() >= model->n) {
      out.report.stop_reason = "reached max_k";
      break;
    }

    const auto star = static_cast<std::size_t>(best);
    const Trajectory& traj = trajectory(star);
    if (!in_cache[star]) {
      if (cfg.record_nonlinear) {
        const Matrix g = nonlinear_snapshots(*model, traj.states, traj.omega);
        out.snapshots.append(traj, &g);
      } else {
        out.snapshots.append(traj);
      }
      in_cache[star] = true;
    }
    const Matrix& cand = cfg.fresh_snapshots ? traj.states : out.snapshots.states;
    const Vector errs = projection_errors(cand, out.basis);
    out.report.sigma.push_back(cfg.evaluation_set ? sigma_on(cand) : errs.maxCoeff());

    auto next = enrich_first(out.basis, cand, errs, cfg.gram_schmidt);
    if (!next) {
      throw StagnationError("greedy: every snapshot at the selected parameter already lies in span(A)");
    }
    out.basis = std::move(*next);
    out.report.selected_params.push_back(cfg.param_grid[star]);
  }

  // sigma for the final basis size
  if (cfg.evaluation_set || out.snapshots.cols() > 0) {
    const Matrix& cand = out.snapshots.states;
    out.report.sigma.push_back(sigma_on(cand));
  }
  out.report.final_k = out.basis.k();
  return out;
}

GreedyResult greedy_from_snapshots(const Matrix& s, double delta, Eigen::Index max_k,
                                   ProjectionKind kind, const GramSchmidtOptions& gs) {
  if (s.rows() % 2 != 0) throw DimensionError("greedy_from_snapshots: odd state dimension");
  if (s.cols() == 0) throw DimensionError("greedy_from_snapshots: empty snapshot set");
  const auto start = std::chrono::steady_clock::now();
  GreedyResult out;
  Eigen::Index first;
  s.colwise().norm().maxCoeff(&first);
  out.basis = enrich_basis(SymplecticBasis(s.rows() / 2), s.col(first), gs);
  while (true) {
    const Vector errs = kind == ProjectionKind::symplectic
                            ? projection_errors(s, out.basis)
                            : Vector(residual(s, out.basis.matrix(), kind).colwise().norm().transpose());
    const double top = errs.maxCoeff();
    out.report.sigma.push_back(top);
    out.report.indicator_values.push_back(top);
    out.report.wall_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (!(top > delta)) {
      out.report.converged = true;
      out.report.stop_reason = "indicator below tolerance";
      break;
    }
    if (out.basis.k() >= max_k || out.basis.k() >= out.basis.n()) {
      out.report.stop_reason = "reached max_k";
      break;
    }
    auto next = enrich_first(out.basis, s, errs, gs);
    if (!next) throw StagnationError("greedy_from_snapshots: every remaining snapshot lies in span(A)");
    out.basis = std::move(*next);
  }
  out.report.final_k = out.basis.k();
  Trajectory t;
  t.states = s;
  t.times.assign(static_cast<std::size_t>(s.cols()), 0.0);
  out.snapshots.append(t);
  return out;
}

}  // namespace symred
