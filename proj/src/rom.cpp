#include "symred/rom.hpp"

#include "symred/errors.hpp"

#include <cmath>
#include <string>

namespace symred {

const char* to_string(NonlinearPath p) {
  switch (p) {
    case NonlinearPath::none: return "none";
    case NonlinearPath::dense: return "dense";
    case NonlinearPath::deim: return "deim";
    case NonlinearPath::sdeim: return "sdeim";
  }
  return "?";
}

NonlinearPath nonlinear_path_from_string(const std::string& s) {
  if (s == "none") return NonlinearPath::none;
  if (s == "dense") return NonlinearPath::dense;
  if (s == "deim") return NonlinearPath::deim;
  if (s == "sdeim") return NonlinearPath::sdeim;
  throw ConfigError("unknown nonlinear path '" + s + "'");
}

namespace {

// J_g(z) M for the pointwise nonlinearity, O(n cols).
Matrix pointwise_jacobian_times(const HamiltonianModel& model, const Vector& z,
                                const ParameterPoint& omega, const Matrix& m) {
  const Eigen::Index n = model.n;
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  if (!model.nonlinearity) return out;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = model.nonlinearity->eval(z[i], z[n + i], omega);
    out.row(i) = v.jac[0] * m.row(i) + v.jac[1] * m.row(n + i);
    out.row(n + i) = v.jac[2] * m.row(i) + v.jac[3] * m.row(n + i);
  }
  return out;
}

void finish(ReducedModel& rom, NonlinearPath path, const DeimOperator* deim) {
  rom.path = path;
  rom.left_j = apply_J_rows(rom.left.transpose(), true).transpose();
  const Matrix l = rom.model->linear_part(rom.omega);
  rom.reduced_linear = rom.left_j * (l * rom.basis);
  if (path == NonlinearPath::deim || path == NonlinearPath::sdeim) {
    if (!deim) throw DimensionError("assemble ROM: the sampled paths need a DEIM operator");
    if (deim->precomputed.rows() != rom.dim() || deim->sampled_basis.cols() != rom.dim()) {
      throw DimensionError("assemble ROM: DEIM operator was built for another basis");
    }
    rom.deim = *deim;
  }
}

}  // namespace

ReducedModel assemble_symplectic_rom(std::shared_ptr<const HamiltonianModel> model,
                                     const ParameterPoint& omega, const SymplecticBasis& a,
                                     NonlinearPath path, const DeimOperator* deim, double tol) {
  model->check_parameter(omega);
  if (a.n() != model->n) throw DimensionError("assemble_symplectic_rom: basis dimension mismatch");
  ReducedModel rom;
  rom.kind = RomKind::symplectic;
  rom.model = std::move(model);
  rom.omega = omega;
  rom.basis = a.matrix();
  const double res = check_symplectic(rom.basis);
  if (res > tol) {
    throw SymplecticityError("assemble_symplectic_rom: symplecticity residual " + std::to_string(res));
  }
  rom.left = symplectic_inverse(rom.basis);
  finish(rom, path, deim);
  return rom;
}

ReducedModel assemble_pod_rom(std::shared_ptr<const HamiltonianModel> model,
                              const ParameterPoint& omega, const Matrix& v, NonlinearPath path,
                              const DeimOperator* deim, double tol) {
  model->check_parameter(omega);
  if (v.rows() != 2 * model->n) throw DimensionError("assemble_pod_rom: basis dimension mismatch");
  const double res = (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm();
  if (res > tol) throw NumericalError("assemble_pod_rom: basis is not orthonormal (" + std::to_string(res) + ")");
  ReducedModel rom;
  rom.kind = RomKind::pod_galerkin;
  rom.model = std::move(model);
  rom.omega = omega;
  rom.basis = v;
  rom.left = v.transpose();
  finish(rom, path, deim);
  return rom;
}

Vector ReducedModel::rhs(const Vector& y) const {
  if (y.size() != dim()) throw DimensionError("ReducedModel::rhs: dimension mismatch");
  Vector f = reduced_linear * y;
  switch (path) {
    case NonlinearPath::none:
      break;
    case NonlinearPath::dense:
      if (model->nonlinearity) f += left_j * model->nonlinear_grad(basis * y, omega);
      break;
    case NonlinearPath::deim:
    case NonlinearPath::sdeim:
      f += deim_apply(*deim, deim_sample(*deim, *model, omega, y));
      break;
  }
  return f;
}

Matrix ReducedModel::rhs_jacobian(const Vector& y) const {
  if (y.size() != dim()) throw DimensionError("ReducedModel::rhs_jacobian: dimension mismatch");
  Matrix jac = reduced_linear;
  switch (path) {
    case NonlinearPath::none:
      break;
    case NonlinearPath::dense:
      if (model->nonlinearity) jac += left_j * pointwise_jacobian_times(*model, basis * y, omega, basis);
      break;
    case NonlinearPath::deim:
    case NonlinearPath::sdeim:
      jac += reduced_jacobian(*deim, *model, omega, y);
      break;
  }
  return jac;
}

double ReducedModel::reduced_hamiltonian(const Vector& y) const {
  return eval_hamiltonian(*model, lift(y), omega);
}

double hamiltonian_field_residual(const ReducedModel& rom, const Vector& y, double h) {
  if (rom.kind != RomKind::symplectic) throw DimensionError("hamiltonian_field_residual: needs a symplectic ROM");
  Vector grad(y.size());
  Vector yp = y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    yp[i] = y[i] + h;
    const double up = rom.reduced_hamiltonian(yp);
    yp[i] = y[i] - h;
    const double down = rom.reduced_hamiltonian(yp);
    yp[i] = y[i];
    grad[i] = (up - down) / (2 * h);
  }
  grad /= rom.model->energy_scale;
  return (rom.rhs(y) - apply_J(grad)).cwiseAbs().maxCoeff();
}

Vector ReducedModel::lift(const Vector& y) const {
  if (y.size() != dim()) throw DimensionError("ReducedModel::lift: dimension mismatch");
  return basis * y;
}

Vector ReducedModel::reduce(const Vector& z) const {
  if (z.size() != basis.rows()) throw DimensionError("ReducedModel::reduce: dimension mismatch");
  return left * z;
}

ReducedHamiltonianSystem::ReducedHamiltonianSystem(const ReducedModel& rom) : rom_(rom) {
  if (rom.kind != RomKind::symplectic) throw DimensionError("ReducedHamiltonianSystem: needs a symplectic ROM");
}

Trajectory simulate_rom(const ReducedModel& rom, const GridSpec& grid, const IntegrateOptions& opts,
                        const std::optional<Vector>& y0) {
  const Vector start = y0 ? *y0 : rom.initial_state();
  if (start.size() != rom.dim()) throw DimensionError("simulate_rom: initial state dimension mismatch");
  if (rom.kind == RomKind::symplectic) {
    IntegrateOptions o = opts;
    if (o.scheme == Scheme::rk2) o.scheme = Scheme::stormer_verlet;
    const ReducedHamiltonianSystem sys(rom);
    return integrate(sys, start, grid, rom.omega, o);
  }
  IntegrateOptions o = opts;
  o.scheme = Scheme::rk2;
  const VectorField f = [&rom](const Vector& y) { return rom.rhs(y); };
  return integrate(f, start, grid, rom.omega, o);
}

Vector lift(const ReducedModel& rom, const Vector& y) { return rom.lift(y); }

ErrorSeries error_series(const Trajectory& fom, const ReducedModel& rom, const Trajectory& rom_traj) {
  if (fom.size() != rom_traj.size()) throw DimensionError("error_series: trajectories differ in length");
  for (std::size_t j = 0; j < fom.times.size(); ++j) {
    if (std::abs(fom.times[j] - rom_traj.times[j]) > 1e-9 * std::max(1.0, std::abs(fom.times[j]))) {
      throw DimensionError("error_series: time grids are not aligned");
    }
  }
  const double w = std::sqrt(rom.model->grid.dx());
  ErrorSeries out;
  for (Eigen::Index j = 0; j < fom.size(); ++j) {
    const Vector z = fom.states.col(j);
    const Vector za = rom.lift(rom_traj.states.col(j));
    const double hf = eval_hamiltonian(*rom.model, z, rom.omega);
    const double hr = eval_hamiltonian(*rom.model, za, rom.omega);
    out.times.push_back(fom.times[static_cast<std::size_t>(j)]);
    out.l2.push_back(w * (z - za).norm());
    out.h_full.push_back(hf);
    out.h_rom.push_back(hr);
    out.delta_h.push_back(std::abs(hf - hr));
  }
  return out;
}

}  // namespace symred
