#pragma once

#include "symred/deim.hpp"
#include "symred/hamiltonian.hpp"
#include "symred/integrators.hpp"
#include "symred/models.hpp"
#include "symred/symplectic.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace symred {

enum class RomKind { symplectic, pod_galerkin };

/// How g enters the reduced vector field: not at all, lifted exactly, or
/// through a sampled operator (plain DEIM or the symplectic variant).
enum class NonlinearPath { none, dense, deim, sdeim };

const char* to_string(NonlinearPath p);
NonlinearPath nonlinear_path_from_string(const std::string& s);

/// dy/dt = reduced_linear y + N(y) with y in R^r.
class ReducedModel {
 public:
  RomKind kind = RomKind::symplectic;
  NonlinearPath path = NonlinearPath::none;
  std::shared_ptr<const HamiltonianModel> model;
  ParameterPoint omega;
  /// Lift z = basis y (2n x r).
  Matrix basis;
  /// A^+ for symplectic ROMs, V^T for Galerkin ones (r x 2n).
  Matrix left;
  /// left J L basis.
  Matrix reduced_linear;
  /// left J, used by the dense path.
  Matrix left_j;
  std::optional<DeimOperator> deim;

  Eigen::Index dim() const { return basis.cols(); }
  Vector rhs(const Vector& y) const;
  /// d rhs / dy.
  Matrix rhs_jacobian(const Vector& y) const;
  /// H(basis y).
  double reduced_hamiltonian(const Vector& y) const;
  Vector lift(const Vector& y) const;
  Vector reduce(const Vector& z) const;
  Vector initial_state() const { return reduce(model->initial_state(omega)); }
};

/// Symplectic ROM on an orthosymplectic basis. `deim` is required for the
/// deim and sdeim paths and must have been built with this basis.
ReducedModel assemble_symplectic_rom(std::shared_ptr<const HamiltonianModel> model,
                                     const ParameterPoint& omega, const SymplecticBasis& a,
                                     NonlinearPath path = NonlinearPath::dense,
                                     const DeimOperator* deim = nullptr, double tol = 1e-10);

/// Galerkin ROM dy/dt = V^T J L V y + V^T J g(V y) for orthonormal V.
ReducedModel assemble_pod_rom(std::shared_ptr<const HamiltonianModel> model,
                              const ParameterPoint& omega, const Matrix& v,
                              NonlinearPath path = NonlinearPath::dense,
                              const DeimOperator* deim = nullptr, double tol = 1e-10);

/// Symplectic ROM seen as a canonical system: gradient = J^T rhs.
class ReducedHamiltonianSystem final : public HamiltonianSystem {
 public:
  explicit ReducedHamiltonianSystem(const ReducedModel& rom);
  Eigen::Index half_dim() const override { return rom_.dim() / 2; }
  Vector gradient(const Vector& y) const override { return apply_J(rom_.rhs(y), true); }
  double hamiltonian(const Vector& y) const override { return rom_.reduced_hamiltonian(y); }
  Matrix hessian(const Vector& y) const override { return apply_J_rows(rom_.rhs_jacobian(y), true); }

 private:
  const ReducedModel& rom_;
};

/// max |rhs(y) - J grad H~(y) / energy_scale| with the gradient of
/// H~(y) = H(basis y) taken by central differences of step h.
double hamiltonian_field_residual(const ReducedModel& rom, const Vector& y, double h = 1e-6);

/// Integrate from y0 (default reduce(z0)). Symplectic ROMs use Stormer-Verlet
/// with `opts.scheme` deciding the ordering; Galerkin ROMs always use rk2.
Trajectory simulate_rom(const ReducedModel& rom, const GridSpec& grid, const IntegrateOptions& opts = {},
                        const std::optional<Vector>& y0 = std::nullopt);

Vector lift(const ReducedModel& rom, const Vector& y);

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> h_full;
  std::vector<double> h_rom;
  std::vector<double> delta_h;
};

/// Per stored time: sqrt(dx) ||z - basis y||, H(z), H(basis y), |difference|.
ErrorSeries error_series(const Trajectory& fom, const ReducedModel& rom, const Trajectory& rom_traj);

}  // namespace symred
