#pragma once

#include "symred/integrators.hpp"
#include "symred/models.hpp"
#include "symred/symplectic.hpp"
#include "symred/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace symred {

/// Column-stacked snapshots with (t, omega) provenance per column.
std::string to_string(const ParameterPoint& p);

struct SnapshotSet {
  Matrix states;
  /// g(z) at every state column; zero columns when not recorded.
  Matrix nonlinear;
  std::vector<double> times;
  std::vector<ParameterPoint> params;

  Eigen::Index cols() const { return states.cols(); }
  bool has_nonlinear() const { return nonlinear.cols() > 0 && nonlinear.cols() == states.cols(); }
  void validate() const;

  /// Append trajectory columns, optionally with g evaluated at each.
  void append(const Trajectory& traj, const Matrix* nonlinear_evals = nullptr);
  void append(const SnapshotSet& other);
};

/// Trajectory of the full model at omega, integrated per `opts`.
Trajectory full_trajectory(std::shared_ptr<const HamiltonianModel> model, const ParameterPoint& omega,
                           const GridSpec& grid, const IntegrateOptions& opts = {});

/// g(z) for every column of `states`.
Matrix nonlinear_snapshots(const HamiltonianModel& model, const Matrix& states,
                           const ParameterPoint& omega);

/// Full-model trajectories over a parameter set, in grid order.
SnapshotSet collect_snapshots(std::shared_ptr<const HamiltonianModel> model,
                              const std::vector<ParameterPoint>& params, const GridSpec& grid,
                              const IntegrateOptions& opts, bool with_nonlinear, int jobs = 1);

/// Tensor grid with `per_dim` equidistant points per coordinate (first
/// coordinate fastest); a single point per dim takes the box center.
std::vector<ParameterPoint> tensor_grid(const ParameterBox& box, int per_dim);

/// Top-k left singular vectors of the state matrix.
Matrix pod_basis(const SnapshotSet& s, Eigen::Index k, Vector* singular_values = nullptr);
Matrix pod_basis(const Matrix& s, Eigen::Index k, Vector* singular_values = nullptr);

/// A = blockdiag(Phi, Phi) from the SVD of [Q, P].
SymplecticBasis cotangent_lift_basis(const SnapshotSet& s, Eigen::Index k,
                                     Vector* singular_values = nullptr);

/// A = [[Phi, -Psi], [Psi, Phi]] from the SVD of Q + iP.
SymplecticBasis complex_svd_basis(const SnapshotSet& s, Eigen::Index k,
                                  Vector* singular_values = nullptr);

/// |H(z0) - H(A A^+ z0)| at omega; no time integration involved.
double hamiltonian_error_indicator(const HamiltonianModel& model, const SymplecticBasis& a,
                                   const ParameterPoint& omega);

enum class ProjectionKind { orthogonal, symplectic };

/// max over columns s of ||s - P s||_2, P = A A^T or A A^+.
double projection_error(const Matrix& s, const Matrix& a, ProjectionKind kind);
double projection_error(const SnapshotSet& s, const SymplecticBasis& a, ProjectionKind kind);

/// Per-column ||s - A A^+ s||_2 for an orthosymplectic A.
Vector projection_errors(const Matrix& s, const SymplecticBasis& a);

enum class Indicator {
  hamiltonian_error,
  symplectic_projection_error,
  orthogonal_projection_error,
};

struct GreedyConfig {
  double delta = 5e-3;
  std::vector<ParameterPoint> param_grid;
  Eigen::Index max_k = 40;
  Indicator indicator = Indicator::hamiltonian_error;
  /// Training horizon and step for the full-model trajectories.
  GridSpec training;
  IntegrateOptions integrate;
  /// Scan only the newest trajectory for the next snapshot instead of the
  /// whole cache.
  bool fresh_snapshots = false;
  /// Record g(z) alongside the states (needed for SDEIM later).
  bool record_nonlinear = false;
  /// Optional fixed set on which the per-iteration sigma_2k is measured;
  /// defaults to the snapshot cache.
  std::optional<Matrix> evaluation_set;
  GramSchmidtOptions gram_schmidt;
  int jobs = 1;
};

struct GreedyReport {
  std::vector<ParameterPoint> selected_params;
  /// Max indicator over the grid before each enrichment, plus the final value.
  std::vector<double> indicator_values;
  /// Max projection error after each enrichment; entry i belongs to k = i + 1.
  std::vector<double> sigma;
  std::vector<double> wall_seconds;
  Eigen::Index final_k = 0;
  bool converged = false;
  std::string stop_reason;
};

struct GreedyResult {
  SymplecticBasis basis;
  GreedyReport report;
  SnapshotSet snapshots;
};

/// Greedy orthosymplectic basis over a parameter grid.
GreedyResult greedy_symplectic_basis(std::shared_ptr<const HamiltonianModel> model,
                                     const GreedyConfig& cfg);

/// Greedy on a fixed snapshot matrix: start from the column of largest norm,
/// then repeatedly add the column of largest projection error (of `kind`)
/// until it drops to delta or k reaches max_k.
GreedyResult greedy_from_snapshots(const Matrix& s, double delta, Eigen::Index max_k,
                                   ProjectionKind kind = ProjectionKind::symplectic,
                                   const GramSchmidtOptions& gs = {});

const char* to_string(Indicator ind);
Indicator indicator_from_string(const std::string& s);

}  // namespace symred
