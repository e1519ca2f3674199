#pragma once

#include "symred/hamiltonian.hpp"
#include "symred/types.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace symred {

/// Periodic 1D mesh and time grid.
struct GridSpec {
  double length = 1.0;
  Eigen::Index points = 100;
  double dt = 0.01;
  double t_final = 1.0;

  double dx() const { return length / static_cast<double>(points); }
  /// Number of steps M with t_final = M * dt; throws DimensionError otherwise.
  Eigen::Index steps() const;
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

struct ParameterBox {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(const ParameterPoint& p) const;
};

/// Nonlinear gradient acting node by node: (g_i, g_{n+i}) depends only on
/// (q_i, p_i). `eval` returns both components and the 2x2 Jacobian
/// [[dg_q/dq, dg_q/dp], [dg_p/dq, dg_p/dp]] in row-major order.
struct PointwiseNonlinearity {
  struct Value {
    double gq = 0.0;
    double gp = 0.0;
    double jac[4] = {0.0, 0.0, 0.0, 0.0};
  };
  std::function<Value(double q, double p, const ParameterPoint& omega)> eval;
};

/// Parametric canonical Hamiltonian system with grad H / w = L(omega) z + g(z, omega).
struct HamiltonianModel {
  std::string id;
  Eigen::Index n = 0;
  GridSpec grid;
  ParameterBox bounds;
  bool separable = false;
  /// w in grad H = w (L z + g); the mesh width for the PDE models.
  double energy_scale = 1.0;

  std::function<Matrix(const ParameterPoint&)> linear_part;
  std::optional<PointwiseNonlinearity> nonlinearity;
  std::function<double(const Vector&, const ParameterPoint&)> hamiltonian;
  std::function<Vector(const ParameterPoint&)> initial_state;

  /// g(z); zero when the model is linear.
  Vector nonlinear_grad(const Vector& z, const ParameterPoint& omega) const;
  /// Dense Jacobian of g.
  Matrix nonlinear_jacobian(const Vector& z, const ParameterPoint& omega) const;

  void check_parameter(const ParameterPoint& omega) const;
  void check_state(const Vector& z) const;
};

/// Concrete system at one parameter point; owns its assembled L.
class FullOrderSystem final : public HamiltonianSystem {
 public:
  FullOrderSystem(std::shared_ptr<const HamiltonianModel> model, ParameterPoint omega);

  Eigen::Index half_dim() const override { return model_->n; }
  Vector gradient(const Vector& z) const override;
  double hamiltonian(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;
  bool separable() const override { return model_->separable; }

  const HamiltonianModel& model() const { return *model_; }
  const ParameterPoint& omega() const { return omega_; }
  const Matrix& linear_part() const { return linear_; }
  Vector nonlinear_grad(const Vector& z) const { return model_->nonlinear_grad(z, omega_); }

 private:
  std::shared_ptr<const HamiltonianModel> model_;
  ParameterPoint omega_;
  Matrix linear_;
  // finite-difference stencils: the sparse copy is what the time loop uses
  Eigen::SparseMatrix<double> sparse_linear_;
};

double eval_hamiltonian(const HamiltonianModel& model, const Vector& z, const ParameterPoint& omega);

/// J (L z + g(z)).
Vector eval_rhs(const HamiltonianModel& model, const Vector& z, const ParameterPoint& omega);

// --- finite-difference building blocks ---

/// Periodic central second difference, scaled by 1/dx^2.
Matrix periodic_second_difference(Eigen::Index points, double dx);

/// Piecewise cubic bump: 1 - 1.5 s^2 + 0.75 s^3 on [0,1], (2-s)^3/4 on (1,2], 0 beyond.
double cubic_spline_bump(double s);

// --- linear wave equation on a torus ---

/// kappa(omega) = c2 * sum_l omega_l / l^2 over the four parameter coordinates.
double wave_kappa(const ParameterPoint& omega, double c2);

/// q_t = p, p_t = kappa(omega) q_xx; omega in [0,1]^4. Initial state
/// q_i = h(10 |x_i - 1/2|), p = 0 with x_i = i dx.
std::shared_ptr<const HamiltonianModel> build_wave_model(const GridSpec& grid, double c2);

// --- cubic nonlinear Schrodinger equation on a torus ---

struct NlsOptions {
  /// Carrier wave number of the initial soliton.
  double carrier = 1.0;
  /// Soliton center; negative means length / 2.
  double center = -1.0;
};

/// i u_t = -u_xx - eps |u|^2 u with u = p + i q; eps in [0.9, 1.1].
std::shared_ptr<const HamiltonianModel> build_nls_model(const GridSpec& grid,
                                                       const NlsOptions& opts = {});

/// Domain length 2 pi / l of the scaled NLS torus.
inline double nls_domain_length(double scaling) { return 2.0 * std::numbers::pi / scaling; }

}  // namespace symred
