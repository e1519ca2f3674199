#pragma once

#include "symred/hamiltonian.hpp"
#include "symred/types.hpp"

#include <functional>
#include <vector>

namespace symred {

struct GridSpec;

struct NewtonConfig {
  /// Stop once the residual or the last update is below tol * (1 + ||x||).
  double tol = 1e-12;
  int max_iters = 50;
  double fd_jacobian_step = 1e-7;
  bool operator==(const NewtonConfig&) const = default;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Solve residual(x) = 0. Without `jacobian` the Jacobian is built from
/// forward differences. Throws NewtonDivergence.
Vector newton_solve(const ResidualFn& residual, const Vector& x0, const NewtonConfig& cfg = {},
                    const JacobianFn& jacobian = {}, int* iterations = nullptr);

enum class Scheme {
  stormer_verlet,           // half step in q first
  stormer_verlet_momentum,  // half step in p first
  rk2,                      // explicit midpoint
};

/// One Stormer-Verlet step. Explicit when sys.separable().
Vector stormer_verlet_step(const HamiltonianSystem& sys, const Vector& z, double dt,
                           const NewtonConfig& newton = {}, bool momentum_first = false);

/// Explicit midpoint: z + dt f(z + dt/2 f(z)).
Vector rk2_step(const VectorField& f, const Vector& z, double dt);

/// States stored column-wise at times[j].
struct Trajectory {
  std::vector<double> times;
  Matrix states;
  ParameterPoint omega;
  double dt = 0.0;

  Eigen::Index size() const { return states.cols(); }
  Vector state(Eigen::Index j) const { return states.col(j); }
};

struct IntegrateOptions {
  Scheme scheme = Scheme::stormer_verlet;
  NewtonConfig newton;
  /// Keep every stride-th state; the final state is always kept.
  Eigen::Index stride = 1;
};

/// M + 1 steps of the chosen scheme for t_final = M dt. Throws NonFiniteState
/// carrying the index of the first bad step.
Trajectory integrate(const HamiltonianSystem& sys, const Vector& z0, const GridSpec& grid,
                     const ParameterPoint& omega, const IntegrateOptions& opts = {});

/// Same stepping policy for a plain vector field; only rk2 is accepted.
Trajectory integrate(const VectorField& f, const Vector& z0, const GridSpec& grid,
                     const ParameterPoint& omega, const IntegrateOptions& opts);

}  // namespace symred
