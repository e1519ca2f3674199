#pragma once

#include "symred/symplectic.hpp"
#include "symred/types.hpp"

#include <functional>

namespace symred {

/// Autonomous vector field dz/dt = f(z); used for non-Hamiltonian ROMs.
using VectorField = std::function<Vector(const Vector&)>;

/// A canonical Hamiltonian system dz/dt = J grad(z) at a fixed parameter.
///
/// `gradient` is the flow-generating gradient. Discrete energies may carry a
/// constant weight w (the mesh width for the PDE models), in which case
/// grad hamiltonian(z) = w * gradient(z).
class HamiltonianSystem {
 public:
  virtual ~HamiltonianSystem() = default;

  virtual Eigen::Index half_dim() const = 0;
  virtual Vector gradient(const Vector& z) const = 0;
  virtual double hamiltonian(const Vector& z) const = 0;

  /// Jacobian of `gradient`. Default: central differences with step 1e-6.
  virtual Matrix hessian(const Vector& z) const;

  /// True when H(q, p) = K(p) + U(q), which makes Stormer-Verlet explicit.
  virtual bool separable() const { return false; }

  Vector rhs(const Vector& z) const { return apply_J(gradient(z)); }
};

}  // namespace symred
