#include "symred/integrators.hpp"

#include "symred/errors.hpp"
#include "symred/models.hpp"

#include <Eigen/LU>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace symred {

namespace {

Matrix fd_jacobian(const ResidualFn& residual, const Vector& x, const Vector& rx, double h) {
  Matrix jac(rx.size(), x.size());
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    jac.col(j) = (residual(xp) - rx) / step;
    xp[j] = x[j];
  }
  return jac;
}

}  // namespace

Vector newton_solve(const ResidualFn& residual, const Vector& x0, const NewtonConfig& cfg,
                    const JacobianFn& jacobian, int* iterations) {
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1) throw DimensionError("newton_solve: bad config");
  Vector x = x0;
  Vector r = residual(x);
  double rnorm = r.norm();
  int it = 0;
  // relative to the iterate; the update test catches iterations that have
  // reached round-off before the residual test does
  double step = std::numeric_limits<double>::infinity();
  while (rnorm > cfg.tol * (1.0 + x.norm()) && !(step <= cfg.tol * (1.0 + x.norm()))) {
    if (it == cfg.max_iters || !std::isfinite(rnorm)) {
      char buf[120];
      std::snprintf(buf, sizeof buf, "newton_solve: residual %.3e after %d iterations", rnorm, it);
      throw NewtonDivergence(buf);
    }
    const Matrix jac = jacobian ? jacobian(x) : fd_jacobian(residual, x, r, cfg.fd_jacobian_step);
    Eigen::PartialPivLU<Matrix> lu(jac);
    const double det = lu.determinant();
    if (det == 0.0 || !std::isfinite(det)) throw NewtonDivergence("newton_solve: singular Jacobian");
    const Vector dx = lu.solve(r);
    x -= dx;
    step = dx.norm();
    r = residual(x);
    rnorm = r.norm();
    ++it;
  }
  if (iterations) *iterations = it;
  return x;
}

namespace {

Vector join(const Vector& q, const Vector& p) {
  Vector z(q.size() + p.size());
  z << q, p;
  return z;
}

// Implicit half step x = base + c * G_block(x, other); `x_first` says whether x
// occupies the q slot. Jacobian I - c dG_block/dx.
Vector implicit_half(const HamiltonianSystem& sys, const Vector& base, const Vector& other,
                     double c, bool x_first, const NewtonConfig& newton) {
  const Eigen::Index n = base.size();
  // G_p for an implicit q update, G_q for an implicit p update.
  auto block = [&](const Vector& g) -> Vector { return x_first ? g.tail(n) : g.head(n); };
  auto state = [&](const Vector& x) { return x_first ? join(x, other) : join(other, x); };
  auto residual = [&](const Vector& x) -> Vector {
    return x - base - c * block(sys.gradient(state(x)));
  };
  auto jac = [&](const Vector& x) -> Matrix {
    const Matrix h = sys.hessian(state(x));
    Matrix j = Matrix::Identity(n, n);
    j -= c * (x_first ? Matrix(h.bottomLeftCorner(n, n)) : Matrix(h.topRightCorner(n, n)));
    return j;
  };
  // explicit predictor
  const Vector guess = base + c * block(sys.gradient(state(base)));
  return newton_solve(residual, guess, newton, jac);
}

// Implicit full step x = base + c * (G_blk(fixed, base) + G_blk(fixed, x)).
Vector implicit_full(const HamiltonianSystem& sys, const Vector& base, const Vector& fixed,
                     double c, bool x_is_p, const NewtonConfig& newton) {
  const Eigen::Index n = base.size();
  auto state = [&](const Vector& x) { return x_is_p ? join(fixed, x) : join(x, fixed); };
  auto block = [&](const Vector& g) -> Vector { return x_is_p ? g.head(n) : g.tail(n); };
  const Vector g0 = block(sys.gradient(state(base)));
  auto residual = [&](const Vector& x) -> Vector {
    return x - base - c * (g0 + block(sys.gradient(state(x))));
  };
  auto jac = [&](const Vector& x) -> Matrix {
    const Matrix h = sys.hessian(state(x));
    Matrix j = Matrix::Identity(n, n);
    j -= c * (x_is_p ? Matrix(h.topRightCorner(n, n)) : Matrix(h.bottomLeftCorner(n, n)));
    return j;
  };
  const Vector guess = base + 2.0 * c * g0;
  return newton_solve(residual, guess, newton, jac);
}

}  // namespace

Vector stormer_verlet_step(const HamiltonianSystem& sys, const Vector& z, double dt,
                           const NewtonConfig& newton, bool momentum_first) {
  const Eigen::Index n = sys.half_dim();
  if (z.size() != 2 * n) throw DimensionError("stormer_verlet_step: state dimension mismatch");
  const double h = 0.5 * dt;
  const Vector q = z.head(n);
  const Vector p = z.tail(n);

  if (!momentum_first) {
    // q_half = q + h G_p(q_half, p)
    Vector q_half;
    if (sys.separable()) {
      q_half = q + h * sys.gradient(z).tail(n);
    } else {
      q_half = implicit_half(sys, q, p, h, true, newton);
    }
    // p_new = p - h (G_q(q_half, p) + G_q(q_half, p_new))
    Vector p_new;
    if (sys.separable()) {
      p_new = p - dt * sys.gradient(join(q_half, p)).head(n);
    } else {
      p_new = implicit_full(sys, p, q_half, -h, true, newton);
    }
    const Vector q_new = q_half + h * sys.gradient(join(q_half, p_new)).tail(n);
    return join(q_new, p_new);
  }

  // p_half = p - h G_q(q, p_half)
  Vector p_half;
  if (sys.separable()) {
    p_half = p - h * sys.gradient(z).head(n);
  } else {
    p_half = implicit_half(sys, p, q, -h, false, newton);
  }
  // q_new = q + h (G_p(q, p_half) + G_p(q_new, p_half))
  Vector q_new;
  if (sys.separable()) {
    q_new = q + dt * sys.gradient(join(q, p_half)).tail(n);
  } else {
    q_new = implicit_full(sys, q, p_half, h, false, newton);
  }
  const Vector p_new = p_half - h * sys.gradient(join(q_new, p_half)).head(n);
  return join(q_new, p_new);
}

Vector rk2_step(const VectorField& f, const Vector& z, double dt) {
  const Vector mid = z + 0.5 * dt * f(z);
  return z + dt * f(mid);
}

namespace {

template <class Step>
Trajectory run(const Step& step, const Vector& z0, const GridSpec& grid,
               const ParameterPoint& omega, Eigen::Index stride) {
  if (!(grid.dt > 0.0)) throw DimensionError("integrate: dt must be positive");
  if (stride < 1) throw DimensionError("integrate: stride must be at least 1");
  const Eigen::Index steps = grid.steps();
  const Eigen::Index kept = steps / stride + 1 + (steps % stride != 0 ? 1 : 0);

  Trajectory traj;
  traj.omega = omega;
  traj.dt = grid.dt;
  traj.states.resize(z0.size(), kept);
  traj.times.reserve(static_cast<std::size_t>(kept));
  traj.states.col(0) = z0;
  traj.times.push_back(0.0);

  Vector z = z0;
  Eigen::Index col = 1;
  for (Eigen::Index m = 1; m <= steps; ++m) {
    z = step(z);
    if (!z.allFinite()) {
      throw NonFiniteState("integrate: non-finite state at step " + std::to_string(m),
                           static_cast<std::size_t>(m));
    }
    if (m % stride == 0 || m == steps) {
      traj.states.col(col++) = z;
      traj.times.push_back(static_cast<double>(m) * grid.dt);
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate(const HamiltonianSystem& sys, const Vector& z0, const GridSpec& grid,
                     const ParameterPoint& omega, const IntegrateOptions& opts) {
  if (z0.size() != 2 * sys.half_dim()) throw DimensionError("integrate: state dimension mismatch");
  const double dt = grid.dt;
  switch (opts.scheme) {
    case Scheme::stormer_verlet:
    case Scheme::stormer_verlet_momentum: {
      const bool mf = opts.scheme == Scheme::stormer_verlet_momentum;
      return run([&](const Vector& z) { return stormer_verlet_step(sys, z, dt, opts.newton, mf); },
                 z0, grid, omega, opts.stride);
    }
    case Scheme::rk2: {
      const VectorField f = [&sys](const Vector& z) { return sys.rhs(z); };
      return run([&](const Vector& z) { return rk2_step(f, z, dt); }, z0, grid, omega, opts.stride);
    }
  }
  throw DimensionError("integrate: unknown scheme");
}

Trajectory integrate(const VectorField& f, const Vector& z0, const GridSpec& grid,
                     const ParameterPoint& omega, const IntegrateOptions& opts) {
  if (opts.scheme != Scheme::rk2) {
    throw DimensionError("integrate: a bare vector field can only be stepped with rk2");
  }
  const double dt = grid.dt;
  return run([&](const Vector& z) { return rk2_step(f, z, dt); }, z0, grid, omega, opts.stride);
}

}  // namespace symred
