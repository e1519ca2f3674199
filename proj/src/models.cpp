#include "symred/models.hpp"

#include "symred/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace symred {

Matrix HamiltonianSystem::hessian(const Vector& z) const {
  constexpr double h = 1e-6;
  const Eigen::Index dim = z.size();
  Matrix out(dim, dim);
  Vector zp = z;
  for (Eigen::Index j = 0; j < dim; ++j) {
    zp[j] = z[j] + h;
    const Vector gp = gradient(zp);
    zp[j] = z[j] - h;
    const Vector gm = gradient(zp);
    zp[j] = z[j];
    out.col(j) = (gp - gm) / (2.0 * h);
  }
  return out;
}

Eigen::Index GridSpec::steps() const {
  if (!(dt > 0.0)) throw DimensionError("GridSpec: dt must be positive");
  const double ratio = t_final / dt;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
    throw DimensionError("GridSpec: t_final = " + std::to_string(t_final) +
                         " is not an integer multiple of dt = " + std::to_string(dt));
  }
  return static_cast<Eigen::Index>(m);
}

void GridSpec::validate() const {
  if (!(length > 0.0)) throw DimensionError("GridSpec: domain length must be positive");
  if (points < 3) throw DimensionError("GridSpec: need at least 3 grid points");
  if (!(t_final >= 0.0)) throw DimensionError("GridSpec: t_final must be non-negative");
  (void)steps();
}

bool ParameterBox::contains(const ParameterPoint& p) const {
  if (p.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (p[i] < lower[i] || p[i] > upper[i]) return false;
  }
  return true;
}

void HamiltonianModel::check_parameter(const ParameterPoint& omega) const {
  if (omega.size() != bounds.dim()) {
    throw DimensionError(id + ": parameter has " + std::to_string(omega.size()) +
                         " coordinates, expected " + std::to_string(bounds.dim()));
  }
  if (!bounds.contains(omega)) throw std::out_of_range(id + ": parameter outside its box");
}

void HamiltonianModel::check_state(const Vector& z) const {
  if (z.size() != 2 * n) {
    throw DimensionError(id + ": state has length " + std::to_string(z.size()) + ", expected " +
                         std::to_string(2 * n));
  }
}

Vector HamiltonianModel::nonlinear_grad(const Vector& z, const ParameterPoint& omega) const {
  check_state(z);
  Vector g = Vector::Zero(2 * n);
  if (!nonlinearity) return g;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = nonlinearity->eval(z[i], z[n + i], omega);
    g[i] = v.gq;
    g[n + i] = v.gp;
  }
  return g;
}

Matrix HamiltonianModel::nonlinear_jacobian(const Vector& z, const ParameterPoint& omega) const {
  check_state(z);
  Matrix jac = Matrix::Zero(2 * n, 2 * n);
  if (!nonlinearity) return jac;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = nonlinearity->eval(z[i], z[n + i], omega);
    jac(i, i) = v.jac[0];
    jac(i, n + i) = v.jac[1];
    jac(n + i, i) = v.jac[2];
    jac(n + i, n + i) = v.jac[3];
  }
  return jac;
}

FullOrderSystem::FullOrderSystem(std::shared_ptr<const HamiltonianModel> model, ParameterPoint omega)
    : model_(std::move(model)), omega_(std::move(omega)) {
  model_->check_parameter(omega_);
  linear_ = model_->linear_part(omega_);
  sparse_linear_ = linear_.sparseView();
}

Vector FullOrderSystem::gradient(const Vector& z) const {
  model_->check_state(z);
  Vector g = sparse_linear_ * z;
  if (model_->nonlinearity) g += model_->nonlinear_grad(z, omega_);
  return g;
}

double FullOrderSystem::hamiltonian(const Vector& z) const { return model_->hamiltonian(z, omega_); }

Matrix FullOrderSystem::hessian(const Vector& z) const {
  if (!model_->nonlinearity) return linear_;
  return linear_ + model_->nonlinear_jacobian(z, omega_);
}

double eval_hamiltonian(const HamiltonianModel& model, const Vector& z, const ParameterPoint& omega) {
  model.check_state(z);
  return model.hamiltonian(z, omega);
}

Vector eval_rhs(const HamiltonianModel& model, const Vector& z, const ParameterPoint& omega) {
  model.check_state(z);
  Vector g = model.linear_part(omega) * z + model.nonlinear_grad(z, omega);
  return apply_J(g);
}

Matrix periodic_second_difference(Eigen::Index points, double dx) {
  if (points < 3) throw DimensionError("periodic_second_difference: need at least 3 points");
  const double w = 1.0 / (dx * dx);
  Matrix d = Matrix::Zero(points, points);
  for (Eigen::Index i = 0; i < points; ++i) {
    d(i, i) = -2.0 * w;
    d(i, (i + 1) % points) += w;
    d(i, (i + points - 1) % points) += w;
  }
  return d;
}

double cubic_spline_bump(double s) {
  if (s < 0.0) s = -s;
  if (s <= 1.0) return 1.0 - 1.5 * s * s + 0.75 * s * s * s;
  if (s <= 2.0) return 0.25 * (2.0 - s) * (2.0 - s) * (2.0 - s);
  return 0.0;
}

double wave_kappa(const ParameterPoint& omega, double c2) {
  if (omega.size() != 4) throw DimensionError("wave_kappa: expected 4 parameter coordinates");
  double sum = 0.0;
  for (std::size_t l = 1; l <= 4; ++l) sum += omega[l - 1] / static_cast<double>(l * l);
  return c2 * sum;
}

std::shared_ptr<const HamiltonianModel> build_wave_model(const GridSpec& grid, double c2) {
  grid.validate();
  auto model = std::make_shared<HamiltonianModel>();
  const Eigen::Index n = grid.points;
  const double dx = grid.dx();
  model->id = "wave";
  model->n = n;
  model->grid = grid;
  model->bounds = ParameterBox{{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}};
  model->separable = true;
  model->energy_scale = dx;

  const Matrix dxx = periodic_second_difference(n, dx);
  // grad H / dx = (-kappa D q, p), so that q_t = p and p_t = kappa D q.
  model->linear_part = [dxx, n, c2](const ParameterPoint& omega) {
    const double kappa = wave_kappa(omega, c2);
    Matrix l = Matrix::Zero(2 * n, 2 * n);
    l.topLeftCorner(n, n) = -kappa * dxx;
    l.bottomRightCorner(n, n).setIdentity();
    return l;
  };
  model->hamiltonian = [n, dx, c2](const Vector& z, const ParameterPoint& omega) {
    const double kappa = wave_kappa(omega, c2);
    const double inv = 1.0 / (2.0 * dx * dx);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double q = z[i];
      const double qn = z[(i + 1) % n];
      const double qp = z[(i + n - 1) % n];
      const double p = z[n + i];
      sum += p * p + kappa * (qn - q) * (qn - q) * inv + kappa * (q - qp) * (q - qp) * inv;
    }
    return 0.5 * dx * sum;
  };
  model->initial_state = [n, dx](const ParameterPoint&) {
    Vector z = Vector::Zero(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = static_cast<double>(i + 1) * dx;
      z[i] = cubic_spline_bump(10.0 * std::abs(x - 0.5));
    }
    return z;
  };
  return model;
}

std::shared_ptr<const HamiltonianModel> build_nls_model(const GridSpec& grid, const NlsOptions& opts) {
  grid.validate();
  auto model = std::make_shared<HamiltonianModel>();
  const Eigen::Index n = grid.points;
  const double dx = grid.dx();
  model->id = "nls";
  model->n = n;
  model->grid = grid;
  model->bounds = ParameterBox{{0.9}, {1.1}};
  model->separable = false;
  model->energy_scale = dx;

  const Matrix dxx = periodic_second_difference(n, dx);
  model->linear_part = [dxx, n](const ParameterPoint&) {
    Matrix l = Matrix::Zero(2 * n, 2 * n);
    l.topLeftCorner(n, n) = dxx;
    l.bottomRightCorner(n, n) = dxx;
    return l;
  };
  model->nonlinearity = PointwiseNonlinearity{[](double q, double p, const ParameterPoint& omega) {
    const double eps = omega[0];
    const double r2 = q * q + p * p;
    PointwiseNonlinearity::Value v;
    v.gq = eps * r2 * q;
    v.gp = eps * r2 * p;
    v.jac[0] = eps * (3.0 * q * q + p * p);
    v.jac[1] = 2.0 * eps * q * p;
    v.jac[2] = 2.0 * eps * q * p;
    v.jac[3] = eps * (q * q + 3.0 * p * p);
    return v;
  }};
  model->hamiltonian = [n, dx](const Vector& z, const ParameterPoint& omega) {
    const double eps = omega[0];
    const double inv = 1.0 / (dx * dx);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index im = (i + n - 1) % n;
      const double q = z[i];
      const double p = z[n + i];
      const double r2 = q * q + p * p;
      sum += (q * z[im] - q * q) * inv + (p * z[n + im] - p * p) * inv + 0.25 * eps * r2 * r2;
    }
    return dx * sum;
  };
  const double center = opts.center < 0.0 ? 0.5 * grid.length : opts.center;
  const double carrier = opts.carrier;
  model->initial_state = [n, dx, center, carrier](const ParameterPoint&) {
    // u = p + i q
    Vector z(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = static_cast<double>(i + 1) * dx - center;
      const double amp = std::sqrt(2.0) / std::cosh(x);
      const double phase = 0.5 * carrier * x;
      z[n + i] = amp * std::cos(phase);
      z[i] = amp * std::sin(phase);
    }
    return z;
  };
  return model;
}

}  // namespace symred
