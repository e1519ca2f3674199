#include "symred/errors.hpp"
#include "symred/integrators.hpp"
#include "symred/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace symred;

namespace {

// H = (q^2 + p^2) / 2 in any dimension.
class Oscillator : public HamiltonianSystem {
 public:
  explicit Oscillator(Eigen::Index n, bool separable = true) : n_(n), sep_(separable) {}
  Eigen::Index half_dim() const override { return n_; }
  Vector gradient(const Vector& z) const override { return z; }
  double hamiltonian(const Vector& z) const override { return 0.5 * z.squaredNorm(); }
  bool separable() const override { return sep_; }

 private:
  Eigen::Index n_;
  bool sep_;
};

// H = p^2/2 + q^4/4 + q p^2 / 2: non-separable test system (1 dof).
class Coupled : public HamiltonianSystem {
 public:
  Eigen::Index half_dim() const override { return 1; }
  Vector gradient(const Vector& z) const override {
    const double q = z[0], p = z[1];
    Vector g(2);
    g << q * q * q + 0.5 * p * p, p + q * p;
    return g;
  }
  double hamiltonian(const Vector& z) const override {
    const double q = z[0], p = z[1];
    return 0.5 * p * p + 0.25 * q * q * q * q + 0.5 * q * p * p;
  }
};

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Newton, SquareRootOfTwo) {
  int iters = 0;
  const Vector x = newton_solve([](const Vector& x) { return Vector::Constant(1, x[0] * x[0] - 2); },
                                Vector::Constant(1, 1.5), {}, {}, &iters);
  EXPECT_NEAR(x[0], std::sqrt(2.0), 1e-12);
  EXPECT_LE(iters, 6);
}

TEST(Newton, LinearOneIteration) {
  int iters = 0;
  const Vector x = newton_solve([](const Vector& x) { return x; }, Vector::Constant(1, 5.0), {},
                                [](const Vector&) { return Matrix::Identity(1, 1); }, &iters);
  EXPECT_EQ(iters, 1);
  EXPECT_EQ(x[0], 0.0);
}

TEST(Newton, AlreadyConverged) {
  int iters = -1;
  const Vector x0 = Vector::Constant(1, 1e-14);
  const Vector x = newton_solve([](const Vector& x) { return x; }, x0, {}, {}, &iters);
  EXPECT_EQ(iters, 0);
  EXPECT_EQ(x[0], x0[0]);
}

TEST(Newton, Divergence) {
  NewtonConfig cfg;
  cfg.max_iters = 5;
  // x^2 + 1 has no real root
  EXPECT_THROW(newton_solve([](const Vector& x) { return Vector::Constant(1, x[0] * x[0] + 1); },
                            Vector::Constant(1, 0.3), cfg),
               NewtonDivergence);
}

TEST(StormerVerlet, OscillatorOneStepHand) {
  const Oscillator osc(1);
  const Vector z1 = stormer_verlet_step(osc, vec2(1, 0), 0.1);
  EXPECT_NEAR(z1[0], 0.995, 1e-15);
  EXPECT_NEAR(z1[1], -0.1, 1e-15);
  // implicit path gives the same numbers on a linear problem
  const Oscillator implicit(1, false);
  const Vector z2 = stormer_verlet_step(implicit, vec2(1, 0), 0.1);
  EXPECT_NEAR(z2[0], 0.995, 1e-13);
  EXPECT_NEAR(z2[1], -0.1, 1e-13);
}

TEST(StormerVerlet, FreeParticle) {
  class Free : public HamiltonianSystem {
   public:
    Eigen::Index half_dim() const override { return 1; }
    Vector gradient(const Vector& z) const override { return vec2(0, z[1]); }
    double hamiltonian(const Vector& z) const override { return 0.5 * z[1] * z[1]; }
    bool separable() const override { return true; }
  } free;
  for (bool mf : {false, true}) {
    const Vector z1 = stormer_verlet_step(free, vec2(0.3, 2.0), 0.25, {}, mf);
    EXPECT_DOUBLE_EQ(z1[0], 0.3 + 0.5);
    EXPECT_DOUBLE_EQ(z1[1], 2.0);
  }
}

TEST(StormerVerlet, Consistency) {
  const Coupled sys;
  const Vector z = vec2(0.4, -0.7);
  const Vector z1 = stormer_verlet_step(sys, z, 1e-8);
  EXPECT_LE((z1 - z).norm(), 2e-8 * sys.rhs(z).norm());
}

TEST(StormerVerlet, MomentumFirstHand) {
  const Oscillator osc(1);
  // p_half = -0.05 q... with (q, p) = (1, 0): p_half = -0.05, q1 = 1 - 0.005, p1 = p_half - 0.05 q1
  const Vector z1 = stormer_verlet_step(osc, vec2(1, 0), 0.1, {}, true);
  EXPECT_NEAR(z1[0], 0.995, 1e-15);
  EXPECT_NEAR(z1[1], -0.05 - 0.05 * 0.995, 1e-15);
}

TEST(StormerVerlet, ReversibleSeparable) {
  std::mt19937 rng(1);
  auto m = build_wave_model(GridSpec{1.0, 20, 0.01, 1.0}, 0.1);
  const FullOrderSystem sys(m, ParameterPoint{{0.5, 0.5, 0.5, 0.5}});
  Vector z = Vector::Random(40);
  const Vector z1 = stormer_verlet_step(sys, z, 0.01);
  const Vector back = stormer_verlet_step(sys, z1, -0.01);
  EXPECT_LE((back - z).norm(), 1e-10);
}

TEST(StormerVerlet, NonSeparableEnergyBounded) {
  const Coupled sys;
  GridSpec g{1.0, 3, 0.01, 50.0};
  const auto traj = integrate(sys, vec2(0.5, 0.2), g, {});
  const double h0 = sys.hamiltonian(traj.state(0));
  double dev = 0.0;
  for (Eigen::Index j = 0; j < traj.size(); ++j) dev = std::max(dev, std::abs(sys.hamiltonian(traj.state(j)) - h0));
  EXPECT_LE(dev, 1e-4);
}

namespace {

Matrix step_jacobian(const HamiltonianSystem& sys, const Vector& z, double dt) {
  const double h = 1e-6;
  Matrix m(z.size(), z.size());
  Vector zp = z;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    zp[j] = z[j] + h;
    const Vector a = stormer_verlet_step(sys, zp, dt);
    zp[j] = z[j] - h;
    const Vector b = stormer_verlet_step(sys, zp, dt);
    zp[j] = z[j];
    m.col(j) = (a - b) / (2 * h);
  }
  return m;
}

}  // namespace

TEST(StormerVerlet, StepMapIsSymplectic) {
  auto m = build_wave_model(GridSpec{1.0, 12, 0.01, 1.0}, 0.1);
  const FullOrderSystem wave(m, ParameterPoint{{0.8, 0.1, 0.9, 0.6}});
  const Matrix jw = step_jacobian(wave, m->initial_state({}), 0.01);
  EXPECT_LE(check_symplectic(jw), 1e-6);

  auto nls = build_nls_model(GridSpec{nls_domain_length(0.11), 8, 0.01, 1.0});
  const FullOrderSystem schr(nls, ParameterPoint{{1.0}});
  const Matrix jn = step_jacobian(schr, nls->initial_state({}), 0.01);
  EXPECT_LE(check_symplectic(jn), 1e-6);
}

TEST(StormerVerlet, SecondOrder) {
  const Oscillator osc(1);
  std::vector<double> logdt, logerr;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const auto traj = integrate(osc, vec2(1, 0), GridSpec{1.0, 3, dt, 1.0}, {});
    const Vector exact = vec2(std::cos(1.0), -std::sin(1.0));
    logdt.push_back(std::log(dt));
    logerr.push_back(std::log((traj.state(traj.size() - 1) - exact).norm()));
  }
  const double mx = std::accumulate(logdt.begin(), logdt.end(), 0.0) / 4;
  const double my = std::accumulate(logerr.begin(), logerr.end(), 0.0) / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (logdt[i] - mx) * (logerr[i] - my);
    sxx += (logdt[i] - mx) * (logdt[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, 2.0, 0.1);
}

TEST(StormerVerlet, NoSecularEnergyDrift) {
  const Oscillator osc(1);
  const auto traj = integrate(osc, vec2(1, 0), GridSpec{1.0, 3, 0.01, 100.0}, {});
  const double h0 = osc.hamiltonian(traj.state(0));
  double st = 0, se = 0, stt = 0, ste = 0, band = 0;
  const double cnt = static_cast<double>(traj.size());
  for (Eigen::Index j = 0; j < traj.size(); ++j) {
    const double t = traj.times[j];
    const double e = osc.hamiltonian(traj.state(j)) - h0;
    band = std::max(band, std::abs(e));
    st += t;
    se += e;
    stt += t * t;
    ste += t * e;
  }
  const double slope = (cnt * ste - st * se) / (cnt * stt - st * st);
  EXPECT_LE(std::abs(slope), 1e-8);
  EXPECT_LE(band, 0.01 * 0.01);
}

TEST(Rk2, MidpointHand) {
  const VectorField f = [](const Vector& z) -> Vector { return -z; };
  const Vector z1 = rk2_step(f, Vector::Constant(1, 1.0), 0.1);
  EXPECT_NEAR(z1[0], 0.905, 1e-15);
}

TEST(Integrate, StepCountAndStride) {
  const Oscillator osc(2);
  const Vector z0 = Vector::Ones(4);
  const auto zero = integrate(osc, z0, GridSpec{1.0, 3, 0.1, 0.0}, {});
  EXPECT_EQ(zero.size(), 1);
  EXPECT_EQ(zero.state(0), z0);

  IntegrateOptions opts;
  opts.stride = 4;
  const auto t = integrate(osc, z0, GridSpec{1.0, 3, 0.1, 1.0}, {}, opts);
  ASSERT_EQ(t.size(), 4);  // steps 0, 4, 8, 10
  EXPECT_NEAR(t.times.back(), 1.0, 1e-12);
  EXPECT_NEAR(t.times[2], 0.8, 1e-12);

  const auto full = integrate(osc, z0, GridSpec{1.0, 3, 0.1, 1.0}, {});
  EXPECT_EQ(full.size(), 11);
  EXPECT_EQ(full.state(10), t.state(3));
  EXPECT_THROW(integrate(osc, z0, GridSpec{1.0, 3, 0.1, 1.05}, {}), DimensionError);
}

TEST(Integrate, NonFiniteReportsStep) {
  const VectorField blow = [](const Vector& z) -> Vector { return z.array().square() * 1e200; };
  IntegrateOptions opts;
  opts.scheme = Scheme::rk2;
  try {
    integrate(blow, Vector::Ones(2), GridSpec{1.0, 3, 0.1, 1.0}, {}, opts);
    FAIL() << "expected NonFiniteState";
  } catch (const NonFiniteState& e) {
    EXPECT_EQ(e.step(), 1u);
  }
}

TEST(Integrate, Rk2DriftsWhereStormerVerletStaysBounded) {
  auto m = build_wave_model(GridSpec{1.0, 100, 0.01, 30.0}, 0.1);
  const ParameterPoint w{{0.8456, 0.1320, 0.9328, 0.5809}};
  const FullOrderSystem sys(m, w);
  const Vector z0 = m->initial_state(w);
  IntegrateOptions opts;
  opts.stride = 10;
  const auto sv = integrate(sys, z0, m->grid, w, opts);
  opts.scheme = Scheme::rk2;
  const auto rk = integrate(sys, z0, m->grid, w, opts);
  const double h0 = sys.hamiltonian(z0);
  double band = 0, drift = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    band = std::max(band, std::abs(sys.hamiltonian(sv.state(j)) - h0));
    drift = std::max(drift, std::abs(sys.hamiltonian(rk.state(j)) - h0));
  }
  EXPECT_GE(drift / band, 10.0);
}
