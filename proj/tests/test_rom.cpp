#include "symred/basis.hpp"
#include "symred/errors.hpp"
#include "symred/rom.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace symred;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937& rng) {
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = d(rng);
  return m;
}

SymplecticBasis identity_basis(Eigen::Index n) {
  Matrix e = Matrix::Zero(2 * n, n);
  e.topRows(n).setIdentity();
  return SymplecticBasis::from_e_block(e);
}

SymplecticBasis random_basis(Eigen::Index n, Eigen::Index k, std::mt19937& rng) {
  SymplecticBasis a(n);
  for (Eigen::Index i = 0; i < k; ++i) a = enrich_basis(a, random_matrix(2 * n, 1, rng).col(0));
  return a;
}

Vector fd_reduced_gradient(const ReducedModel& rom, const Vector& y) {
  const double h = 1e-6;
  Vector g(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Vector yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    g[i] = (rom.reduced_hamiltonian(yp) - rom.reduced_hamiltonian(ym)) / (2 * h);
  }
  return g / rom.model->energy_scale;
}

const ParameterPoint kWaveTest{{0.8456, 0.1320, 0.9328, 0.5809}};

}  // namespace

TEST(SymplecticRom, CanonicalColumnsGiveSubmatrix) {
  auto m = build_wave_model(GridSpec{1.0, 4, 0.01, 1.0}, 0.1);
  Matrix e = Matrix::Zero(8, 1);
  e(1, 0) = 1.0;
  const auto a = SymplecticBasis::from_e_block(e);
  const auto rom = assemble_symplectic_rom(m, kWaveTest, a, NonlinearPath::none);
  const Matrix jl = [&] {
    const Matrix l = m->linear_part(kWaveTest);
    return Matrix(apply_J_rows(l));
  }();
  Matrix expect(2, 2);
  expect << jl(1, 1), jl(1, 5), jl(5, 1), jl(5, 5);
  EXPECT_LE((rom.reduced_linear - expect).norm(), 1e-12);
}

TEST(SymplecticRom, IdentityReductionReproducesFom) {
  auto m = build_wave_model(GridSpec{1.0, 20, 0.01, 2.0}, 0.1);
  const auto rom = assemble_symplectic_rom(m, kWaveTest, identity_basis(20));
  const auto yt = simulate_rom(rom, m->grid);
  const auto zt = full_trajectory(m, kWaveTest, m->grid);
  EXPECT_LE((yt.states - zt.states).cwiseAbs().maxCoeff(), 1e-12);
  const auto es = error_series(zt, rom, yt);
  for (double v : es.l2) EXPECT_LE(v, 1e-10);
  for (double v : es.delta_h) EXPECT_LE(v, 1e-10);
}

TEST(SymplecticRom, ReducedFieldIsHamiltonian) {
  std::mt19937 rng(1);
  auto wave = build_wave_model(GridSpec{1.0, 16, 0.01, 1.0}, 0.1);
  const auto aw = random_basis(16, 4, rng);
  const auto rw = assemble_symplectic_rom(wave, kWaveTest, aw, NonlinearPath::none);
  auto nls = build_nls_model(GridSpec{nls_domain_length(0.11), 16, 0.01, 1.0});
  const auto an = random_basis(16, 4, rng);
  const auto rn = assemble_symplectic_rom(nls, ParameterPoint{{1.0932}}, an, NonlinearPath::dense);
  for (int t = 0; t < 10; ++t) {
    const Vector y = random_matrix(8, 1, rng).col(0);
    EXPECT_LE((rw.rhs(y) - apply_J(fd_reduced_gradient(rw, y))).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((rn.rhs(y) - apply_J(fd_reduced_gradient(rn, y))).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(SymplecticRom, DenseJacobianMatchesFiniteDifferences) {
  std::mt19937 rng(2);
  auto nls = build_nls_model(GridSpec{nls_domain_length(0.11), 16, 0.01, 1.0});
  const auto a = random_basis(16, 3, rng);
  const auto rom = assemble_symplectic_rom(nls, ParameterPoint{{1.0}}, a, NonlinearPath::dense);
  const Vector y = random_matrix(6, 1, rng).col(0);
  Matrix fd(6, 6);
  for (Eigen::Index j = 0; j < 6; ++j) {
    Vector yp = y, ym = y;
    yp[j] += 1e-6;
    ym[j] -= 1e-6;
    fd.col(j) = (rom.rhs(yp) - rom.rhs(ym)) / 2e-6;
  }
  EXPECT_LE((rom.rhs_jacobian(y) - fd).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(SymplecticRom, ZeroStateStaysZero) {
  std::mt19937 rng(3);
  auto m = build_wave_model(GridSpec{1.0, 12, 0.01, 1.0}, 0.1);
  const auto rom = assemble_symplectic_rom(m, kWaveTest, random_basis(12, 3, rng));
  const auto yt = simulate_rom(rom, m->grid, {}, Vector::Zero(6));
  EXPECT_LE(yt.states.norm(), 0.0);
}

TEST(SymplecticRom, RejectsNonSymplecticBasis) {
  auto m = build_wave_model(GridSpec{1.0, 4, 0.01, 1.0}, 0.1);
  EXPECT_THROW(assemble_symplectic_rom(m, kWaveTest, SymplecticBasis(5)), DimensionError);
  EXPECT_THROW(assemble_symplectic_rom(m, kWaveTest, identity_basis(4), NonlinearPath::deim), DimensionError);
}

TEST(Lift, ProjectionErrorIdentity) {
  std::mt19937 rng(4);
  auto m = build_wave_model(GridSpec{1.0, 10, 0.01, 1.0}, 0.1);
  const auto a = random_basis(10, 3, rng);
  const auto rom = assemble_symplectic_rom(m, kWaveTest, a);
  const Vector z = random_matrix(20, 1, rng).col(0);
  EXPECT_NEAR((lift(rom, rom.reduce(z)) - z).norm(), projection_errors(z, a)[0], 1e-12);
  EXPECT_LE(lift(rom, Vector::Zero(6)).norm(), 0.0);
  const Vector inside = a.lift(Vector::Ones(6));
  EXPECT_LE((lift(rom, rom.reduce(inside)) - inside).norm(), 1e-12);
}

TEST(ErrorSeries, InitialHamiltonianErrorIsIndicator) {
  std::mt19937 rng(5);
  auto m = build_wave_model(GridSpec{1.0, 20, 0.01, 0.5}, 0.1);
  const auto a = random_basis(20, 4, rng);
  const auto rom = assemble_symplectic_rom(m, kWaveTest, a);
  const auto es = error_series(full_trajectory(m, kWaveTest, m->grid), rom, simulate_rom(rom, m->grid));
  EXPECT_NEAR(es.delta_h[0], hamiltonian_error_indicator(*m, a, kWaveTest), 1e-14);
  ASSERT_EQ(es.times.size(), 51u);
}

TEST(ErrorSeries, MisalignedGridsRejected) {
  auto m = build_wave_model(GridSpec{1.0, 8, 0.01, 0.1}, 0.1);
  const auto rom = assemble_symplectic_rom(m, kWaveTest, identity_basis(8));
  const auto zt = full_trajectory(m, kWaveTest, m->grid);
  IntegrateOptions o;
  o.stride = 2;
  EXPECT_THROW(error_series(zt, rom, simulate_rom(rom, m->grid, o)), DimensionError);
  GridSpec other = m->grid;
  other.dt = 0.005;
  other.t_final = 0.05;
  EXPECT_THROW(error_series(zt, rom, simulate_rom(rom, other)), DimensionError);
}

TEST(ErrorSeries, HamiltonianErrorConstantUpToTimeStep) {
  // the deviation of Delta H from its initial value is the integrator's
  // bounded energy oscillation, so it must shrink like dt^2
  auto deviation = [](double dt) {
    auto m = build_wave_model(GridSpec{1.0, 40, dt, 2.0}, 0.1);
    const auto fom = full_trajectory(m, kWaveTest, m->grid);
    SnapshotSet s;
    s.append(fom);
    const auto rom = assemble_symplectic_rom(m, kWaveTest, cotangent_lift_basis(s, 6));
    const auto es = error_series(fom, rom, simulate_rom(rom, m->grid));
    double dev = 0;
    for (double v : es.delta_h) dev = std::max(dev, std::abs(v - es.delta_h[0]));
    return dev;
  };
  const double coarse = deviation(0.002);
  const double fine = deviation(0.001);
  EXPECT_LE(fine, 1e-6);
  EXPECT_NEAR(coarse / fine, 4.0, 0.2);
}

TEST(PodRom, IdentityMatchesRk2Fom) {
  auto m = build_wave_model(GridSpec{1.0, 12, 0.01, 1.0}, 0.1);
  const auto rom = assemble_pod_rom(m, kWaveTest, Matrix::Identity(24, 24));
  const auto yt = simulate_rom(rom, m->grid);
  IntegrateOptions o;
  o.scheme = Scheme::rk2;
  const auto zt = full_trajectory(m, kWaveTest, m->grid, o);
  EXPECT_LE((yt.states - zt.states).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PodRom, ReducedOperatorIsGalerkin) {
  std::mt19937 rng(6);
  auto m = build_wave_model(GridSpec{1.0, 4, 0.01, 1.0}, 0.1);
  const Matrix v = Eigen::HouseholderQR<Matrix>(random_matrix(8, 3, rng)).householderQ() * Matrix::Identity(8, 3);
  const auto rom = assemble_pod_rom(m, kWaveTest, v);
  const Matrix jl = apply_J_rows(m->linear_part(kWaveTest));
  EXPECT_LE((rom.reduced_linear - v.transpose() * jl * v).norm(), 1e-12);
  EXPECT_THROW(assemble_pod_rom(m, kWaveTest, 2.0 * v), NumericalError);
}

TEST(PodRom, NonlinearDenseMatchesDefinition) {
  std::mt19937 rng(7);
  auto nls = build_nls_model(GridSpec{nls_domain_length(0.11), 10, 0.01, 1.0});
  const ParameterPoint w{{1.0}};
  const Matrix v = Eigen::HouseholderQR<Matrix>(random_matrix(20, 5, rng)).householderQ() * Matrix::Identity(20, 5);
  const auto rom = assemble_pod_rom(nls, w, v);
  const Vector y = random_matrix(5, 1, rng).col(0);
  const Vector expect = v.transpose() * eval_rhs(*nls, v * y, w);
  EXPECT_LE((rom.rhs(y) - expect).norm(), 1e-12);
}
