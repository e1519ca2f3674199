#include "symred/basis.hpp"
#include "symred/errors.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <cmath>
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

SnapshotSet wrap(const Matrix& s) {
  SnapshotSet set;
  Trajectory t;
  t.states = s;
  t.times.assign(static_cast<std::size_t>(s.cols()), 0.0);
  set.append(t);
  return set;
}

void expect_orthosymplectic(const SymplecticBasis& a) {
  EXPECT_LE(check_symplectic(a.matrix()), 1e-10);
  EXPECT_LE(orthonormality_residual(a.matrix()), 1e-10);
}

std::shared_ptr<const HamiltonianModel> small_wave(double t_final = 1.0) {
  return build_wave_model(GridSpec{1.0, 24, 0.01, t_final}, 0.1);
}

}  // namespace

TEST(SnapshotSet, AppendKeepsProvenance) {
  Trajectory t;
  t.states = Matrix::Ones(4, 3);
  t.times = {0.0, 0.1, 0.2};
  t.omega = ParameterPoint{{0.5}};
  SnapshotSet s;
  s.append(t);
  const Matrix g = Matrix::Zero(4, 3);
  EXPECT_THROW(s.append(t, &g), DimensionError);
  s.append(t);
  EXPECT_EQ(s.cols(), 6);
  EXPECT_EQ(s.params[4], t.omega);
  EXPECT_DOUBLE_EQ(s.times[5], 0.2);
  EXPECT_NO_THROW(s.validate());
}

TEST(TensorGrid, OrderAndCount) {
  const ParameterBox box{{0, 0, 0, 0}, {1, 1, 1, 1}};
  const auto g = tensor_grid(box, 5);
  ASSERT_EQ(g.size(), 625u);
  EXPECT_EQ(g[1].coords, (std::vector<double>{0.25, 0, 0, 0}));
  EXPECT_EQ(g[5].coords, (std::vector<double>{0, 0.25, 0, 0}));
  EXPECT_EQ(g.back().coords, (std::vector<double>{1, 1, 1, 1}));
  const auto one = tensor_grid(ParameterBox{{0.9}, {1.1}}, 1);
  EXPECT_NEAR(one[0][0], 1.0, 1e-15);
}

TEST(Pod, DominantAxis) {
  Matrix s(2, 2);
  s << 2, 0, 0, 1;
  const Matrix v = pod_basis(wrap(s), 1);
  EXPECT_NEAR(v(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(v(1, 0), 0.0, 1e-15);
  EXPECT_THROW(pod_basis(wrap(s), 3), DimensionError);
}

TEST(Pod, SchmidtMirsky) {
  std::mt19937 rng(1);
  const Matrix s = random_matrix(16, 10, rng);
  Eigen::JacobiSVD<Matrix> ref(s);
  for (Eigen::Index k : {3, 7, 10}) {
    const Matrix v = pod_basis(s, k);
    const double err = (s - v * (v.transpose() * s)).norm();
    const double tail = ref.singularValues().tail(10 - k).norm();
    EXPECT_NEAR(err, tail, 1e-8);
  }
  const Matrix full = pod_basis(s, 10);
  EXPECT_LE((s - full * (full.transpose() * s)).norm(), 1e-8);
}

TEST(CotangentLift, UnitColumn) {
  Matrix s = Matrix::Zero(4, 1);
  s(0, 0) = 1.0;
  const auto a = cotangent_lift_basis(wrap(s), 1);
  Matrix expect = Matrix::Zero(4, 2);
  expect(0, 0) = 1.0;
  expect(2, 1) = 1.0;
  EXPECT_LE((a.matrix() - expect).norm(), 1e-15);
  EXPECT_LE(check_symplectic(a.matrix()), 1e-15);
}

TEST(CotangentLift, RandomSnapshots) {
  std::mt19937 rng(2);
  const auto a = cotangent_lift_basis(wrap(random_matrix(20, 15, rng)), 6);
  expect_orthosymplectic(a);
  EXPECT_LE(a.matrix().bottomLeftCorner(10, 6).norm(), 0.0);
  EXPECT_LE((a.matrix().topLeftCorner(10, 6) - a.matrix().bottomRightCorner(10, 6)).norm(), 0.0);
  EXPECT_THROW(cotangent_lift_basis(wrap(random_matrix(20, 15, rng)), 11), DimensionError);
}

TEST(ComplexSvdBasis, OneColumn) {
  Matrix s(4, 1);
  s << 1, 0, 0, 1;  // q = (1, 0), p = (0, 1)
  const auto a = complex_svd_basis(wrap(s), 1);
  const double r = 1.0 / std::sqrt(2.0);
  Vector e(4);
  e << r, 0, 0, r;
  EXPECT_LE((a.e_block().col(0) - e).norm(), 1e-15);
}

TEST(ComplexSvdBasis, StructureConditions) {
  std::mt19937 rng(3);
  const auto a = complex_svd_basis(wrap(random_matrix(24, 30, rng)), 5);
  expect_orthosymplectic(a);
  const Matrix phi = a.e_block().topRows(12);
  const Matrix psi = a.e_block().bottomRows(12);
  EXPECT_LE((phi.transpose() * phi + psi.transpose() * psi - Matrix::Identity(5, 5)).norm(), 1e-10);
  const Matrix x = phi.transpose() * psi;
  EXPECT_LE((x - x.transpose()).norm(), 1e-10);
}

TEST(ComplexSvdBasis, RealSnapshotsReduceToCotangentLift) {
  std::mt19937 rng(4);
  Matrix s = random_matrix(16, 9, rng);
  s.bottomRows(8).setZero();
  const auto c = complex_svd_basis(wrap(s), 3);
  EXPECT_LE(c.e_block().bottomRows(8).norm(), 1e-12);
  const auto l = cotangent_lift_basis(wrap(s), 3);
  EXPECT_LE((c.matrix() - l.matrix()).norm(), 1e-10);
}

TEST(ProjectionError, HandCase) {
  Matrix e = Matrix::Zero(4, 1);
  e(0, 0) = 1.0;
  const auto a = SymplecticBasis::from_e_block(e);
  Matrix s = Matrix::Zero(4, 1);
  s(0, 0) = 1.0;
  s(1, 0) = 1.0;
  EXPECT_NEAR(projection_error(wrap(s), a, ProjectionKind::orthogonal), 1.0, 1e-15);
  EXPECT_NEAR(projection_error(wrap(s), a, ProjectionKind::symplectic), 1.0, 1e-15);
  EXPECT_NEAR(projection_errors(s, a)[0], 1.0, 1e-15);
}

TEST(ProjectionError, KindsAgreeForOrthosymplectic) {
  std::mt19937 rng(5);
  SymplecticBasis a(8);
  for (int i = 0; i < 4; ++i) a = enrich_basis(a, random_matrix(16, 1, rng).col(0));
  const Matrix s = random_matrix(16, 12, rng);
  EXPECT_NEAR(projection_error(s, a.matrix(), ProjectionKind::orthogonal),
              projection_error(s, a.matrix(), ProjectionKind::symplectic), 1e-10);
  const Matrix inside = a.matrix() * random_matrix(8, 5, rng);
  EXPECT_LE(projection_error(inside, a.matrix(), ProjectionKind::symplectic), 1e-12);
}

TEST(HamiltonianIndicator, ZeroWhenInitialStateInSpan) {
  auto m = small_wave();
  const ParameterPoint w{{0.3, 0.3, 0.3, 0.3}};
  const auto a = enrich_basis(SymplecticBasis(m->n), m->initial_state(w));
  EXPECT_LE(hamiltonian_error_indicator(*m, a, w), 1e-14);
}

TEST(HamiltonianIndicator, MatchesDirectRecomputation) {
  std::mt19937 rng(6);
  auto m = small_wave();
  const ParameterPoint w{{0.8456, 0.1320, 0.9328, 0.5809}};
  SymplecticBasis a(m->n);
  for (int i = 0; i < 3; ++i) a = enrich_basis(a, random_matrix(48, 1, rng).col(0));
  const Vector z0 = m->initial_state(w);
  const Matrix am = a.matrix();
  const Vector pz = am * (symplectic_inverse(am) * z0);
  // energy by hand: dx/2 sum p^2 + kappa/(2 dx) sum (q_{i+1} - q_i)^2
  auto energy = [&](const Vector& z) {
    const double dx = 1.0 / 24, kappa = wave_kappa(w, 0.1);
    double s = 0;
    for (int i = 0; i < 24; ++i) {
      const double dq = z[(i + 1) % 24] - z[i];
      s += 0.5 * dx * z[24 + i] * z[24 + i] + 0.5 * kappa / dx * dq * dq;
    }
    return s;
  };
  EXPECT_NEAR(hamiltonian_error_indicator(*m, a, w), std::abs(energy(z0) - energy(pz)), 1e-12);
}

TEST(Greedy, SnapshotsInInitialSpanStopAfterOneIteration) {
  Matrix s = Matrix::Zero(6, 3);
  s(0, 0) = 2.0;
  s(3, 1) = 1.0;  // J^T e1
  s(0, 2) = -1.0;
  s(3, 2) = 0.5;
  const auto r = greedy_from_snapshots(s, 1e-8, 3);
  EXPECT_EQ(r.basis.k(), 1);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.sigma.back(), 1e-15);
}

TEST(Greedy, StagnationWhenOnlyDegenerateCandidatesRemain) {
  Matrix s = Matrix::Zero(6, 2);
  s(0, 0) = 2e14;
  s(2, 0) = 0.1;
  s(0, 1) = 1e14;
  s(1, 1) = 0.1;
  EXPECT_THROW(greedy_from_snapshots(s, 1e-3, 3), StagnationError);
}

TEST(Greedy, ProjectionIndicatorOnWave) {
  auto m = small_wave(2.0);
  GreedyConfig cfg;
  cfg.param_grid = tensor_grid(m->bounds, 2);
  cfg.indicator = Indicator::symplectic_projection_error;
  cfg.delta = 1e-6;
  cfg.max_k = 6;
  cfg.training = m->grid;
  cfg.integrate.stride = 5;
  const auto r = greedy_symplectic_basis(m, cfg);
  EXPECT_EQ(r.basis.k(), 6);
  expect_orthosymplectic(r.basis);
  ASSERT_EQ(r.report.sigma.size(), 6u);
  for (std::size_t i = 1; i < r.report.sigma.size(); ++i) {
    EXPECT_LE(r.report.sigma[i], r.report.sigma[i - 1] + 1e-12);
  }
  // with the projection indicator the recorded indicator equals sigma
  for (std::size_t i = 0; i < r.report.sigma.size(); ++i) {
    EXPECT_NEAR(r.report.indicator_values[i], r.report.sigma[i], 1e-12);
  }
  EXPECT_EQ(r.report.selected_params.size(), 6u);
  EXPECT_EQ(r.report.stop_reason, "reached max_k");

  cfg.indicator = Indicator::orthogonal_projection_error;
  const auto o = greedy_symplectic_basis(m, cfg);
  EXPECT_LE((o.basis.matrix() - r.basis.matrix()).norm(), 1e-8);
}

TEST(Greedy, FreshSnapshotsRestrictsCandidates) {
  auto m = small_wave(2.0);
  GreedyConfig cfg;
  cfg.param_grid = tensor_grid(m->bounds, 2);
  cfg.indicator = Indicator::symplectic_projection_error;
  cfg.delta = 1e-6;
  cfg.max_k = 4;
  cfg.training = m->grid;
  cfg.integrate.stride = 5;
  cfg.fresh_snapshots = true;
  const auto r = greedy_symplectic_basis(m, cfg);
  expect_orthosymplectic(r.basis);
  EXPECT_EQ(r.basis.k(), 4);
}

TEST(Greedy, HamiltonianIndicatorStopsOnParameterFreeInitialState) {
  // z0 does not depend on omega, so after the first pair every projected
  // initial state is exact and the indicator vanishes on the whole grid.
  auto m = small_wave();
  GreedyConfig cfg;
  cfg.param_grid = tensor_grid(m->bounds, 2);
  cfg.indicator = Indicator::hamiltonian_error;
  cfg.delta = 1e-12;
  cfg.max_k = 5;
  cfg.training = m->grid;
  const auto r = greedy_symplectic_basis(m, cfg);
  EXPECT_EQ(r.basis.k(), 1);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.indicator_values.back(), 1e-14);
}

TEST(Greedy, RecordsNonlinearSnapshots) {
  auto m = build_nls_model(GridSpec{nls_domain_length(0.11), 16, 0.01, 0.5});
  GreedyConfig cfg;
  cfg.param_grid = tensor_grid(m->bounds, 3);
  cfg.indicator = Indicator::symplectic_projection_error;
  cfg.delta = 1e-8;
  cfg.max_k = 3;
  cfg.training = m->grid;
  cfg.integrate.stride = 5;
  cfg.record_nonlinear = true;
  const auto r = greedy_symplectic_basis(m, cfg);
  ASSERT_TRUE(r.snapshots.has_nonlinear());
  const Eigen::Index j = r.snapshots.cols() - 1;
  const Vector g = m->nonlinear_grad(r.snapshots.states.col(j), r.snapshots.params[static_cast<std::size_t>(j)]);
  EXPECT_LE((g - r.snapshots.nonlinear.col(j)).norm(), 0.0);
}

TEST(Greedy, ConfigValidation) {
  auto m = small_wave();
  GreedyConfig cfg;
  cfg.training = m->grid;
  EXPECT_THROW(greedy_symplectic_basis(m, cfg), DimensionError);
  cfg.param_grid = {ParameterPoint{{0, 0, 0, 0}}};
  cfg.delta = 0.0;
  EXPECT_THROW(greedy_symplectic_basis(m, cfg), DimensionError);
}
