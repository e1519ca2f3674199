#include "symred/deim.hpp"

#include "symred/errors.hpp"
#include "symred/svd.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace symred {

namespace {

Eigen::Index argmax_abs_excluding(const Vector& r, const std::set<Eigen::Index>& taken) {
  Eigen::Index best = -1;
  double val = -1.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (taken.count(i)) continue;
    if (std::abs(r[i]) > val) {
      val = std::abs(r[i]);
      best = i;
    }
  }
  return best;
}

Matrix rows_of(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Eigen::Index partner(Eigen::Index i, Eigen::Index n) { return i < n ? i + n : i - n; }

}  // namespace

std::vector<Eigen::Index> deim_indices(const Matrix& u, bool inline_pairing, Eigen::Index n) {
  const Eigen::Index m = u.cols();
  if (m == 0) return {};
  if (m > u.rows()) throw DimensionError("deim_indices: more columns than rows");
  if (inline_pairing && 2 * n != u.rows()) throw DimensionError("deim_indices: pairing needs n = rows / 2");
  const double scale = u.cwiseAbs().maxCoeff();
  const double zero_tol = 1e-12 * std::max(scale, 1e-300);

  std::vector<Eigen::Index> p;
  std::set<Eigen::Index> taken;
  auto take = [&](Eigen::Index i) {
    if (taken.insert(i).second) p.push_back(i);
    if (inline_pairing && taken.insert(partner(i, n)).second) p.push_back(partner(i, n));
  };

  Eigen::Index first;
  if (!(u.col(0).cwiseAbs().maxCoeff(&first) > zero_tol)) throw ZeroResidual("deim_indices: zero first column", 0);
  take(first);
  for (Eigen::Index l = 1; l < m; ++l) {
    const Matrix pu = rows_of(u.leftCols(l), p);
    Vector pul(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) pul[static_cast<Eigen::Index>(i)] = u(p[i], l);
    const Vector c = inline_pairing ? Vector(pu.colPivHouseholderQr().solve(pul))
                                    : Vector(pu.partialPivLu().solve(pul));
    const Vector r = u.col(l) - u.leftCols(l) * c;
    const Eigen::Index next = argmax_abs_excluding(r, taken);
    if (next < 0 || !(std::abs(r[next]) > zero_tol)) {
      throw ZeroResidual("deim_indices: residual vanishes at column " + std::to_string(l), static_cast<std::size_t>(l));
    }
    take(next);
  }
  return p;
}

std::vector<Eigen::Index> pair_indices(const std::vector<Eigen::Index>& indices, Eigen::Index n) {
  std::set<Eigen::Index> s;
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= 2 * n) throw DimensionError("pair_indices: index out of range");
    s.insert(i);
    s.insert(partner(i, n));
  }
  return {s.begin(), s.end()};
}

DeimOperator build_deim_operator(const Matrix& u, const Matrix& basis, const Matrix& left,
                                 const DeimOptions& opts) {
  if (u.rows() % 2 != 0) throw DimensionError("build_deim_operator: odd state dimension");
  if (basis.rows() != u.rows() || left.cols() != u.rows() || left.rows() != basis.cols()) {
    throw DimensionError("build_deim_operator: basis and projector shapes do not fit U");
  }
  const Eigen::Index n = u.rows() / 2;
  DeimOperator op;
  op.u = u;
  op.paired = opts.pair;
  auto idx = deim_indices(u, opts.pair && opts.inline_pairing, n);
  op.indices = opts.pair ? pair_indices(idx, n) : idx;

  const Matrix ptu = rows_of(u, op.indices);
  if (op.indices.size() == static_cast<std::size_t>(u.cols())) {
    op.interpolation = ptu.partialPivLu().inverse();
  } else {
    op.interpolation = ptu.completeOrthogonalDecomposition().pseudoInverse();
  }
  const auto sv = truncated_svd(ptu, u.cols()).singular_values;
  op.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
  // left J = (J^T left^T)^T
  const Matrix left_j = apply_J_rows(left.transpose(), true).transpose();
  op.precomputed = left_j * u * op.interpolation;

  op.eval_rows = pair_indices(op.indices, n);
  op.sampled_basis = rows_of(basis, op.eval_rows);
  std::map<Eigen::Index, Eigen::Index> where;
  for (std::size_t i = 0; i < op.eval_rows.size(); ++i) where[op.eval_rows[i]] = static_cast<Eigen::Index>(i);
  for (Eigen::Index i : op.indices) op.index_in_eval.push_back(where.at(i));
  return op;
}

Vector deim_apply(const DeimOperator& op, const Vector& g_at_indices) {
  if (g_at_indices.size() != op.sample_count()) throw DimensionError("deim_apply: sample length mismatch");
  return op.precomputed * g_at_indices;
}

Vector deim_reconstruct(const DeimOperator& op, const Vector& g_at_indices) {
  if (g_at_indices.size() != op.sample_count()) throw DimensionError("deim_reconstruct: sample length mismatch");
  return op.u * (op.interpolation * g_at_indices);
}

namespace {

// Node bookkeeping over eval_rows: rows come in q/p pairs (j, j + n).
struct NodeView {
  Eigen::Index n;
  const std::vector<Eigen::Index>& rows;
  std::map<Eigen::Index, Eigen::Index> pos;
  NodeView(Eigen::Index n_, const std::vector<Eigen::Index>& r) : n(n_), rows(r) {
    for (std::size_t i = 0; i < r.size(); ++i) pos[r[i]] = static_cast<Eigen::Index>(i);
  }
};

}  // namespace

Vector deim_sample(const DeimOperator& op, const HamiltonianModel& model, const ParameterPoint& omega,
                   const Vector& y) {
  const Vector zs = op.sampled_basis * y;
  const Eigen::Index n = model.n;
  Vector out = Vector::Zero(op.sample_count());
  if (!model.nonlinearity) return out;
  const NodeView nodes(n, op.eval_rows);
  Vector g_eval(zs.size());
  for (std::size_t i = 0; i < op.eval_rows.size(); ++i) {
    const Eigen::Index row = op.eval_rows[i];
    if (row >= n) continue;
    const Eigen::Index iq = static_cast<Eigen::Index>(i);
    const Eigen::Index ip = nodes.pos.at(row + n);
    const auto v = model.nonlinearity->eval(zs[iq], zs[ip], omega);
    g_eval[iq] = v.gq;
    g_eval[ip] = v.gp;
  }
  for (Eigen::Index a = 0; a < op.sample_count(); ++a) out[a] = g_eval[op.index_in_eval[static_cast<std::size_t>(a)]];
  return out;
}

Matrix reduced_jacobian(const DeimOperator& op, const HamiltonianModel& model,
                        const ParameterPoint& omega, const Vector& y) {
  if (!op.paired) throw DimensionError("reduced_jacobian: the operator's indices are not paired");
  const Eigen::Index r = op.precomputed.rows();
  if (!model.nonlinearity) return Matrix::Zero(r, r);
  const Eigen::Index n = model.n;
  const Vector zs = op.sampled_basis * y;
  // rows of dg/dy at the sampled indices: G_P (P^T A)
  const NodeView nodes(n, op.eval_rows);
  Matrix dg(zs.size(), op.sampled_basis.cols());
  for (std::size_t i = 0; i < op.eval_rows.size(); ++i) {
    const Eigen::Index row = op.eval_rows[i];
    if (row >= n) continue;
    const Eigen::Index iq = static_cast<Eigen::Index>(i);
    const Eigen::Index ip = nodes.pos.at(row + n);
    const auto v = model.nonlinearity->eval(zs[iq], zs[ip], omega);
    dg.row(iq) = v.jac[0] * op.sampled_basis.row(iq) + v.jac[1] * op.sampled_basis.row(ip);
    dg.row(ip) = v.jac[2] * op.sampled_basis.row(iq) + v.jac[3] * op.sampled_basis.row(ip);
  }
  Matrix picked(op.sample_count(), dg.cols());
  for (Eigen::Index a = 0; a < op.sample_count(); ++a) picked.row(a) = dg.row(op.index_in_eval[static_cast<std::size_t>(a)]);
  return op.precomputed * picked;
}

SymplecticBasis sdeim_basis(const SymplecticBasis& a, const Matrix& nonlinear_snapshots,
                            double delta, Eigen::Index max_pairs, SdeimReport* report) {
  if (nonlinear_snapshots.cols() == 0) throw DimensionError("sdeim_basis: no nonlinear snapshots");
  if (nonlinear_snapshots.rows() != 2 * a.n()) throw DimensionError("sdeim_basis: snapshot dimension mismatch");
  if (!(delta > 0.0)) throw DimensionError("sdeim_basis: delta must be positive");
  // (A^+)^T is symplectic; its leading half is its E block.
  const Matrix apt = a.inverse().transpose();
  SymplecticBasis b = SymplecticBasis::from_e_block(apt.leftCols(a.k()));

  SdeimReport rep;
  while (true) {
    const Vector errs = projection_errors(nonlinear_snapshots, b);
    rep.max_errors.push_back(errs.maxCoeff());
    if (!(errs.maxCoeff() > delta) || rep.added_pairs >= max_pairs || b.k() >= b.n()) break;
    bool grown = false;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(errs.size()));
    for (Eigen::Index j = 0; j < errs.size(); ++j) order[static_cast<std::size_t>(j)] = j;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return errs[x] > errs[y]; });
    for (Eigen::Index j : order) {
      if (!(errs[j] > 0.0)) break;
      try {
        b = enrich_basis(b, nonlinear_snapshots.col(j));
        grown = true;
        break;
      } catch (const DegenerateVector&) {
      }
    }
    if (!grown) throw StagnationError("sdeim_basis: every nonlinear snapshot already lies in span");
    ++rep.added_pairs;
  }
  if (report) *report = rep;
  // back from (A^+)^T to A
  const Matrix back = b.inverse().transpose();
  return SymplecticBasis::from_e_block(back.leftCols(b.k()));
}

}  // namespace symred
