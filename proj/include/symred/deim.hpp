#pragma once

#include "symred/basis.hpp"
#include "symred/models.hpp"
#include "symred/symplectic.hpp"
#include "symred/types.hpp"

#include <vector>

namespace symred {

/// Greedy interpolation indices (0-based) for the columns of U. With
/// `inline_pairing` the partner i +- n of every chosen index joins the set
/// as soon as i is chosen and the residual solve becomes a least-squares one;
/// `n` is the half-dimension and is only used in that mode.
/// Throws ZeroResidual when a column is (numerically) dependent on the ones
/// before it.
std::vector<Eigen::Index> deim_indices(const Matrix& u, bool inline_pairing = false,
                                       Eigen::Index n = 0);

/// Closure of an index set under i <-> i +- n, sorted and deduplicated.
std::vector<Eigen::Index> pair_indices(const std::vector<Eigen::Index>& indices, Eigen::Index n);

/// Sampled approximation of a projected nonlinear term:
///   left J g(basis y)  ~  precomputed * g(z)[indices].
/// With more indices than columns of U (after pairing) the interpolation
/// matrix P^T U is replaced by its least-squares pseudo-inverse.
struct DeimOperator {
  Matrix u;
  std::vector<Eigen::Index> indices;
  bool paired = false;
  /// left J U (P^T U)^+, size r x |indices|.
  Matrix precomputed;
  /// (P^T U)^+, size m x |indices|.
  Matrix interpolation;
  /// Node-closed rows at which the state is reconstructed, and basis rows there.
  std::vector<Eigen::Index> eval_rows;
  Matrix sampled_basis;
  /// Position of every entry of `indices` inside `eval_rows`.
  std::vector<Eigen::Index> index_in_eval;
  double condition = 0.0;

  Eigen::Index sample_count() const { return static_cast<Eigen::Index>(indices.size()); }
};

struct DeimOptions {
  bool pair = true;
  /// Pair inside the selection loop instead of as a closure pass afterwards.
  bool inline_pairing = false;
};

/// Operator for a ROM with lift `basis` (2n x r) and left projector `left`
/// (r x 2n; A^+ for symplectic ROMs, V^T for Galerkin ones).
DeimOperator build_deim_operator(const Matrix& u, const Matrix& basis, const Matrix& left,
                                 const DeimOptions& opts = {});

/// precomputed * g_at_indices.
Vector deim_apply(const DeimOperator& op, const Vector& g_at_indices);

/// U (P^T U)^+ g_at_indices: the full-space reconstruction of g.
Vector deim_reconstruct(const DeimOperator& op, const Vector& g_at_indices);

/// g(basis y) at the operator's indices, touching only the sampled rows.
Vector deim_sample(const DeimOperator& op, const HamiltonianModel& model, const ParameterPoint& omega,
                   const Vector& y);

/// Jacobian (r x r) of y -> precomputed * g(basis y)[indices] through the
/// pointwise 2x2 Jacobians at the sampled nodes. Requires op.paired.
Matrix reduced_jacobian(const DeimOperator& op, const HamiltonianModel& model,
                        const ParameterPoint& omega, const Vector& y);

struct SdeimReport {
  std::vector<double> max_errors;
  Eigen::Index added_pairs = 0;
};

/// Enlarge A by greedy symplectic enrichment from nonlinear snapshots until
/// every column s of S_g has ||s - (A^+)^T A^+ s|| <= delta, or max_pairs
/// pairs have been added.
SymplecticBasis sdeim_basis(const SymplecticBasis& a, const Matrix& nonlinear_snapshots,
                            double delta, Eigen::Index max_pairs, SdeimReport* report = nullptr);

}  // namespace symred
