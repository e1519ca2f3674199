#pragma once

#include "symred/types.hpp"

namespace symred {

// The structure matrix J_{2n} = [[0, I], [-I, 0]] is never formed; every
// product with it is an index swap with a sign flip.

/// J v (or J^T v) for an even-length vector v = (q, p).
Vector apply_J(const Vector& v, bool transpose = false);

/// J M (or J^T M), applied to each column of M; M must have an even row count.
Matrix apply_J_rows(const Matrix& m, bool transpose = false);

/// M J (or M J^T); M must have an even column count.
Matrix apply_J_cols(const Matrix& m, bool transpose = false);

/// Symplectic 2-form u^T J v.
double omega(const Vector& u, const Vector& v);

/// A^+ = J_{2k}^T A^T J_{2n} for a 2n x 2k matrix A.
Matrix symplectic_inverse(const Matrix& a);

/// ||A^T J_{2n} A - J_{2k}||_F.
double check_symplectic(const Matrix& a);

/// ||A^T A - I||_F.
double orthonormality_residual(const Matrix& a);

/// Flip the sign of v so that its largest-magnitude entry (first on ties) is
/// positive.
void canonicalize_sign(Eigen::Ref<Vector> v);

struct GramSchmidtOptions {
  /// z is treated as lying in span(A) when ||z~|| < degeneracy_tol * ||z||.
  double degeneracy_tol = 1e-12;
  /// A second orthogonalization pass runs when max |A^T e| exceeds this.
  /// The default 0 always runs it: one pass leaves couplings of order
  /// 1e-10 that add up over many enrichments.
  double reorth_tol = 0.0;
};

/// Orthosymplectic basis A = [E, J^T E] of a 2k-dimensional subspace of R^{2n}.
///
/// Only E is stored; F = J_{2n}^T E is derived. Every instance satisfies
/// ||A^T J A - J|| <= 1e-10 and ||A^T A - I|| <= 1e-10 at construction.
class SymplecticBasis {
 public:
  SymplecticBasis() = default;

  /// Empty basis (k = 0) in R^{2n}.
  explicit SymplecticBasis(Eigen::Index n);

  /// Validates E against both invariants; throws SymplecticityError.
  static SymplecticBasis from_e_block(Matrix e_block, double tol = 1e-10);

  Eigen::Index n() const { return n_; }
  Eigen::Index k() const { return e_.cols(); }
  bool empty() const { return e_.cols() == 0; }

  const Matrix& e_block() const { return e_; }
  Matrix f_block() const { return apply_J_rows(e_, true); }

  /// Assembled 2n x 2k matrix [E, F].
  Matrix matrix() const;

  /// A^+ as a dense 2k x 2n matrix.
  Matrix inverse() const { return symplectic_inverse(matrix()); }

  /// A^+ z.
  Vector reduce(const Eigen::Ref<const Vector>& z) const;

  /// A y.
  Vector lift(const Eigen::Ref<const Vector>& y) const;

  /// A A^+ z.
  Vector project(const Eigen::Ref<const Vector>& z) const { return lift(reduce(z)); }

 private:
  SymplecticBasis(Eigen::Index n, Matrix e) : n_(n), e_(std::move(e)) {}

  friend SymplecticBasis enrich_basis(const SymplecticBasis&, const Vector&,
                                      const GramSchmidtOptions&);

  Eigen::Index n_ = 0;
  Matrix e_{Matrix(0, 0)};
};

Vector symplectic_project(const SymplecticBasis& a, const Vector& z);

/// Symplectically orthogonalize z against A and normalize to unit length.
/// Throws DegenerateVector when z is numerically in span(A).
Vector symplectic_gram_schmidt(const SymplecticBasis& a, const Vector& z,
                               const GramSchmidtOptions& opts = {});

/// A extended by the pair (e, J^T e) with e = symplectic_gram_schmidt(A, z).
SymplecticBasis enrich_basis(const SymplecticBasis& a, const Vector& z,
                             const GramSchmidtOptions& opts = {});

/// M = A R with A symplectic (not necessarily orthogonal) and
/// R = [[S, T], [U, V]], all four blocks upper triangular, T and U with a
/// zero diagonal.
struct SqrFactors {
  Matrix a;
  Matrix r;
};

/// Symplectic QR by symplectic Gram-Schmidt on the column pairs (u_i, v_i) of
/// M = [u_1..u_k, v_1..v_k]. R is accumulated from the elimination
/// coefficients, so its block structure holds exactly. Throws RankDeficient
/// when |Omega(q, p)| < rank_tol * ||q|| ||p|| at some step.
SqrFactors sqr_decompose(const Matrix& m, double rank_tol = 1e-12);

}  // namespace symred
