#include "symred/symplectic.hpp"

#include "symred/errors.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace symred {

namespace {

void require_even(Eigen::Index len, const char* what) {
  if (len % 2 != 0) {
    throw DimensionError(std::string(what) + ": expected even dimension, got " +
                         std::to_string(len));
  }
}

}  // namespace

Vector apply_J(const Vector& v, bool transpose) {
  require_even(v.size(), "apply_J");
  const Eigen::Index n = v.size() / 2;
  Vector out(v.size());
  if (!transpose) {
    out.head(n) = v.tail(n);
    out.tail(n) = -v.head(n);
  } else {
    out.head(n) = -v.tail(n);
    out.tail(n) = v.head(n);
  }
  return out;
}

Matrix apply_J_rows(const Matrix& m, bool transpose) {
  require_even(m.rows(), "apply_J_rows");
  const Eigen::Index n = m.rows() / 2;
  Matrix out(m.rows(), m.cols());
  if (!transpose) {
    out.topRows(n) = m.bottomRows(n);
    out.bottomRows(n) = -m.topRows(n);
  } else {
    out.topRows(n) = -m.bottomRows(n);
    out.bottomRows(n) = m.topRows(n);
  }
  return out;
}

Matrix apply_J_cols(const Matrix& m, bool transpose) {
  require_even(m.cols(), "apply_J_cols");
  const Eigen::Index k = m.cols() / 2;
  Matrix out(m.rows(), m.cols());
  if (!transpose) {
    out.leftCols(k) = -m.rightCols(k);
    out.rightCols(k) = m.leftCols(k);
  } else {
    out.leftCols(k) = m.rightCols(k);
    out.rightCols(k) = -m.leftCols(k);
  }
  return out;
}

double omega(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("omega: length mismatch " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
  require_even(u.size(), "omega");
  const Eigen::Index n = u.size() / 2;
  return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

Matrix symplectic_inverse(const Matrix& a) {
  require_even(a.rows(), "symplectic_inverse");
  require_even(a.cols(), "symplectic_inverse");
  // A^T J_{2n} = (J_{2n}^T A)^T
  const Matrix at_j = apply_J_rows(a, true).transpose();
  return apply_J_rows(at_j, true);
}

double check_symplectic(const Matrix& a) {
  require_even(a.rows(), "check_symplectic");
  require_even(a.cols(), "check_symplectic");
  Matrix form = a.transpose() * apply_J_rows(a, false);
  const Eigen::Index k = a.cols() / 2;
  for (Eigen::Index i = 0; i < k; ++i) {
    form(i, k + i) -= 1.0;
    form(k + i, i) += 1.0;
  }
  return form.norm();
}

double orthonormality_residual(const Matrix& a) {
  Matrix gram = a.transpose() * a;
  gram.diagonal().array() -= 1.0;
  return gram.norm();
}

void canonicalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      imax = i;
    }
  }
  if (v[imax] < 0.0) v = -v;
}

SymplecticBasis::SymplecticBasis(Eigen::Index n) : n_(n), e_(Matrix(2 * n, 0)) {
  if (n < 0) throw DimensionError("SymplecticBasis: negative half-dimension");
}

SymplecticBasis SymplecticBasis::from_e_block(Matrix e_block, double tol) {
  require_even(e_block.rows(), "SymplecticBasis");
  const Eigen::Index n = e_block.rows() / 2;
  if (e_block.cols() > n) {
    throw DimensionError("SymplecticBasis: k exceeds n");
  }
  if (!e_block.allFinite()) {
    throw SymplecticityError("SymplecticBasis: non-finite entries");
  }
  SymplecticBasis basis(n, std::move(e_block));
  const Matrix a = basis.matrix();
  const double symp = check_symplectic(a);
  const double ortho = orthonormality_residual(a);
  if (symp > tol || ortho > tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "SymplecticBasis: symplectic residual %.3e, orthonormality residual %.3e exceed %.1e",
                  symp, ortho, tol);
    throw SymplecticityError(buf);
  }
  return basis;
}

Matrix SymplecticBasis::matrix() const {
  Matrix a(2 * n_, 2 * k());
  a.leftCols(k()) = e_;
  a.rightCols(k()) = f_block();
  return a;
}

Vector SymplecticBasis::reduce(const Eigen::Ref<const Vector>& z) const {
  if (z.size() != 2 * n_) throw DimensionError("SymplecticBasis::reduce: dimension mismatch");
  // A^+ z = J_{2k}^T A^T J_{2n} z
  const Vector jz = apply_J(Vector(z), false);
  Vector at_jz(2 * k());
  at_jz.head(k()) = e_.transpose() * jz;
  at_jz.tail(k()) = f_block().transpose() * jz;
  if (k() == 0) return at_jz;
  return apply_J(at_jz, true);
}

Vector SymplecticBasis::lift(const Eigen::Ref<const Vector>& y) const {
  if (y.size() != 2 * k()) throw DimensionError("SymplecticBasis::lift: dimension mismatch");
  return e_ * y.head(k()) + f_block() * y.tail(k());
}

Vector symplectic_project(const SymplecticBasis& a, const Vector& z) { return a.project(z); }

namespace {

// One sweep of z <- z - sum Omega(z, f_i) e_i + sum Omega(z, e_i) f_i.
Vector symplectic_orthogonalize(const Matrix& e, const Matrix& f, const Vector& z) {
  if (e.cols() == 0) return z;
  // Omega(z, x) = (J^T z)^T x
  const Vector w = apply_J(z, true);
  return z - e * (f.transpose() * w) + f * (e.transpose() * w);
}

double coupling_residual(const Matrix& e, const Matrix& f, const Vector& v) {
  if (e.cols() == 0) return 0.0;
  return std::max((e.transpose() * v).cwiseAbs().maxCoeff(),
                  (f.transpose() * v).cwiseAbs().maxCoeff());
}

}  // namespace

Vector symplectic_gram_schmidt(const SymplecticBasis& a, const Vector& z,
                               const GramSchmidtOptions& opts) {
  if (z.size() != 2 * a.n()) {
    throw DimensionError("symplectic_gram_schmidt: dimension mismatch");
  }
  if (!z.allFinite()) throw DegenerateVector("symplectic_gram_schmidt: non-finite input");
  const double znorm = z.norm();
  const Matrix& e = a.e_block();
  const Matrix f = a.f_block();

  Vector zt = symplectic_orthogonalize(e, f, z);
  const double ztnorm = zt.norm();
  if (znorm == 0.0 || ztnorm < opts.degeneracy_tol * znorm) {
    throw DegenerateVector("symplectic_gram_schmidt: vector lies in span(A) (relative residual " +
                           std::to_string(znorm == 0.0 ? 0.0 : ztnorm / znorm) + ")");
  }
  zt /= ztnorm;
  if (coupling_residual(e, f, zt) > opts.reorth_tol) {
    zt = symplectic_orthogonalize(e, f, zt);
    zt.normalize();
  }
  canonicalize_sign(zt);
  return zt;
}

SymplecticBasis enrich_basis(const SymplecticBasis& a, const Vector& z,
                             const GramSchmidtOptions& opts) {
  if (a.k() >= a.n()) throw DegenerateVector("enrich_basis: basis already spans R^{2n}");
  const Vector e_new = symplectic_gram_schmidt(a, z, opts);
  Matrix e(2 * a.n(), a.k() + 1);
  e.leftCols(a.k()) = a.e_block();
  e.col(a.k()) = e_new;
  return SymplecticBasis(a.n(), std::move(e));
}

SqrFactors sqr_decompose(const Matrix& m, double rank_tol) {
  require_even(m.rows(), "sqr_decompose");
  require_even(m.cols(), "sqr_decompose");
  if (m.cols() > m.rows()) throw DimensionError("sqr_decompose: more columns than rows");
  if (!m.allFinite()) throw RankDeficient("sqr_decompose: non-finite input");
  const Eigen::Index k = m.cols() / 2;
  const Eigen::Index rows = m.rows();

  Matrix e(rows, k);
  Matrix f(rows, k);
  Matrix r = Matrix::Zero(2 * k, 2 * k);

  for (Eigen::Index i = 0; i < k; ++i) {
    Vector q = m.col(i);
    Vector p = m.col(k + i);
    for (Eigen::Index j = 0; j < i; ++j) {
      const Vector ej = e.col(j);
      const Vector fj = f.col(j);
      const double qa = omega(q, fj);
      const double qb = omega(q, ej);
      q += -qa * ej + qb * fj;
      r(j, i) = qa;
      r(k + j, i) = -qb;

      const double pa = omega(p, fj);
      const double pb = omega(p, ej);
      p += -pa * ej + pb * fj;
      r(j, k + i) = pa;
      r(k + j, k + i) = -pb;
    }
    const double alpha = omega(q, p);
    if (!(std::abs(alpha) >= rank_tol * q.norm() * p.norm()) || alpha == 0.0) {
      throw RankDeficient("sqr_decompose: |Omega(q, p)| = " + std::to_string(std::abs(alpha)) +
                          " below threshold at column pair " + std::to_string(i));
    }
    const double scale = std::sqrt(std::abs(alpha));
    const double sgn = alpha > 0.0 ? 1.0 : -1.0;
    e.col(i) = sgn * q / scale;
    f.col(i) = p / scale;
    r(i, i) = sgn * scale;
    r(k + i, k + i) = scale;
  }

  SqrFactors out;
  out.a.resize(rows, 2 * k);
  out.a.leftCols(k) = e;
  out.a.rightCols(k) = f;
  out.r = std::move(r);
  return out;
}

}  // namespace symred
