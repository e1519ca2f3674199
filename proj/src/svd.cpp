#include "symred/svd.hpp"

#include "symred/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

namespace symred {

namespace {

using Complex = std::complex<double>;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct ThinSvd {
  Mat<Scalar> u;  // m x r
  Vector sigma;   // r
  Mat<Scalar> v;  // n x r
};

constexpr double kPairTol = 1e-15;
constexpr int kMaxSweeps = 80;

double magnitude(double x) { return std::abs(x); }
double magnitude(const Complex& x) { return std::abs(x); }

// Unit-modulus factor with phase of x (sign for reals).
double unit_phase(double x) { return x >= 0.0 ? 1.0 : -1.0; }
Complex unit_phase(const Complex& x) {
  const double r = std::abs(x);
  return r == 0.0 ? Complex(1.0, 0.0) : x / r;
}

double conjugate(double x) { return x; }
Complex conjugate(const Complex& x) { return std::conj(x); }

// Extend the orthonormal columns of u flagged in `valid` to a full orthonormal
// set by Gram-Schmidt on canonical vectors.
template <class Scalar>
void complete_orthonormal(Mat<Scalar>& u, const std::vector<bool>& valid) {
  const Eigen::Index m = u.rows();
  Eigen::Index next_canonical = 0;
  std::vector<Eigen::Index> done;
  for (Eigen::Index c = 0; c < u.cols(); ++c)
    if (valid[c]) done.push_back(c);
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    if (valid[c]) continue;
    while (true) {
      if (next_canonical >= m) throw NumericalError("svd: orthonormal completion failed");
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x =
          Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Unit(m, next_canonical++);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index d : done) x -= u.col(d) * (u.col(d).adjoint() * x)(0, 0);
      const double nx = x.norm();
      if (nx > 0.5) {
        u.col(c) = x / nx;
        done.push_back(c);
        break;
      }
    }
  }
}

// One-sided Jacobi on a matrix with rows >= cols.
template <class Scalar>
ThinSvd<Scalar> hestenes(Mat<Scalar> b) {
  const Eigen::Index n = b.cols();
  Mat<Scalar> v = Mat<Scalar>::Identity(n, n);
  const double total = b.squaredNorm();
  const double tiny = std::numeric_limits<double>::min() + total * 1e-300;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = b.col(i).squaredNorm();
        const double beta = b.col(j).squaredNorm();
        if (alpha <= tiny || beta <= tiny) continue;
        const Scalar gamma = (b.col(i).adjoint() * b.col(j))(0, 0);
        const double g = magnitude(gamma);
        if (g <= kPairTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Scalar phase_conj = conjugate(unit_phase(gamma));
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bi = b.col(i);
        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bj = b.col(j) * phase_conj;
        b.col(i) = c * bi - s * bj;
        b.col(j) = s * bi + c * bj;
        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vi = v.col(i);
        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vj = v.col(j) * phase_conj;
        v.col(i) = c * vi - s * vj;
        v.col(j) = s * vi + c * vj;
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (Eigen::Index c = 0; c < n; ++c) sigma[c] = b.col(c).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return sigma[x] > sigma[y]; });

  ThinSvd<Scalar> out;
  out.u.resize(b.rows(), n);
  out.v.resize(n, n);
  out.sigma.resize(n);
  const double smax = n > 0 ? sigma[order[0]] : 0.0;
  const double cutoff = smax * static_cast<double>(b.rows()) * std::numeric_limits<double>::epsilon();
  std::vector<bool> valid(static_cast<std::size_t>(n), false);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index src = order[static_cast<std::size_t>(c)];
    out.sigma[c] = sigma[src];
    out.v.col(c) = v.col(src);
    if (sigma[src] > cutoff && sigma[src] > 0.0) {
      out.u.col(c) = b.col(src) / sigma[src];
      valid[static_cast<std::size_t>(c)] = true;
    } else {
      out.u.col(c).setZero();
    }
  }
  complete_orthonormal(out.u, valid);
  return out;
}

template <class Scalar>
ThinSvd<Scalar> thin_svd(const Mat<Scalar>& a) {
  if (a.rows() < a.cols()) {
    ThinSvd<Scalar> t = thin_svd<Scalar>(a.adjoint());
    std::swap(t.u, t.v);
    return t;
  }
  if (a.rows() == a.cols() || a.cols() == 0) return hestenes<Scalar>(a);
  Eigen::HouseholderQR<Mat<Scalar>> qr(a);
  const Eigen::Index n = a.cols();
  Mat<Scalar> r = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
  ThinSvd<Scalar> t = hestenes<Scalar>(std::move(r));
  Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(a.rows(), n);
  t.u = q * t.u;
  return t;
}

template <class Scalar>
void check_inputs(const Mat<Scalar>& s, Eigen::Index k, const char* who) {
  if (k < 0 || k > std::min(s.rows(), s.cols())) {
    throw DimensionError(std::string(who) + ": k = " + std::to_string(k) +
                         " exceeds min(rows, cols) = " +
                         std::to_string(std::min(s.rows(), s.cols())));
  }
  if (!s.allFinite()) throw NumericalError(std::string(who) + ": non-finite entries");
}

// Index of the largest-magnitude entry, first on ties. Entries within a
// relative 1e-10 count as tied so round-off cannot flip the choice.
template <class Derived>
Eigen::Index argmax_abs(const Eigen::MatrixBase<Derived>& x) {
  Eigen::Index best = 0;
  double val = -1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = magnitude(x(i));
    if (m > val * (1.0 + 1e-10)) {
      val = m;
      best = i;
    }
  }
  return best;
}

}  // namespace

SvdResult truncated_svd(const Matrix& s, Eigen::Index k) {
  check_inputs<double>(s, k, "truncated_svd");
  SvdResult out;
  if (k == 0) {
    out.singular_values.resize(0);
    out.left_vectors.resize(s.rows(), 0);
    out.right_vectors.resize(s.cols(), 0);
    return out;
  }
  ThinSvd<double> t = thin_svd<double>(s);
  out.singular_values = t.sigma.head(k);
  out.left_vectors = t.u.leftCols(k);
  out.right_vectors = t.v.leftCols(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index i = argmax_abs(out.left_vectors.col(c));
    if (out.left_vectors(i, c) < 0.0) {
      out.left_vectors.col(c) *= -1.0;
      out.right_vectors.col(c) *= -1.0;
    }
  }
  return out;
}

ComplexSvdResult complex_truncated_svd(const Matrix& s_re, const Matrix& s_im, Eigen::Index k) {
  if (s_re.rows() != s_im.rows() || s_re.cols() != s_im.cols()) {
    throw DimensionError("complex_truncated_svd: real and imaginary parts differ in shape");
  }
  Mat<Complex> s(s_re.rows(), s_re.cols());
  s.real() = s_re;
  s.imag() = s_im;
  check_inputs<Complex>(s, k, "complex_truncated_svd");

  ComplexSvdResult out;
  out.real_part.resize(s.rows(), k);
  out.imag_part.resize(s.rows(), k);
  out.singular_values.resize(k);
  if (k == 0) return out;

  ThinSvd<Complex> t = thin_svd<Complex>(s);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::VectorXcd u = t.u.col(c);
    const Eigen::Index i = argmax_abs(u);
    u *= std::conj(unit_phase(u[i]));
    out.real_part.col(c) = u.real();
    out.imag_part.col(c) = u.imag();
    out.singular_values[c] = t.sigma[c];
  }
  return out;
}

}  // namespace symred
