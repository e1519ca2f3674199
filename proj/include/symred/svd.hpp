#pragma once

#include "symred/types.hpp"

namespace symred {

/// Leading singular triplets, sigma_1 >= sigma_2 >= ... >= 0. Each left
/// vector has its largest-magnitude entry positive.
struct SvdResult {
  Vector singular_values;
  Matrix left_vectors;
  Matrix right_vectors;
};

/// Top-k singular triplets of S by one-sided (Hestenes) Jacobi. Tall inputs are
/// first reduced with a Householder QR, wide inputs are handled through S^T.
SvdResult truncated_svd(const Matrix& s, Eigen::Index k);

/// Real and imaginary parts of the top-k left singular vectors of the complex
/// matrix S_re + i S_im, u_m = r_m + i s_m. Each u_m is rotated so that its
/// largest-magnitude entry is real and positive.
struct ComplexSvdResult {
  Matrix real_part;
  Matrix imag_part;
  Vector singular_values;
};

ComplexSvdResult complex_truncated_svd(const Matrix& s_re, const Matrix& s_im,
                                       Eigen::Index k);

}  // namespace symred
