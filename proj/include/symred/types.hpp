#pragma once

#include <Eigen/Dense>

#include <vector>

namespace symred {

/// Column-major dense matrix; every matrix symbol in the library lives here.
using Matrix = Eigen::MatrixXd;

/// Canonical state z = (q_1..q_n, p_1..p_n).
using Vector = Eigen::VectorXd;

/// A point omega in the parameter box of a parametric model.
struct ParameterPoint {
  std::vector<double> coords;

  std::size_t size() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  bool operator==(const ParameterPoint&) const = default;
};

}  // namespace symred
