#pragma once

#include <Eigen/Dense>

#include <vector>

#include "greedyrec/support.hpp"
#include "greedyrec/tolerances.hpp"

namespace greedyrec {

/// Columns of `matrix` indexed by `s`, in support order.
inline Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& matrix, const Support& s) {
  Eigen::MatrixXd out(matrix.rows(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t c = 0; c < s.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = matrix.col(s[c]);
  return out;
}

/// Singular values, descending.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& matrix) {
  if (matrix.cols() == 0 || matrix.rows() == 0) return Eigen::VectorXd();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(matrix).singularValues();
}

/// Number of singular values above kRankRelative * sigma_max.
inline Eigen::Index numerical_rank(const Eigen::MatrixXd& matrix) {
  const Eigen::VectorXd sv = singular_values(matrix);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = tol::kRankRelative * sv(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r;
  }
  return r;
}

/// An empty column family counts as full rank.
inline bool full_column_rank(const Eigen::MatrixXd& matrix) {
  if (matrix.cols() == 0) return true;
  return numerical_rank(matrix) == matrix.cols();
}

}  // namespace greedyrec
