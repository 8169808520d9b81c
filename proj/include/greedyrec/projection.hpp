#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"
#include "greedyrec/linalg.hpp"
#include "greedyrec/support.hpp"
#include "greedyrec/tolerances.hpp"
#include "greedyrec/variant.hpp"

namespace greedyrec {

/// Orthogonal projector onto span(B)^perp for a full-column-rank family B,
/// backed by a Householder QR of B. An empty family projects nothing.
class SubspaceProjector {
 public:
  SubspaceProjector(Eigen::Index ambient_dim, const Eigen::MatrixXd& basis) : ambient_(ambient_dim) {
    if (basis.cols() == 0) return;
    if (basis.rows() != ambient_dim) throw InvalidArgs("basis rows do not match ambient dimension");
    if (!full_column_rank(basis)) {
      throw RankDeficient("column family of size " + std::to_string(basis.cols()) + " is rank deficient");
    }
    qr_.compute(basis);
    q_ = qr_.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
  }

  [[nodiscard]] Eigen::Index span_dim() const noexcept { return q_.cols(); }

  /// P^perp v
  [[nodiscard]] Eigen::VectorXd project_out(const Eigen::VectorXd& v) const {
    if (q_.cols() == 0) return v;
    return v - q_ * (q_.transpose() * v);
  }

  /// P^perp applied column by column.
  [[nodiscard]] Eigen::MatrixXd project_out(const Eigen::MatrixXd& m) const {
    if (q_.cols() == 0) return m;
    return m - q_ * (q_.transpose() * m);
  }

  /// P v
  [[nodiscard]] Eigen::VectorXd project_onto(const Eigen::VectorXd& v) const {
    if (q_.cols() == 0) return Eigen::VectorXd::Zero(ambient_);
    return q_ * (q_.transpose() * v);
  }

  /// arg min_c || B c - v ||
  [[nodiscard]] Eigen::VectorXd coefficients(const Eigen::VectorXd& v) const {
    if (q_.cols() == 0) return Eigen::VectorXd();
    return qr_.solve(v);
  }

  /// B^dagger M
  [[nodiscard]] Eigen::MatrixXd coefficients(const Eigen::MatrixXd& m) const {
    if (q_.cols() == 0) return Eigen::MatrixXd(0, m.cols());
    return qr_.solve(m);
  }

 private:
  Eigen::Index ambient_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::MatrixXd q_;
};

inline SubspaceProjector projector_for(const Dictionary& d, const Support& q) {
  return SubspaceProjector(d.rows(), d.columns(q));
}

/// r_Q = P_Q^perp y
inline Eigen::VectorXd residual(const Dictionary& d, const Support& q, const Eigen::VectorXd& y) {
  d.require_vector(y, "observation");
  return projector_for(d, q).project_out(y);
}

/// Coefficients of the orthogonal projection of y onto span(A_Q), in support order.
inline Eigen::VectorXd least_squares(const Dictionary& d, const Support& q, const Eigen::VectorXd& y) {
  d.require_vector(y, "observation");
  return projector_for(d, q).coefficients(y);
}

/// Atoms projected onto span(A_Q)^perp (unnormalized for OMP, normalized for
/// OLS). Vanished atoms, including every atom of the support, are exactly zero
/// in both families.
struct ProjectedDictionary {
  Support support;
  Eigen::MatrixXd projected;   // columns a~_i
  Eigen::MatrixXd normalized;  // columns b~_i
  Eigen::VectorXd norms;       // ||a~_i||
  std::vector<bool> vanished;

  /// c~: a~ for OMP, b~ for OLS.
  [[nodiscard]] const Eigen::MatrixXd& family(SolverVariant v) const {
    return v == SolverVariant::Omp ? projected : normalized;
  }
  [[nodiscard]] Eigen::Index cols() const noexcept { return projected.cols(); }
};

inline ProjectedDictionary project_atoms(const Dictionary& d, const Support& q) {
  const SubspaceProjector proj = projector_for(d, q);
  ProjectedDictionary out;
  out.support = q;
  out.projected = proj.project_out(d.atoms());
  const Eigen::Index n = d.cols();
  out.normalized = Eigen::MatrixXd::Zero(d.rows(), n);
  out.norms = Eigen::VectorXd::Zero(n);
  out.vanished.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = q.contains(i) ? 0.0 : out.projected.col(i).norm();
    if (norm <= tol::kVanished) {
      out.projected.col(i).setZero();
      out.vanished[static_cast<std::size_t>(i)] = true;
    } else {
      out.norms(i) = norm;
      out.normalized.col(i) = out.projected.col(i) / norm;
    }
  }
  return out;
}

}  // namespace greedyrec
