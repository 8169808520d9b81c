#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "greedyrec/errors.hpp"
#include "greedyrec/linalg.hpp"
#include "greedyrec/support.hpp"
#include "greedyrec/tolerances.hpp"

namespace greedyrec {

/// Dense real m x n matrix with unit-norm columns (atoms). Immutable once built.
class Dictionary {
 public:
  /// Throws InvalidArgs unless m >= 1, n >= 2, all entries finite and every
  /// column within tol::kUnitNorm of unit norm.
  explicit Dictionary(Eigen::MatrixXd atoms) : atoms_(std::move(atoms)) {
    check_shape_and_finite(atoms_);
    for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
      const double norm = atoms_.col(j).norm();
      if (std::abs(norm - 1.0) > tol::kUnitNorm) {
        throw InvalidArgs("column " + std::to_string(j) + " has norm " + std::to_string(norm));
      }
    }
  }

  /// Scales every column to unit norm. `renormalized` (if given) reports whether
  /// some column deviated from unit norm by more than tol::kUnitNorm.
  static Dictionary normalized(Eigen::MatrixXd atoms, bool* renormalized = nullptr) {
    check_shape_and_finite(atoms);
    bool changed = false;
    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
      const double norm = atoms.col(j).norm();
      if (norm == 0.0) throw InvalidArgs("column " + std::to_string(j) + " is zero");
      if (std::abs(norm - 1.0) > tol::kUnitNorm) changed = true;
      atoms.col(j) /= norm;
    }
    if (renormalized != nullptr) *renormalized = changed;
    return Dictionary(std::move(atoms));
  }

  [[nodiscard]] Eigen::Index rows() const noexcept { return atoms_.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return atoms_.cols(); }
  [[nodiscard]] const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }
  [[nodiscard]] auto atom(AtomIndex i) const { return atoms_.col(i); }

  /// A_S, the columns indexed by s in support order.
  [[nodiscard]] Eigen::MatrixXd columns(const Support& s) const {
    require_support(s);
    return gather_columns(atoms_, s);
  }

  void require_support(const Support& s) const {
    if (!s.within(cols())) {
      throw InvalidArgs("support index out of range for dictionary with " + std::to_string(cols()) +
                        " atoms");
    }
  }

  void require_vector(const Eigen::VectorXd& v, const char* what) const {
    if (v.size() != rows()) {
      throw InvalidArgs(std::string(what) + " has length " + std::to_string(v.size()) +
                        ", expected " + std::to_string(rows()));
    }
  }

 private:
  static void check_shape_and_finite(const Eigen::MatrixXd& a) {
    if (a.rows() < 1 || a.cols() < 2) {
      throw InvalidArgs("dictionary must have at least 1 row and 2 columns");
    }
    if (!a.allFinite()) throw InvalidArgs("dictionary contains NaN or Inf");
  }

  Eigen::MatrixXd atoms_;
};

/// y = A_S x_S with every coefficient nonzero.
struct SparseInstance {
  Support support;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd observation;
};

inline SparseInstance make_instance(const Dictionary& d, Support support, Eigen::VectorXd coefficients) {
  d.require_support(support);
  if (static_cast<std::size_t>(coefficients.size()) != support.size()) {
    throw InvalidArgs("coefficient count does not match support size");
  }
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
    if (coefficients(i) == 0.0 || !std::isfinite(coefficients(i))) {
      throw InvalidArgs("sparse coefficients must be finite and nonzero");
    }
  }
  Eigen::VectorXd y = d.columns(support) * coefficients;
  return SparseInstance{std::move(support), std::move(coefficients), std::move(y)};
}

/// Uniformly random k-subset of atoms with coefficient magnitudes in
/// [0.5, 1.5] and random signs.
template <typename Rng>
SparseInstance random_instance(const Dictionary& d, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(d.cols());
  if (k == 0 || k > n) throw InvalidArgs("instance sparsity must lie in [1, n]");
  std::vector<AtomIndex> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<AtomIndex>(i);
  // partial Fisher-Yates: first k entries become the support
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::uniform_real_distribution<double> magnitude(0.5, 1.5);
  std::bernoulli_distribution negative(0.5);
  Eigen::VectorXd x(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = magnitude(rng);
    x(i) = negative(rng) ? -v : v;
  }
  return make_instance(d, Support(std::move(pool)), std::move(x));
}

/// Gram matrix A^T A.
inline Eigen::MatrixXd gram(const Dictionary& d) {
  return d.atoms().transpose() * d.atoms();
}

/// max_{i != j} |<a_i, a_j>|
inline double coherence(const Dictionary& d) {
  const Eigen::MatrixXd g = gram(d);
  double mu = 0.0;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      if (i != j) mu = std::max(mu, std::abs(g(i, j)));
    }
  }
  return mu;
}

/// Welch lower bound on the coherence of n unit vectors in R^m (0 when n <= m).
inline double welch_bound(Eigen::Index m, Eigen::Index n) {
  if (n <= m) return 0.0;
  return std::sqrt(static_cast<double>(n - m) / (static_cast<double>(m) * static_cast<double>(n - 1)));
}

inline constexpr Eigen::Index kDefaultSparkCap = 20;

/// Smallest number of linearly dependent columns, or n + 1 when all columns
/// are independent. Exhaustive over subsets; refuses n above `cap`.
inline Eigen::Index spark(const Dictionary& d, Eigen::Index cap = kDefaultSparkCap) {
  const Eigen::Index n = d.cols();
  if (n > cap) {
    throw CapExceeded("spark enumeration limited to " + std::to_string(cap) + " atoms, got " +
                      std::to_string(n));
  }
  const Eigen::Index rank = numerical_rank(d.atoms());
  const Support all = Support::range(0, n);
  for (Eigen::Index s = 2; s <= std::min(n, rank); ++s) {
    bool dependent = false;
    for_each_subset(all, static_cast<std::size_t>(s), [&](const Support& subset) {
      if (!dependent && !full_column_rank(gather_columns(d.atoms(), subset))) dependent = true;
    });
    if (dependent) return s;
  }
  // any rank + 1 columns are dependent
  return rank < n ? rank + 1 : n + 1;
}

/// The (2k-l-1) x (2k-l) dictionary whose Gram matrix has ones on the
/// diagonal and -1/(2k-l-1) elsewhere; its null space is spanned by the
/// all-ones vector.
///
/// The eigenbasis of the Gram target is fixed by the Householder reflection
/// that maps 1/sqrt(2k-l) * ones to the last canonical vector, so the result
/// is reproducible bit for bit.
inline Dictionary build_worst_case(int k, int l) {
  if (k < 1 || l < 0 || l >= k) {
    throw InvalidArgs("worst-case construction needs k >= 1 and 0 <= l < k (got k=" + std::to_string(k) +
                      ", l=" + std::to_string(l) + ")");
  }
  const Eigen::Index p = 2 * k - l;  // atom count
  const Eigen::Index m = p - 1;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
  v(p - 1) -= 1.0;
  // H = I - 2 v v^T / (v^T v): symmetric, orthogonal, last column = ones / sqrt(p)
  const Eigen::MatrixXd h =
      Eigen::MatrixXd::Identity(p, p) - (2.0 / v.squaredNorm()) * (v * v.transpose());
  const double scale = std::sqrt(static_cast<double>(p) / static_cast<double>(m));
  // A = Upsilon U^T with U = H; Upsilon keeps the first m rows of U^T scaled.
  Eigen::MatrixXd a = scale * h.transpose().topRows(m);
  return Dictionary::normalized(std::move(a));
}

/// Gram target of build_worst_case(k, l).
inline Eigen::MatrixXd worst_case_gram(int k, int l) {
  if (k < 1 || l < 0 || l >= k) throw InvalidArgs("worst-case Gram needs k >= 1 and 0 <= l < k");
  const Eigen::Index p = 2 * k - l;
  const double off = -1.0 / static_cast<double>(p - 1);
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(p, p, off);
  g.diagonal().setOnes();
  return g;
}

struct RandomDictionaryOptions {
  int max_bisection_steps = 60;
  int max_decorrelation_sweeps = 500;
};

namespace detail {

template <typename Rng>
Eigen::MatrixXd gaussian_matrix(Eigen::Index m, Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) g(i, j) = normal(rng);
  }
  return g;
}

inline void normalize_columns(Eigen::MatrixXd& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j).normalize();
}

inline double max_off_diagonal(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd g = a.transpose() * a;
  g.diagonal().setZero();
  return g.cwiseAbs().maxCoeff();
}

/// Random low-coherence frame: orthonormal columns when n <= m, otherwise
/// alternating projection between the clipped-Gram set and rank-m PSD
/// matrices, stopped as soon as the coherence reaches `target`.
template <typename Rng>
Eigen::MatrixXd low_coherence_frame(Eigen::Index m, Eigen::Index n, double target, int sweeps, Rng& rng) {
  Eigen::MatrixXd start = gaussian_matrix(m, n, rng);
  if (n <= m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(start);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
  }
  normalize_columns(start);
  const double floor = welch_bound(m, n);
  Eigen::MatrixXd frame = start;
  Eigen::MatrixXd best = frame;
  double best_mu = max_off_diagonal(frame);
  for (int sweep = 0; sweep < sweeps && best_mu > target; ++sweep) {
    Eigen::MatrixXd g = frame.transpose() * frame;
    const double level = std::max(floor, 0.9 * max_off_diagonal(frame));
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != j && std::abs(g(i, j)) > level) g(i, j) = g(i, j) > 0 ? level : -level;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    const Eigen::VectorXd lambda = eig.eigenvalues().tail(m).cwiseMax(0.0);
    frame = lambda.cwiseSqrt().asDiagonal() * eig.eigenvectors().rightCols(m).transpose();
    normalize_columns(frame);
    const double mu = max_off_diagonal(frame);
    if (mu < best_mu) {
      best_mu = mu;
      best = frame;
    }
  }
  return best;
}

}  // namespace detail

/// Seeded random dictionary. Without a target the atoms are normalized
/// Gaussian vectors. With a target, a low-coherence random frame is blended
/// with normalized Gaussian noise as (1-w) F + w N, and w is bisected to the
/// largest value whose column-normalized blend keeps coherence <= target.
inline Dictionary random_dictionary(Eigen::Index m, Eigen::Index n, std::optional<double> coherence_target,
                                    std::uint64_t seed, const RandomDictionaryOptions& options = {}) {
  if (m < 1 || n < 2) throw InvalidArgs("random dictionary needs m >= 1 and n >= 2");
  std::mt19937_64 rng(seed);
  if (!coherence_target) {
    Eigen::MatrixXd g = detail::gaussian_matrix(m, n, rng);
    return Dictionary::normalized(std::move(g));
  }
  const double target = *coherence_target;
  if (!(target >= 0.0) || target < welch_bound(m, n)) {
    throw TargetUnreachable("coherence target " + std::to_string(target) + " is below the Welch bound " +
                            std::to_string(welch_bound(m, n)) + " for " + std::to_string(m) + "x" +
                            std::to_string(n));
  }
  const Eigen::MatrixXd frame =
      detail::low_coherence_frame(m, n, target, options.max_decorrelation_sweeps, rng);
  Eigen::MatrixXd noise = detail::gaussian_matrix(m, n, rng);
  detail::normalize_columns(noise);

  auto blend = [&](double w) {
    Eigen::MatrixXd a = (1.0 - w) * frame + w * noise;
    detail::normalize_columns(a);
    return a;
  };
  if (detail::max_off_diagonal(frame) > target) {
    throw TargetUnreachable("no frame with coherence <= " + std::to_string(target) + " found for " +
                            std::to_string(m) + "x" + std::to_string(n));
  }
  double lo = 0.0;
  double hi = 1.0;
  if (detail::max_off_diagonal(blend(hi)) <= target) {
    lo = hi;
  } else {
    for (int step = 0; step < options.max_bisection_steps; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (detail::max_off_diagonal(blend(mid)) <= target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  Dictionary out = Dictionary::normalized(blend(lo));
  if (coherence(out) > target) {
    // renormalization moved an entry across the boundary; fall back to the frame
    out = Dictionary::normalized(blend(0.0));
    if (coherence(out) > target) throw TargetUnreachable("coherence target lost to rounding");
  }
  return out;
}

}  // namespace greedyrec
