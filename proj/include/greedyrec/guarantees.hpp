#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"
#include "greedyrec/projection.hpp"
#include "greedyrec/support.hpp"
#include "greedyrec/tolerances.hpp"
#include "greedyrec/variant.hpp"

namespace greedyrec {

/// Default cap on the number of supports (or support pairs) an exhaustive
/// evaluation may visit.
inline constexpr double kDefaultEnumerationCap = 1e6;

/// Left-hand side of an exact recovery condition and its verdict.
struct ErcReport {
  SolverVariant variant = SolverVariant::Omp;
  double lhs = 0.0;                       // max over i outside Q* of || C~^dagger c~_i ||_1
  std::optional<AtomIndex> binding_atom;  // lowest index attaining lhs; empty if Q* covers every atom
  bool satisfied = true;                  // lhs < 1, see tol::strictly_below
  Support partial_support;                // Q; empty for the plain condition
  Support true_support;
};

namespace detail {

inline ErcReport erc_on_family(SolverVariant variant, const Eigen::MatrixXd& family, const Support& columns,
                               const Support& outside, const std::vector<bool>& vanished) {
  const Eigen::MatrixXd sub = gather_columns(family, columns);
  const SubspaceProjector proj(family.rows(), sub);
  ErcReport rep;
  rep.variant = variant;
  for (AtomIndex i : outside) {
    double value = 0.0;
    if (!vanished[static_cast<std::size_t>(i)]) {
      value = proj.coefficients(Eigen::VectorXd(family.col(i))).lpNorm<1>();
    }
    if (!rep.binding_atom || value > rep.lhs) {
      rep.lhs = value;
      rep.binding_atom = i;
    }
  }
  rep.satisfied = tol::strictly_below(rep.lhs, 1.0);
  return rep;
}

}  // namespace detail

/// max_{i outside Q*} || A_{Q*}^dagger a_i ||_1 (the classical ERC); satisfied when < 1.
inline ErcReport tropp_erc(const Dictionary& d, const Support& qstar) {
  d.require_support(qstar);
  if (qstar.empty()) throw InvalidArgs("true support must be nonempty");
  const std::vector<bool> none(static_cast<std::size_t>(d.cols()), false);
  ErcReport rep = detail::erc_on_family(SolverVariant::Omp, d.atoms(), qstar, complement(qstar, d.cols()), none);
  rep.true_support = qstar;
  return rep;
}

/// Partial ERC after the atoms of Q (a strict subset of Q*) have been selected:
/// max_{i outside Q*} || C~_{Q* \ Q}^dagger c~_i ||_1 on atoms projected off span(A_Q).
inline ErcReport partial_erc(SolverVariant variant, const Dictionary& d, const Support& q, const Support& qstar) {
  d.require_support(q);
  d.require_support(qstar);
  if (!q.subset_of(qstar) || q.size() >= qstar.size()) {
    throw InvalidArgs("partial support must be a strict subset of the true support");
  }
  if (!full_column_rank(d.columns(qstar))) throw RankDeficient("A_{Q*} is rank deficient");
  const ProjectedDictionary pd = project_atoms(d, q);
  ErcReport rep = detail::erc_on_family(variant, pd.family(variant), qstar.minus(q), complement(qstar, d.cols()),
                                        pd.vanished);
  rep.partial_support = q;
  rep.true_support = qstar;
  return rep;
}

/// 1 / (2k - l - 1)
inline double coherence_threshold(int k, int l) {
  if (k < 1 || l < 0 || l >= k) {
    throw InvalidArgs("coherence threshold needs k >= 1 and 0 <= l < k");
  }
  return 1.0 / static_cast<double>(2 * k - l - 1);
}

/// Coherence upper bound on the OMP partial ERC: (k-l) mu / (1 - (k-1) mu),
/// valid for mu < 1/(k-1).
inline double omp_partial_bound(int k, int l, double mu) {
  if (k < 1 || l < 0 || l >= k) throw InvalidArgs("bound needs k >= 1 and 0 <= l < k");
  const double denom = 1.0 - static_cast<double>(k - 1) * mu;
  if (!(mu >= 0.0) || !(denom > 0.0)) {
    throw OutOfDomain("omp_partial_bound requires 0 <= mu < 1/(k-1)");
  }
  return static_cast<double>(k - l) * mu / denom;
}

/// mu / (1 - l mu), valid for mu < 1/l.
inline double ols_coherence_bound(int l, double mu) {
  if (l < 0) throw InvalidArgs("l must be non-negative");
  const double denom = 1.0 - static_cast<double>(l) * mu;
  if (!(mu >= 0.0) || !(denom > 0.0)) throw OutOfDomain("ols_coherence_bound requires 0 <= mu < 1/l");
  return mu / denom;
}

/// Projected restricted isometry constants for supports of size q projected
/// off supports of size l. `lower` bounds the shrinkage (1 - lower is a lower
/// eigenvalue bound), `upper` the dilation; `upper` can be negative.
struct PripConstants {
  enum class Kind { Exact, CoherenceBound };
  int q = 0;
  int l = 0;
  double lower = 0.0;
  double upper = 0.0;
  Kind kind = Kind::Exact;
};

/// Coherence-based constants: upper = (q-1) mu,
/// lower = (q-1) mu + mu^2 q l / (1 - (l-1) mu); requires mu < 1/(l-1).
inline PripConstants prip_coherence_bounds(int q, int l, double mu) {
  if (q < 1 || l < 0) throw InvalidArgs("P-RIP bounds need q >= 1 and l >= 0");
  const double denom = 1.0 - static_cast<double>(l - 1) * mu;
  if (!(mu >= 0.0) || (l >= 2 && !(denom > 0.0))) {
    throw OutOfDomain("prip_coherence_bounds requires 0 <= mu < 1/(l-1)");
  }
  PripConstants c;
  c.q = q;
  c.l = l;
  c.kind = PripConstants::Kind::CoherenceBound;
  c.upper = static_cast<double>(q - 1) * mu;
  c.lower = c.upper + mu * mu * static_cast<double>(q) * static_cast<double>(l) / denom;
  return c;
}

namespace detail {

inline void require_cap(double visits, double cap, const char* what) {
  if (visits > cap) {
    throw CapExceeded(std::string(what) + " would visit " + std::to_string(visits) + " supports (cap " +
                      std::to_string(cap) + ")");
  }
}

/// Calls f(Q, projected dictionary) for every |Q| = l.
template <typename F>
void for_each_projection(const Dictionary& d, int l, F&& f) {
  for_each_subset(Support::range(0, d.cols()), static_cast<std::size_t>(l), [&](const Support& q) {
    if (!full_column_rank(d.columns(q))) throw RankDeficient("a support of size l is rank deficient");
    f(q, project_atoms(d, q));
  });
}

}  // namespace detail

/// Tightest P-RIP constants by exhaustive enumeration of disjoint (Q', Q)
/// with |Q'| = q and |Q| = l: lower = 1 - min eigenvalue, upper = max
/// eigenvalue - 1 of A~_{Q'}^T A~_{Q'}.
inline PripConstants prip_exact(const Dictionary& d, int q, int l, double cap = kDefaultEnumerationCap) {
  const auto n = static_cast<std::size_t>(d.cols());
  if (q < 1 || l < 0 || static_cast<std::size_t>(q + l) > n) {
    throw InvalidArgs("prip_exact needs q >= 1, l >= 0 and q + l <= n");
  }
  detail::require_cap(binomial(n, static_cast<std::size_t>(l)) *
                          binomial(n - static_cast<std::size_t>(l), static_cast<std::size_t>(q)),
                      cap, "prip_exact");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  detail::for_each_projection(d, l, [&](const Support& qs, const ProjectedDictionary& pd) {
    for_each_subset(complement(qs, d.cols()), static_cast<std::size_t>(q), [&](const Support& qp) {
      const Eigen::MatrixXd sub = gather_columns(pd.projected, qp);
      const Eigen::MatrixXd g = sub.transpose() * sub;
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g, Eigen::EigenvaluesOnly).eigenvalues();
      lo = std::min(lo, ev(0));
      hi = std::max(hi, ev(ev.size() - 1));
    });
  });
  PripConstants c;
  c.q = q;
  c.l = l;
  c.kind = PripConstants::Kind::Exact;
  c.lower = 1.0 - lo;
  c.upper = hi - 1.0;
  return c;
}

/// Exact coherence of the projected dictionary (OMP: a~, OLS: b~), maximized
/// over every support of size l. Vanished atoms contribute nothing.
inline double projected_coherence(SolverVariant variant, const Dictionary& d, int l,
                                  double cap = kDefaultEnumerationCap) {
  const auto n = static_cast<std::size_t>(d.cols());
  if (l < 0 || static_cast<std::size_t>(l) + 2 > n) throw InvalidArgs("projected_coherence needs 0 <= l <= n-2");
  detail::require_cap(binomial(n, static_cast<std::size_t>(l)), cap, "projected_coherence");
  double mu = 0.0;
  detail::for_each_projection(d, l, [&](const Support&, const ProjectedDictionary& pd) {
    Eigen::MatrixXd g = pd.family(variant).transpose() * pd.family(variant);
    g.diagonal().setZero();
    mu = std::max(mu, g.cwiseAbs().maxCoeff());
  });
  return mu;
}

/// Right-hand side of the P-RIP bound on the OMP partial ERC:
/// (k-l) (upper_{2,l} + lower_{2,l}) / (2 (1 - lower_{k-l,l})).
inline double prop1_bound(int k, int l, const PripConstants& pair, const PripConstants& block) {
  if (k < 1 || l < 0 || l >= k) throw InvalidArgs("prop1_bound needs k >= 1 and 0 <= l < k");
  if (pair.q != 2 || pair.l != l || block.q != k - l || block.l != l) {
    throw InvalidArgs("prop1_bound needs constants for (2, l) and (k-l, l)");
  }
  if (!(block.lower < 1.0)) throw OutOfDomain("prop1_bound requires lower_{k-l,l} < 1");
  return static_cast<double>(k - l) * (pair.upper + pair.lower) / (2.0 * (1.0 - block.lower));
}

/// Both sides of || A~_{Q'}^T A~_{Q''} u || <= mu_l^OMP sqrt(|Q'||Q''|) ||u||
/// for projections off Q. mu_l^OMP is computed exhaustively unless supplied.
inline std::pair<double, double> lemma5_bound_check(const Dictionary& d, const Support& q, const Support& qp,
                                                    const Support& qpp, const Eigen::VectorXd& u,
                                                    std::optional<double> mu_omp_l = std::nullopt) {
  d.require_support(q);
  d.require_support(qp);
  d.require_support(qpp);
  if (!qp.disjoint_from(qpp)) throw InvalidArgs("Q' and Q'' must be disjoint");
  if (static_cast<std::size_t>(u.size()) != qpp.size()) throw InvalidArgs("u must have |Q''| entries");
  const ProjectedDictionary pd = project_atoms(d, q);
  const Eigen::MatrixXd left = gather_columns(pd.projected, qp);
  const Eigen::MatrixXd right = gather_columns(pd.projected, qpp);
  const double lhs = (left.transpose() * (right * u)).norm();
  const double mu_l =
      mu_omp_l ? *mu_omp_l : projected_coherence(SolverVariant::Omp, d, static_cast<int>(q.size()));
  const double rhs = mu_l * std::sqrt(static_cast<double>(qp.size() * qpp.size())) * u.norm();
  return {lhs, rhs};
}

/// The successive upper bounds on || A~_{Q*\Q}^dagger a~_i ||_1 for one atom i
/// outside Q*, from the norm equivalence down to the P-RIP form.
struct BoundChain {
  AtomIndex atom = -1;
  double l1 = 0.0;          // || x ||_1 with x = A~^dagger a~_i
  double l2_scaled = 0.0;   // sqrt(k-l) || x ||_2
  double gram_scaled = 0.0; // sqrt(k-l) / (1 - lower_{k-l,l}) || A~^T a~_i ||
  double coherence_scaled = 0.0;  // (k-l) mu_l^OMP / (1 - lower_{k-l,l})
  double prip_scaled = 0.0;       // (k-l) (upper_{2,l} + lower_{2,l}) / (2 (1 - lower_{k-l,l}))
};

/// Evaluates the chain for every atom outside Q*, using the supplied exact
/// constants and mu_l^OMP.
inline std::vector<BoundChain> omp_bound_chain(const Dictionary& d, const Support& q, const Support& qstar,
                                               const PripConstants& pair, const PripConstants& block,
                                               double mu_omp_l) {
  const int k = static_cast<int>(qstar.size());
  const int l = static_cast<int>(q.size());
  if (!q.subset_of(qstar) || l >= k) throw InvalidArgs("partial support must be a strict subset of Q*");
  if (!(block.lower < 1.0)) throw OutOfDomain("bound chain requires lower_{k-l,l} < 1");
  const ProjectedDictionary pd = project_atoms(d, q);
  const Eigen::MatrixXd sub = gather_columns(pd.projected, qstar.minus(q));
  const SubspaceProjector proj(d.rows(), sub);
  const double kl = static_cast<double>(k - l);
  const double shrink = 1.0 - block.lower;
  std::vector<BoundChain> out;
  for (AtomIndex i : complement(qstar, d.cols())) {
    const Eigen::VectorXd ai = pd.projected.col(i);
    const Eigen::VectorXd x = proj.coefficients(ai);
    BoundChain c;
    c.atom = i;
    c.l1 = x.lpNorm<1>();
    c.l2_scaled = std::sqrt(kl) * x.norm();
    c.gram_scaled = std::sqrt(kl) / shrink * (sub.transpose() * ai).norm();
    c.coherence_scaled = kl * mu_omp_l / shrink;
    c.prip_scaled = kl * (pair.upper + pair.lower) / (2.0 * shrink);
    out.push_back(c);
  }
  return out;
}

}  // namespace greedyrec
