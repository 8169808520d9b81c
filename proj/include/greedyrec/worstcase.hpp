#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"
#include "greedyrec/greedy.hpp"
#include "greedyrec/guarantees.hpp"
#include "greedyrec/projection.hpp"
#include "greedyrec/support.hpp"
#include "greedyrec/tolerances.hpp"
#include "greedyrec/variant.hpp"

namespace greedyrec {

struct CalibrationOptions {
  int max_halvings = 80;
  /// Every calibrated selection must win by this relative margin.
  double min_margin = 10.0 * tol::kTieRelative;
};

/// Input in span(A_Q) driving a greedy run through Q in order.
struct ReachInput {
  Eigen::VectorXd y;
  std::vector<double> epsilons;  // weights of atoms 2..|Q| of Q; empty when |Q| <= 1
  /// mu + 2 mu^2 1^T (A_R^T A_R)^{-1} 1 for R = first p atoms of Q, p = 1..|Q|-1.
  /// Values below 1 guarantee the next atom wins strictly on the equiangular dictionary.
  std::vector<double> strictness_lhs;
};

namespace detail {

inline bool prefix_matches(const GreedyTrace& trace, const Support& q, double min_margin) {
  if (trace.selected.size() < q.size()) return false;
  for (std::size_t t = 0; t < q.size(); ++t) {
    if (trace.selected[t] != q[t]) return false;
  }
  for (const GreedyStep& step : trace.steps) {
    if (step.iteration >= q.size()) break;
    if (step.selection.tie() || step.selection.margin <= min_margin) return false;
  }
  return true;
}

inline Support prefix(const Support& s, std::size_t count) {
  return Support(std::vector<AtomIndex>(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(count)));
}

inline double ones_quadratic_inverse(const Eigen::MatrixXd& g) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.rows());
  return ones.dot(g.ldlt().solve(ones));
}

}  // namespace detail

/// Builds y_1 = a_{q_1}, y_{p+1} = y_p + eps_{p+1} a_{q_{p+1}}, halving each
/// eps from 1 until a greedy run on y_{p+1} selects q_1..q_{p+1} in order,
/// every selection winning by at least options.min_margin.
inline ReachInput reach_input(const Dictionary& d, const Support& q, SolverVariant variant,
                              const CalibrationOptions& options = {}) {
  d.require_support(q);
  if (static_cast<Eigen::Index>(q.size()) > d.rows() - 1 && !q.empty()) {
    throw InvalidArgs("reachable supports hold at most m - 1 atoms");
  }
  ReachInput out;
  out.y = Eigen::VectorXd::Zero(d.rows());
  if (q.empty()) return out;
  out.y = d.atom(q[0]);
  const double mu = coherence(d);
  if (!detail::prefix_matches(run(variant, d, out.y, 1), detail::prefix(q, 1), options.min_margin)) {
    throw CalibrationFailed("single-atom input does not select its own atom");
  }
  for (std::size_t p = 1; p < q.size(); ++p) {
    const Support target = detail::prefix(q, p + 1);
    const Eigen::MatrixXd ar = d.columns(detail::prefix(q, p));
    out.strictness_lhs.push_back(mu + 2.0 * mu * mu * detail::ones_quadratic_inverse(ar.transpose() * ar));
    double eps = 1.0;
    bool accepted = false;
    for (int attempt = 0; attempt <= options.max_halvings; ++attempt, eps *= 0.5) {
      const Eigen::VectorXd candidate = out.y + eps * d.atom(q[p]);
      if (detail::prefix_matches(run(variant, d, candidate, p + 1), target, options.min_margin)) {
        out.y = candidate;
        out.epsilons.push_back(eps);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw CalibrationFailed("no step size reaches atom " + std::to_string(q[p]) + " at iteration " +
                              std::to_string(p));
    }
  }
  return out;
}

/// Two (k-l)-term representations of one vector in the dictionary projected off Q.
struct DualRepresentation {
  Eigen::VectorXd y2;     // sum of c~_i over Q1
  Support q1;             // first half of the atoms outside Q (ascending)
  Support q2;             // second half
  double closure = 0.0;   // || sum_{Q1} c~_i + sum_{Q2} c~_i ||, zero in exact arithmetic
};

/// Splits the atoms outside Q into (Q1, Q2) lexicographically and returns
/// y2 = sum_{Q1} c~_i = -sum_{Q2} c~_i. Meant for build_worst_case
/// dictionaries, whose null space is spanned by the all-ones vector.
inline DualRepresentation dual_representation(const Dictionary& d, const Support& q, SolverVariant variant) {
  d.require_support(q);
  const Support rest = complement(q, d.cols());
  if (rest.empty() || rest.size() % 2 != 0) {
    throw InvalidArgs("atoms outside Q must split into two halves of equal size");
  }
  const std::size_t half = rest.size() / 2;
  DualRepresentation out;
  out.q1 = detail::prefix(rest, half);
  out.q2 = rest.minus(out.q1);
  const ProjectedDictionary pd = project_atoms(d, q);
  const Eigen::MatrixXd& fam = pd.family(variant);
  Eigen::VectorXd s2 = Eigen::VectorXd::Zero(d.rows());
  out.y2 = Eigen::VectorXd::Zero(d.rows());
  for (AtomIndex i : out.q1) out.y2 += fam.col(i);
  for (AtomIndex i : out.q2) s2 += fam.col(i);
  out.closure = (out.y2 + s2).norm();
  return out;
}

/// Everything needed to replay the worst-case failure at iteration l.
struct WorstCaseScenario {
  int k = 0;
  int l = 0;
  SolverVariant variant = SolverVariant::Omp;
  Dictionary dict = build_worst_case(1, 0);
  Support partial;            // Q = {0, ..., l-1}
  Support truth;              // Q* = Q u Q1 or Q u Q2, excluding predicted_wrong
  Eigen::VectorXd input;      // y = y1 + eps y2
  Eigen::VectorXd reach_component;  // y1
  Eigen::VectorXd null_component;   // y2
  std::vector<double> prefix_epsilons;
  double mix_epsilon = 1.0;
  AtomIndex predicted_wrong = -1;
  Support q1;
  Support q2;
};

/// Worst-case instance at coherence exactly 1/(2k-l-1): the greedy run picks
/// Q during the first l iterations and then cannot avoid a wrong atom.
inline WorstCaseScenario build_scenario(int k, int l, SolverVariant variant, const CalibrationOptions& options = {}) {
  WorstCaseScenario s;
  s.k = k;
  s.l = l;
  s.variant = variant;
  s.dict = build_worst_case(k, l);
  s.partial = Support::range(0, l);
  const ReachInput reach = reach_input(s.dict, s.partial, variant, options);
  s.reach_component = reach.y;
  s.prefix_epsilons = reach.epsilons;
  const DualRepresentation dual = dual_representation(s.dict, s.partial, variant);
  s.null_component = dual.y2;
  s.q1 = dual.q1;
  s.q2 = dual.q2;

  double eps = 1.0;
  bool accepted = (l == 0);
  for (int attempt = 0; !accepted && attempt <= options.max_halvings; ++attempt) {
    const Eigen::VectorXd candidate = s.reach_component + eps * s.null_component;
    if (detail::prefix_matches(run(variant, s.dict, candidate, static_cast<std::size_t>(l)), s.partial,
                               options.min_margin)) {
      accepted = true;
    } else {
      eps *= 0.5;
    }
  }
  if (!accepted) throw CalibrationFailed("no mixing weight preserves the first l selections");
  s.mix_epsilon = eps;
  s.input = s.reach_component + eps * s.null_component;

  // the atom the selection rule prefers once Q has been selected
  const ProjectedDictionary pd = project_atoms(s.dict, s.partial);
  const Eigen::VectorXd scores = (pd.family(variant).transpose() * s.null_component).cwiseAbs();
  double best = -1.0;
  for (AtomIndex i : complement(s.partial, s.dict.cols())) {
    if (scores(i) > best * (1.0 + tol::kTieRelative)) {
      best = scores(i);
      s.predicted_wrong = i;
    }
  }
  s.truth = s.q2.contains(s.predicted_wrong) ? s.partial.united(s.q1) : s.partial.united(s.q2);

  const double scale = std::max(1.0, s.input.norm());
  if (residual(s.dict, s.truth, s.input).norm() > 1e-10 * scale) {
    throw CalibrationFailed("constructed input is not in the span of the true support");
  }
  return s;
}

/// Outcome of running the solver on a scenario's input.
struct ScenarioReplay {
  GreedyTrace trace;
  RecoveryOutcome outcome;
  bool prefix_ok = false;   // first l selections equal Q in order
  bool fails_at_l = false;  // wrong atom or wrong-atom tie at iteration l (0-based)
  double coherence = 0.0;
  double threshold = 0.0;

  [[nodiscard]] bool reproduced() const {
    return prefix_ok && fails_at_l && std::abs(coherence - threshold) <= 1e-10;
  }
};

inline ScenarioReplay replay(const WorstCaseScenario& s) {
  ScenarioReplay r{run(s.variant, s.dict, s.input, static_cast<std::size_t>(s.k)), Success{}};
  r.outcome = classify(r.trace, s.truth);
  r.prefix_ok = s.partial.size() <= r.trace.selected.size() &&
                std::equal(s.partial.begin(), s.partial.end(), r.trace.selected.begin());
  const bool wrong = std::holds_alternative<WrongAtomAt>(r.outcome) ||
                     std::holds_alternative<TieWithWrongAtomAt>(r.outcome);
  r.fails_at_l = wrong && failure_iteration(r.outcome) == static_cast<std::size_t>(s.l);
  r.coherence = coherence(s.dict);
  r.threshold = coherence_threshold(s.k, s.l);
  return r;
}

/// Closed forms of <a~_i, a~_j> (i != j) and ||a~_i||^2 for atoms outside R
/// on build_worst_case(k, l): -mu - mu^2 s and 1 - mu^2 s, with
/// s = 1^T (A_R^T A_R)^{-1} 1 and mu = 1/(2k-l-1).
struct ProjectedGramValues {
  double cross = 0.0;
  double norm_sq = 0.0;
};

inline ProjectedGramValues lemma6_closed_form(int k, int l, const Support& r) {
  if (k < 1 || l < 0 || l >= k) throw InvalidArgs("closed form needs k >= 1 and 0 <= l < k");
  const int p = 2 * k - l;
  if (!r.within(p) || static_cast<int>(r.size()) >= p) {
    throw InvalidArgs("R must be a subset of the 2k-l atoms with |R| < 2k-l");
  }
  const double mu = coherence_threshold(k, l);
  double s = 0.0;
  if (!r.empty()) {
    const Eigen::MatrixXd g = gather_columns(gather_columns(worst_case_gram(k, l).transpose(), r).transpose(), r);
    s = detail::ones_quadratic_inverse(g);
  }
  return ProjectedGramValues{-mu - mu * mu * s, 1.0 - mu * mu * s};
}

}  // namespace greedyrec
