#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"
#include "greedyrec/projection.hpp"
#include "greedyrec/support.hpp"
#include "greedyrec/tolerances.hpp"
#include "greedyrec/variant.hpp"

namespace greedyrec {

/// Result of one application of the selection rule.
struct Selection {
  AtomIndex atom = -1;            // lowest index attaining the maximum (up to ties)
  double score = 0.0;             // |<c~_atom, r>|
  std::vector<AtomIndex> tied;    // every index within tol::kTieRelative of the maximum (ascending)
  double margin = 0.0;            // (best - runner-up) / best; 1 when there is no runner-up
  Eigen::VectorXd scores;         // |<c~_i, r>| for all atoms, 0 on the current support

  [[nodiscard]] bool tie() const noexcept { return tied.size() >= 2; }
};

namespace detail {

inline Selection select_from(SolverVariant variant, const ProjectedDictionary& pd, const Eigen::VectorXd& r) {
  Selection sel;
  sel.scores = (pd.family(variant).transpose() * r).cwiseAbs();
  for (AtomIndex i : pd.support) sel.scores(i) = 0.0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < sel.scores.size(); ++i) {
    if (pd.support.contains(i)) continue;
    if (sel.scores(i) > best) {
      best = sel.scores(i);
      sel.atom = i;
    }
  }
  if (sel.atom < 0) throw InvalidArgs("no atom left to select");
  sel.score = best;
  const double cut = best - tol::kTieRelative * best;
  double runner_up = -1.0;
  for (Eigen::Index i = 0; i < sel.scores.size(); ++i) {
    if (pd.support.contains(i)) continue;
    if (sel.scores(i) >= cut) {
      sel.tied.push_back(i);
    }
    if (i != sel.atom) runner_up = std::max(runner_up, sel.scores(i));
  }
  if (sel.tied.size() < 2) {
    sel.tied.clear();
  } else {
    sel.atom = sel.tied.front();  // lowest index among the tied atoms
  }
  if (runner_up < 0.0) {
    sel.margin = 1.0;
  } else {
    sel.margin = best > 0.0 ? (best - runner_up) / best : 0.0;
  }
  return sel;
}

inline void require_orthogonal_residual(const SubspaceProjector& proj, const Eigen::VectorXd& r) {
  const double rn = r.norm();
  if (rn <= tol::kZeroResidual) throw ZeroResidual("residual norm " + std::to_string(rn) + " is zero");
  if (proj.project_onto(r).norm() > tol::kResidualOrthogonality * rn) {
    throw InvalidArgs("residual is not orthogonal to the span of the current support");
  }
}

}  // namespace detail

/// One greedy selection from support q with residual r (r must be orthogonal
/// to span(A_q)). OMP maximizes |<a~_i, r>|, OLS maximizes |<b~_i, r>|.
inline Selection select_atom(SolverVariant variant, const Dictionary& d, const Support& q, const Eigen::VectorXd& r) {
  d.require_support(q);
  d.require_vector(r, "residual");
  const SubspaceProjector proj = projector_for(d, q);
  detail::require_orthogonal_residual(proj, r);
  return detail::select_from(variant, project_atoms(d, q), r);
}

struct GreedyStep {
  std::size_t iteration = 0;  // position in GreedyTrace::selected
  Selection selection;
};

/// Full record of a greedy run.
///
/// `selected` starts with the `seeded` prefix (taken as given, no scores) and
/// continues in selection order. `residual_norms[t]` is ||r_Q|| once the
/// support holds `seeded + t` atoms, so the vector has one more entry than
/// `steps` unless the run stopped on a zero residual.
struct GreedyTrace {
  SolverVariant variant = SolverVariant::Omp;
  std::size_t target_k = 0;
  Support selected;
  std::size_t seeded = 0;
  std::vector<GreedyStep> steps;
  std::vector<double> residual_norms;
  std::optional<std::size_t> tie_at;         // first iteration whose maximum was shared
  std::optional<std::size_t> early_zero_at;  // iteration at which r vanished before k atoms
};

/// Runs OMP or OLS for exactly k - |seed| selections on top of the seed
/// support, stopping early only if the residual vanishes.
inline GreedyTrace run(SolverVariant variant, const Dictionary& d, const Eigen::VectorXd& y, std::size_t k,
                       const std::optional<Support>& seed = std::nullopt) {
  d.require_vector(y, "observation");
  if (k < 1 || static_cast<Eigen::Index>(k) > d.rows()) {
    throw InvalidArgs("iteration count k=" + std::to_string(k) + " must lie in [1, m=" + std::to_string(d.rows()) +
                      "]");
  }
  GreedyTrace trace;
  trace.variant = variant;
  trace.target_k = k;
  if (seed) {
    if (!seed->within(d.cols())) throw InvalidSeed("seed support index out of range");
    if (seed->size() >= k) throw InvalidSeed("seed support must hold fewer than k atoms");
    if (!full_column_rank(d.columns(*seed))) throw InvalidSeed("seed support columns are rank deficient");
    trace.selected = *seed;
    trace.seeded = seed->size();
  }
  while (true) {
    const SubspaceProjector proj = projector_for(d, trace.selected);
    const Eigen::VectorXd r = proj.project_out(y);
    const double rn = r.norm();
    trace.residual_norms.push_back(rn);
    if (trace.selected.size() == k) break;
    if (rn <= tol::kZeroResidual) {
      trace.early_zero_at = trace.selected.size();
      break;
    }
    GreedyStep step;
    step.iteration = trace.selected.size();
    step.selection = detail::select_from(variant, project_atoms(d, trace.selected), r);
    if (step.selection.tie() && !trace.tie_at) trace.tie_at = step.iteration;
    trace.selected.push_back(step.selection.atom);
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

struct Success {
  friend bool operator==(const Success&, const Success&) = default;
};
/// A wrong atom was strictly preferred at `iteration`.
struct WrongAtomAt {
  std::size_t iteration;
  AtomIndex atom;
  friend bool operator==(const WrongAtomAt&, const WrongAtomAt&) = default;
};
/// The selection maximum was shared by a true and a wrong atom.
struct TieWithWrongAtomAt {
  std::size_t iteration;
  friend bool operator==(const TieWithWrongAtomAt&, const TieWithWrongAtomAt&) = default;
};
/// The residual vanished after only `iteration` atoms.
struct EarlyZeroResidual {
  std::size_t iteration;
  friend bool operator==(const EarlyZeroResidual&, const EarlyZeroResidual&) = default;
};

using RecoveryOutcome = std::variant<Success, WrongAtomAt, TieWithWrongAtomAt, EarlyZeroResidual>;

inline bool is_success(const RecoveryOutcome& o) { return std::holds_alternative<Success>(o); }

/// Iteration at which a failed run went wrong.
inline std::optional<std::size_t> failure_iteration(const RecoveryOutcome& o) {
  return std::visit(
      [](const auto& v) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Success>) {
          return std::nullopt;
        } else {
          return v.iteration;
        }
      },
      o);
}

inline std::string outcome_name(const RecoveryOutcome& o) {
  switch (o.index()) {
    case 0: return "success";
    case 1: return "wrong_atom";
    case 2: return "tie_with_wrong_atom";
    default: return "early_zero_residual";
  }
}

/// Success iff the first k selections all lie in `truth` and no selection
/// maximum was shared between a true and a wrong atom (such ties count as a
/// wrong decision). A run that stopped before k atoms is a failure.
inline RecoveryOutcome classify(const GreedyTrace& trace, const Support& truth) {
  if (truth.size() != trace.target_k) {
    throw InvalidArgs("true support has " + std::to_string(truth.size()) + " atoms but the run targeted k=" +
                      std::to_string(trace.target_k));
  }
  for (std::size_t t = 0; t < trace.seeded; ++t) {
    if (!truth.contains(trace.selected[t])) return WrongAtomAt{t, trace.selected[t]};
  }
  for (const GreedyStep& step : trace.steps) {
    const auto& tied = step.selection.tied;
    const bool any_true = std::any_of(tied.begin(), tied.end(), [&](AtomIndex i) { return truth.contains(i); });
    const bool any_wrong = std::any_of(tied.begin(), tied.end(), [&](AtomIndex i) { return !truth.contains(i); });
    if (any_true && any_wrong) return TieWithWrongAtomAt{step.iteration};
    if (!truth.contains(step.selection.atom)) return WrongAtomAt{step.iteration, step.selection.atom};
  }
  if (trace.selected.size() < trace.target_k) {
    return EarlyZeroResidual{trace.early_zero_at.value_or(trace.selected.size())};
  }
  return Success{};
}

}  // namespace greedyrec
