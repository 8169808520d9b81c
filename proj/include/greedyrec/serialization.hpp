#pragma once

// JSON forms of traces, reports, scenarios and sweep configurations. Field
// names are stable; see README.md for the schemas.

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "greedyrec/csv.hpp"
#include "greedyrec/greedy.hpp"
#include "greedyrec/guarantees.hpp"
#include "greedyrec/sweep.hpp"
#include "greedyrec/worstcase.hpp"

namespace greedyrec {

using json = nlohmann::json;

inline json to_json(const Support& s) { return json(s.indices()); }

inline json to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Support support_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("support must be a JSON array");
  return Support(j.get<std::vector<AtomIndex>>());
}

inline Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("vector must be a JSON array");
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json to_json(const RecoveryOutcome& o) {
  json j;
  j["kind"] = outcome_name(o);
  if (const auto it = failure_iteration(o)) j["iteration"] = *it;
  if (const auto* w = std::get_if<WrongAtomAt>(&o)) j["atom"] = w->atom;
  return j;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const GreedyTrace& t, const std::optional<RecoveryOutcome>& outcome = std::nullopt) {
  json j;
  j["variant"] = to_string(t.variant);
  j["k"] = t.target_k;
  j["selected"] = to_json(t.selected);
  j["seeded"] = t.seeded;
  j["residual_norms"] = t.residual_norms;
  j["tie_at"] = optional_json(t.tie_at);
  j["early_zero_at"] = optional_json(t.early_zero_at);
  j["outcome"] = outcome ? to_json(*outcome) : json(nullptr);
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"iteration", s.iteration},
                     {"atom", s.selection.atom},
                     {"score", s.selection.score},
                     {"margin", s.selection.margin},
                     {"tied", s.selection.tied},
                     {"scores", to_json(s.selection.scores)}});
  }
  j["steps"] = std::move(steps);
  return j;
}

inline json to_json(const ErcReport& r) {
  return {{"variant", to_string(r.variant)}, {"lhs", r.lhs},
          {"binding_atom", optional_json(r.binding_atom)}, {"satisfied", r.satisfied},
          {"partial_support", to_json(r.partial_support)}, {"true_support", to_json(r.true_support)}};
}

inline json to_json(const PripConstants& c) {
  return {{"q", c.q}, {"l", c.l}, {"lower", c.lower}, {"upper", c.upper},
          {"kind", c.kind == PripConstants::Kind::Exact ? "exact" : "coherence_bound"}};
}

inline json to_json(const WorstCaseScenario& s) {
  return {{"k", s.k},
          {"l", s.l},
          {"variant", to_string(s.variant)},
          {"m", s.dict.rows()},
          {"n", s.dict.cols()},
          {"dictionary_csv", dictionary_to_csv(s.dict)},
          {"partial", to_json(s.partial)},
          {"truth", to_json(s.truth)},
          {"input", to_json(s.input)},
          {"reach_component", to_json(s.reach_component)},
          {"null_component", to_json(s.null_component)},
          {"prefix_epsilons", s.prefix_epsilons},
          {"mix_epsilon", s.mix_epsilon},
          {"predicted_wrong", s.predicted_wrong},
          {"halves", {{"q1", to_json(s.q1)}, {"q2", to_json(s.q2)}}},
          {"coherence", coherence(s.dict)},
          {"threshold", coherence_threshold(s.k, s.l)}};
}

inline WorstCaseScenario scenario_from_json(const json& j) {
  try {
    WorstCaseScenario s;
    s.k = j.at("k").get<int>();
    s.l = j.at("l").get<int>();
    s.variant = parse_variant(j.at("variant").get<std::string>());
    std::istringstream csv(j.at("dictionary_csv").get<std::string>());
    s.dict = read_dictionary_csv(csv).dictionary;
    s.partial = support_from_json(j.at("partial"));
    s.truth = support_from_json(j.at("truth"));
    s.input = vector_from_json(j.at("input"));
    s.reach_component = vector_from_json(j.at("reach_component"));
    s.null_component = vector_from_json(j.at("null_component"));
    s.prefix_epsilons = j.at("prefix_epsilons").get<std::vector<double>>();
    s.mix_epsilon = j.at("mix_epsilon").get<double>();
    s.predicted_wrong = j.at("predicted_wrong").get<AtomIndex>();
    s.q1 = support_from_json(j.at("halves").at("q1"));
    s.q2 = support_from_json(j.at("halves").at("q2"));
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad scenario JSON: ") + e.what());
  }
}

inline json to_json(const SweepConfig& c) {
  json variants = json::array();
  for (auto v : c.variants) variants.push_back(to_string(v));
  return {{"m", c.m},
          {"n", c.n},
          {"k", {c.k_min, c.k_max}},
          {"l", {c.l_min, c.l_max}},
          {"trials", c.trials},
          {"coherence_target", optional_json(c.coherence_target)},
          {"filter_below_threshold", c.filter_below_threshold},
          {"seed", c.seed},
          {"variants", variants},
          {"seed_partial", c.seed_partial}};
}

namespace detail {

inline void read_range(const json& j, const char* key, int& lo, int& hi) {
  const json& r = j.at(key);
  if (r.is_number_integer()) {
    lo = hi = r.get<int>();
  } else if (r.is_array() && r.size() == 2) {
    lo = r[0].get<int>();
    hi = r[1].get<int>();
  } else {
    throw ParseError(std::string("'") + key + "' must be an integer or [min, max]");
  }
}

}  // namespace detail

/// Accepts the keys written by to_json(SweepConfig). "variant" ("omp", "ols",
/// "both") is accepted in place of "variants".
inline SweepConfig sweep_config_from_json(const json& j) {
  try {
    SweepConfig c;
    c.m = j.at("m").get<Eigen::Index>();
    c.n = j.at("n").get<Eigen::Index>();
    detail::read_range(j, "k", c.k_min, c.k_max);
    if (j.contains("l")) detail::read_range(j, "l", c.l_min, c.l_max);
    c.trials = j.at("trials").get<int>();
    if (j.contains("coherence_target") && !j["coherence_target"].is_null()) {
      c.coherence_target = j["coherence_target"].get<double>();
    }
    c.filter_below_threshold = j.value("filter_below_threshold", false);
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("variants")) {
      c.variants.clear();
      for (const auto& v : j["variants"]) c.variants.push_back(parse_variant(v.get<std::string>()));
    } else if (j.contains("variant")) {
      const auto v = j["variant"].get<std::string>();
      if (v == "both") {
        c.variants = {SolverVariant::Omp, SolverVariant::Ols};
      } else {
        c.variants = {parse_variant(v)};
      }
    }
    c.seed_partial = j.value("seed_partial", false);
    c.threads = j.value("threads", 1u);
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad sweep config: ") + e.what());
  } catch (const InvalidArgs& e) {
    throw ParseError(std::string("bad sweep config: ") + e.what());
  }
}

inline json to_json(const SweepReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"variant", to_string(c.variant)},
                     {"k", c.k},
                     {"l", c.l},
                     {"threshold", c.threshold},
                     {"mu_mean", c.mu_mean},
                     {"mu_max", c.mu_max},
                     {"trials", c.trials},
                     {"accepted", c.accepted},
                     {"skipped", c.skipped},
                     {"success", c.success},
                     {"wrong_atom", c.wrong_atom},
                     {"tie", c.tie},
                     {"early_zero", c.early_zero},
                     {"success_rate", c.success_rate()},
                     {"tie_rate", c.tie_rate()}});
  }
  return {{"version", r.version}, {"config", to_json(r.config)}, {"cells", cells}};
}

}  // namespace greedyrec
