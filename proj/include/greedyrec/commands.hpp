#pragma once

// Implementations of the command-line subcommands. Each returns the process
// exit code and writes its report to `out`, diagnostics to `err`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "greedyrec/csv.hpp"
#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"
#include "greedyrec/greedy.hpp"
#include "greedyrec/guarantees.hpp"
#include "greedyrec/serialization.hpp"
#include "greedyrec/sweep.hpp"
#include "greedyrec/tolerances.hpp"
#include "greedyrec/worstcase.hpp"

namespace greedyrec::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConditionFailed = 2,
  kRankDeficient = 3,
  kReproductionFailed = 4,
};

struct Options {
  std::string dict;
  std::string y;
  std::string instance;  // JSON {"support": [...], "coefficients": [...]}
  std::string scenario;  // scenario.json written by worstcase
  std::string config;
  std::string out;
  std::string format = "json";
  std::string variant;
  std::optional<int> k;
  std::optional<int> l;
  std::optional<int> q;
  std::optional<std::string> seed_support;
  std::optional<std::string> truth;
  std::optional<std::string> qstar;
  std::optional<std::string> partial;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

namespace detail {

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write '" + path.string() + "'");
  f << text;
}

inline Dictionary load_dict(const Options& o, std::ostream& err) {
  if (o.dict.empty()) throw InvalidArgs("--dict is required");
  LoadedDictionary loaded = load_dictionary_csv(o.dict);
  if (loaded.renormalized) err << "warning: dictionary columns were renormalized\n";
  return std::move(loaded.dictionary);
}

inline SolverVariant variant_or(const Options& o, SolverVariant fallback) {
  return o.variant.empty() ? fallback : parse_variant(o.variant);
}

/// Runs `body`, mapping library errors onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const RankDeficient& e) {
    err << "error: " << e.what() << '\n';
    return kRankDeficient;
  } catch (const CalibrationFailed& e) {
    err << "error: " << e.what() << '\n';
    return kReproductionFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace detail

/// Greedy run on a dictionary and observation; exit 0 on success (or when no
/// true support is known), 2 on a recovery failure.
inline int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() -> int {
    std::optional<Dictionary> dict;
    Eigen::VectorXd y;
    std::optional<Support> truth;
    std::optional<int> k = o.k;
    SolverVariant variant = SolverVariant::Omp;
    if (!o.scenario.empty()) {
      const WorstCaseScenario s = scenario_from_json(detail::read_json_file(o.scenario));
      dict = s.dict;
      y = s.input;
      truth = s.truth;
      variant = s.variant;
      if (!k) k = s.k;
    } else {
      dict = detail::load_dict(o, err);
      if (!o.instance.empty()) {
        const json j = detail::read_json_file(o.instance);
        try {
          const SparseInstance inst = make_instance(*dict, support_from_json(j.at("support")),
                                                    vector_from_json(j.at("coefficients")));
          y = inst.observation;
          truth = inst.support;
        } catch (const json::exception& e) {
          throw ParseError(std::string("bad instance JSON: ") + e.what());
        }
      } else if (!o.y.empty()) {
        y = load_vector_csv(o.y);
      } else {
        throw InvalidArgs("one of --y, --instance or --scenario is required");
      }
    }
    if (o.truth) truth = parse_support(*o.truth);
    if (!k && truth) k = static_cast<int>(truth->size());
    if (!k) throw InvalidArgs("--k is required when no true support is given");
    if (*k < 1) throw InvalidArgs("--k must be positive");
    variant = detail::variant_or(o, variant);
    dict->require_vector(y, "observation");
    std::optional<Support> seed;
    if (o.seed_support) seed = parse_support(*o.seed_support);

    const GreedyTrace trace = run(variant, *dict, y, static_cast<std::size_t>(*k), seed);
    std::optional<RecoveryOutcome> outcome;
    if (truth) outcome = classify(trace, *truth);
    if (o.format == "csv") {
      out << "iteration,atom,score,margin,tie,residual_norm\n";
      for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& s = trace.steps[t];
        out << s.iteration << ',' << s.selection.atom << ',' << format_double(s.selection.score) << ','
            << format_double(s.selection.margin) << ',' << (s.selection.tie() ? 1 : 0) << ','
            << format_double(trace.residual_norms[t]) << '\n';
      }
    } else {
      out << to_json(trace, outcome).dump(2) << '\n';
    }
    return (!outcome || is_success(*outcome)) ? kOk : kConditionFailed;
  });
}

/// Exact recovery condition for Q* (plain) or for Q inside Q* (partial), with
/// the coherence-based sufficient conditions alongside.
inline int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() -> int {
    const Dictionary dict = detail::load_dict(o, err);
    if (!o.qstar) throw InvalidArgs("--qstar is required");
    const Support qstar = parse_support(*o.qstar);
    const Support q = o.partial ? parse_support(*o.partial) : Support{};
    if (qstar.empty()) throw InvalidArgs("--qstar must be nonempty");
    if (!q.subset_of(qstar) || (!q.empty() && q.size() >= qstar.size())) {
      throw InvalidArgs("--partial must be a strict subset of --qstar");
    }
    const SolverVariant variant = detail::variant_or(o, SolverVariant::Omp);
    const ErcReport rep = q.empty() ? tropp_erc(dict, qstar) : partial_erc(variant, dict, q, qstar);
    const int k = static_cast<int>(qstar.size());
    const int l = static_cast<int>(q.size());
    const double mu = coherence(dict);
    json j;
    j["erc"] = to_json(rep);
    if (q.empty()) j["erc"]["variant"] = "both";
    j["coherence"] = mu;
    j["k"] = k;
    j["l"] = l;
    j["threshold_full"] = coherence_threshold(k, 0);
    j["threshold_partial"] = coherence_threshold(k, l);
    j["conditions"] = {{"coherence_full", tol::strictly_below(mu, coherence_threshold(k, 0))},
                       {"coherence_partial", tol::strictly_below(mu, coherence_threshold(k, l))},
                       {"erc", rep.satisfied}};
    try {
      j["omp_partial_bound"] = omp_partial_bound(k, l, mu);
    } catch (const OutOfDomain&) {
      j["omp_partial_bound"] = nullptr;
    }
    out << j.dump(2) << '\n';
    return rep.satisfied ? kOk : kConditionFailed;
  });
}

/// Builds the worst-case scenario, writes it to --out (when given) and replays
/// it from the written files. Exit 0 when the failure at iteration l+1 is
/// reproduced, 4 otherwise.
inline int cmd_worstcase(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() -> int {
    if (!o.k || !o.l) throw InvalidArgs("--k and --l are required");
    const int k = *o.k;
    const int l = *o.l;
    if (k < 1 || l < 0 || l >= k) throw InvalidArgs("worstcase needs k >= 1 and 0 <= l < k");
    if (2 * k - l > 64) throw InvalidArgs("worstcase limited to 2k - l <= 64 atoms");
    const SolverVariant variant = detail::variant_or(o, SolverVariant::Omp);
    WorstCaseScenario s = build_scenario(k, l, variant);

    json files = json::array();
    if (!o.out.empty()) {
      const std::filesystem::path dir(o.out);
      std::filesystem::create_directories(dir);
      save_dictionary_csv(s.dict, (dir / "dictionary.csv").string());
      save_vector_csv(s.input, (dir / "y.csv").string());
      detail::write_text(dir / "scenario.json", to_json(s).dump(2) + "\n");
      files = {(dir / "dictionary.csv").string(), (dir / "y.csv").string(), (dir / "scenario.json").string()};
      // replay from disk
      s.dict = load_dictionary_csv((dir / "dictionary.csv").string()).dictionary;
      s.input = load_vector_csv((dir / "y.csv").string());
    }
    const ScenarioReplay r = replay(s);
    json j;
    j["k"] = k;
    j["l"] = l;
    j["variant"] = to_string(variant);
    j["mu"] = r.coherence;
    j["threshold"] = r.threshold;
    j["partial"] = to_json(s.partial);
    j["truth"] = to_json(s.truth);
    j["predicted_wrong"] = s.predicted_wrong;
    j["selected"] = to_json(r.trace.selected);
    j["outcome"] = to_json(r.outcome);
    const auto fail = failure_iteration(r.outcome);
    j["failure_iteration"] = fail ? json(*fail + 1) : json(nullptr);  // 1-based
    j["prefix_epsilons"] = s.prefix_epsilons;
    j["mix_epsilon"] = s.mix_epsilon;
    j["reproduced"] = r.reproduced();
    j["files"] = files;
    out << j.dump(2) << '\n';
    if (!r.reproduced()) {
      err << "error: worst-case failure was not reproduced\n";
      return kReproductionFailed;
    }
    return kOk;
  });
}

/// Monte Carlo sweep. Prints CSV or JSON (per --format) and, with --out,
/// writes sweep.csv and sweep.json.
inline int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() -> int {
    if (o.config.empty()) throw InvalidArgs("--config is required");
    SweepConfig cfg = sweep_config_from_json(detail::read_json_file(o.config));
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    const SweepReport report = run_sweep(cfg);
    const std::string csv = sweep_csv(report);
    const std::string js = to_json(report).dump(2) + "\n";
    if (!o.out.empty()) {
      const std::filesystem::path dir(o.out);
      std::filesystem::create_directories(dir);
      detail::write_text(dir / "sweep.csv", csv);
      detail::write_text(dir / "sweep.json", js);
    }
    out << (o.format == "csv" ? csv : js);
    return kOk;
  });
}

/// Exact projected RIP constants and, when in domain, their coherence bounds.
inline int cmd_prip(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() -> int {
    const Dictionary dict = detail::load_dict(o, err);
    if (!o.q) throw InvalidArgs("--q is required");
    const int q = *o.q;
    const int l = o.l.value_or(0);
    const PripConstants exact = prip_exact(dict, q, l);
    const double mu = coherence(dict);
    json j;
    j["coherence"] = mu;
    j["exact"] = to_json(exact);
    try {
      const PripConstants bound = prip_coherence_bounds(q, l, mu);
      j["coherence_bound"] = to_json(bound);
      j["dominated"] = exact.lower <= bound.lower + 1e-10 && exact.upper <= bound.upper + 1e-10;
    } catch (const OutOfDomain&) {
      j["coherence_bound"] = nullptr;
      j["dominated"] = nullptr;
    }
    out << j.dump(2) << '\n';
    return kOk;
  });
}

/// Coherence, Welch bound, spark and (with --k/--l) the coherence thresholds.
inline int cmd_coherence(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() -> int {
    const Dictionary dict = detail::load_dict(o, err);
    const double mu = coherence(dict);
    json j;
    j["m"] = dict.rows();
    j["n"] = dict.cols();
    j["coherence"] = mu;
    j["welch_bound"] = welch_bound(dict.rows(), dict.cols());
    j["spark"] = dict.cols() <= kDefaultSparkCap ? json(spark(dict)) : json(nullptr);
    if (o.k) {
      const int k = *o.k;
      const int l = o.l.value_or(0);
      j["k"] = k;
      j["l"] = l;
      j["threshold"] = coherence_threshold(k, l);
      j["satisfied"] = tol::strictly_below(mu, coherence_threshold(k, l));
    }
    if (o.format == "csv") {
      out << "m,n,coherence,welch_bound\n"
          << dict.rows() << ',' << dict.cols() << ',' << format_double(mu) << ','
          << format_double(welch_bound(dict.rows(), dict.cols())) << '\n';
    } else {
      out << j.dump(2) << '\n';
    }
    return kOk;
  });
}

}  // namespace greedyrec::cli
