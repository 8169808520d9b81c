#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "greedyrec/csv.hpp"
#include "greedyrec/dictionary.hpp"
#include "greedyrec/errors.hpp"
#include "greedyrec/greedy.hpp"
#include "greedyrec/guarantees.hpp"
#include "greedyrec/variant.hpp"
#include "greedyrec/version.hpp"

namespace greedyrec {

/// Monte Carlo recovery sweep over (k, l) cells.
struct SweepConfig {
  Eigen::Index m = 20;
  Eigen::Index n = 30;
  int k_min = 1;
  int k_max = 3;
  int l_min = 0;
  int l_max = 0;
  int trials = 100;
  std::optional<double> coherence_target;
  /// Generate each dictionary below the cell threshold 1/(2k-l-1) and reject
  /// any trial whose measured coherence is not strictly below it.
  bool filter_below_threshold = false;
  std::uint64_t seed = 0;
  std::vector<SolverVariant> variants{SolverVariant::Omp, SolverVariant::Ols};
  /// Seed each run with l atoms of the true support.
  bool seed_partial = false;
  unsigned threads = 1;
};

/// Aggregated outcomes of one (variant, k, l) cell.
struct SweepCell {
  SolverVariant variant = SolverVariant::Omp;
  int k = 0;
  int l = 0;
  double threshold = 0.0;  // 1/(2k-l-1)
  int trials = 0;
  int skipped = 0;  // generator could not meet the target, or coherence not below threshold
  int accepted = 0;
  int success = 0;
  int wrong_atom = 0;
  int tie = 0;
  int early_zero = 0;
  double mu_mean = 0.0;  // over accepted trials
  double mu_max = 0.0;

  [[nodiscard]] double success_rate() const { return accepted > 0 ? double(success) / accepted : 0.0; }
  [[nodiscard]] double tie_rate() const { return accepted > 0 ? double(tie) / accepted : 0.0; }
};

struct SweepReport {
  SweepConfig config;
  std::vector<SweepCell> cells;
  std::string version = kVersion;

  [[nodiscard]] int total_accepted() const {
    int t = 0;
    for (const auto& c : cells) t += c.accepted;
    return t;
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-trial seed, a function of the master seed and trial coordinates only.
inline std::uint64_t trial_seed(std::uint64_t master, int k, int l, int trial) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(k));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(l) << 20));
  return splitmix64(h ^ (static_cast<std::uint64_t>(trial) << 40));
}

struct TrialResult {
  bool accepted = false;
  double mu = 0.0;
  std::vector<int> outcome;  // RecoveryOutcome index per variant
};

inline TrialResult run_trial(const SweepConfig& cfg, int k, int l, int trial) {
  TrialResult res;
  std::mt19937_64 rng(trial_seed(cfg.seed, k, l, trial));
  const double threshold = coherence_threshold(k, l);
  std::optional<double> target = cfg.coherence_target;
  if (cfg.filter_below_threshold) {
    const double below = threshold * (1.0 - 1e-6);
    target = target ? std::min(*target, below) : below;
  }
  std::optional<Dictionary> dict;
  try {
    dict = random_dictionary(cfg.m, cfg.n, target, rng());
  } catch (const TargetUnreachable&) {
    return res;
  }
  res.mu = coherence(*dict);
  if (cfg.filter_below_threshold && !(res.mu < threshold)) return res;
  const SparseInstance inst = random_instance(*dict, static_cast<std::size_t>(k), rng);
  std::optional<Support> seed;
  if (cfg.seed_partial && l > 0) {
    seed = Support(std::vector<AtomIndex>(inst.support.begin(), inst.support.begin() + l));
  }
  res.accepted = true;
  for (SolverVariant v : cfg.variants) {
    const GreedyTrace trace = run(v, *dict, inst.observation, static_cast<std::size_t>(k), seed);
    res.outcome.push_back(static_cast<int>(classify(trace, inst.support).index()));
  }
  return res;
}

}  // namespace detail

inline void validate(const SweepConfig& cfg) {
  if (cfg.m < 1 || cfg.n < 2) throw InvalidArgs("sweep needs m >= 1 and n >= 2");
  if (cfg.trials < 1) throw InvalidArgs("sweep needs trials >= 1");
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min) throw InvalidArgs("k range is empty");
  if (cfg.l_min < 0 || cfg.l_max < cfg.l_min) throw InvalidArgs("l range is empty");
  if (cfg.k_max > cfg.m || cfg.k_max > cfg.n) throw InvalidArgs("k must not exceed m or n");
  if (cfg.l_min >= cfg.k_max) throw InvalidArgs("no cell satisfies l < k");
  if (cfg.variants.empty()) throw InvalidArgs("sweep needs at least one variant");
}

/// Runs every trial of every cell. Trials are independent and seeded from
/// (seed, k, l, trial), so the report does not depend on `threads`.
inline SweepReport run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  struct Task {
    int k, l, trial;
  };
  std::vector<std::pair<int, int>> kl;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    for (int l = cfg.l_min; l <= std::min(cfg.l_max, k - 1); ++l) kl.emplace_back(k, l);
  }
  std::vector<Task> tasks;
  for (auto [k, l] : kl) {
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({k, l, t});
  }
  std::vector<detail::TrialResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = detail::run_trial(cfg, tasks[i].k, tasks[i].l, tasks[i].trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepReport report;
  report.config = cfg;
  std::size_t cursor = 0;
  for (auto [k, l] : kl) {
    std::vector<SweepCell> cells(cfg.variants.size());
    for (std::size_t v = 0; v < cells.size(); ++v) {
      cells[v].variant = cfg.variants[v];
      cells[v].k = k;
      cells[v].l = l;
      cells[v].threshold = coherence_threshold(k, l);
      cells[v].trials = cfg.trials;
    }
    for (int t = 0; t < cfg.trials; ++t, ++cursor) {
      const auto& r = results[cursor];
      for (std::size_t v = 0; v < cells.size(); ++v) {
        SweepCell& c = cells[v];
        if (!r.accepted) {
          ++c.skipped;
          continue;
        }
        ++c.accepted;
        c.mu_mean += r.mu;
        c.mu_max = std::max(c.mu_max, r.mu);
        switch (r.outcome[v]) {
          case 0: ++c.success; break;
          case 1: ++c.wrong_atom; break;
          case 2: ++c.tie; break;
          default: ++c.early_zero; break;
        }
      }
    }
    for (auto& c : cells) {
      if (c.accepted > 0) c.mu_mean /= c.accepted;
      report.cells.push_back(c);
    }
  }
  return report;
}

/// variant,k,l,mu_mean,threshold,success_rate,tie_rate,accepted,skipped
inline std::string sweep_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "variant,k,l,mu_mean,threshold,success_rate,tie_rate,accepted,skipped\n";
  for (const auto& c : report.cells) {
    out << to_string(c.variant) << ',' << c.k << ',' << c.l << ',' << format_double(c.mu_mean) << ','
        << format_double(c.threshold) << ',' << format_double(c.success_rate()) << ','
        << format_double(c.tie_rate()) << ',' << c.accepted << ',' << c.skipped << '\n';
  }
  return out.str();
}

}  // namespace greedyrec
