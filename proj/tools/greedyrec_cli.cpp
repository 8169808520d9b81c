#include <CLI11.hpp>

#include <iostream>

#include "greedyrec/commands.hpp"
#include "greedyrec/version.hpp"

namespace {

using greedyrec::cli::Options;

void add_dict(CLI::App* cmd, Options& o) { cmd->add_option("--dict", o.dict, "dictionary CSV (one row per line)"); }

void add_variant(CLI::App* cmd, Options& o) {
  cmd->add_option("--variant", o.variant, "omp or ols")->check(CLI::IsMember({"omp", "ols"}));
}

void add_format(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy sparse recovery (OMP/OLS) and exact-recovery guarantees"};
  app.set_version_flag("--version", greedyrec::kVersion);
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "run OMP/OLS and classify the recovery");
  add_dict(run, o);
  run->add_option("--y", o.y, "observation vector CSV");
  run->add_option("--instance", o.instance, "sparse instance JSON {support, coefficients}");
  run->add_option("--scenario", o.scenario, "scenario.json written by worstcase");
  add_variant(run, o);
  run->add_option("--k", o.k, "number of iterations");
  run->add_option("--seed-support", o.seed_support, "atoms assumed already selected, \"i,j,...\"");
  run->add_option("--truth", o.truth, "true support used for classification, \"i,j,...\"");
  add_format(run, o);

  auto* certify = app.add_subcommand("certify", "evaluate the (partial) exact recovery condition");
  add_dict(certify, o);
  certify->add_option("--qstar", o.qstar, "true support \"i,j,...\"");
  certify->add_option("--partial", o.partial, "already selected atoms Q (subset of Q*)");
  add_variant(certify, o);

  auto* worst = app.add_subcommand("worstcase", "build and replay the worst-case failure scenario");
  worst->add_option("--k", o.k, "sparsity")->required();
  worst->add_option("--l", o.l, "number of correct initial selections")->required();
  add_variant(worst, o);
  worst->add_option("--out", o.out, "directory for dictionary.csv, y.csv, scenario.json");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo recovery sweep");
  sweep->add_option("--config", o.config, "sweep configuration JSON")->required();
  sweep->add_option("--out", o.out, "directory for sweep.csv and sweep.json");
  sweep->add_option("--seed", o.seed, "override the configured master seed");
  sweep->add_option("--threads", o.threads, "worker threads");
  add_format(sweep, o);

  auto* prip = app.add_subcommand("prip", "exact projected RIP constants");
  add_dict(prip, o);
  prip->add_option("--q", o.q, "size of the projected support")->required();
  prip->add_option("--l", o.l, "size of the support projected out");

  auto* coh = app.add_subcommand("coherence", "coherence, Welch bound and spark of a dictionary");
  add_dict(coh, o);
  coh->add_option("--k", o.k, "sparsity for the threshold check");
  coh->add_option("--l", o.l, "correct initial selections for the threshold check");
  add_format(coh, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : greedyrec::cli::kUsage;
  }

  using namespace greedyrec::cli;
  if (run->parsed()) return cmd_run(o, std::cout, std::cerr);
  if (certify->parsed()) return cmd_certify(o, std::cout, std::cerr);
  if (worst->parsed()) return cmd_worstcase(o, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep(o, std::cout, std::cerr);
  if (prip->parsed()) return cmd_prip(o, std::cout, std::cerr);
  if (coh->parsed()) return cmd_coherence(o, std::cout, std::cerr);
  return kUsage;
}
