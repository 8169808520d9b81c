// Small in-process phase-transition sweep: success rate of seeded OMP/OLS on
// random dictionaries kept below the coherence threshold of each cell.
//
//   coherence_sweep [trials] [threads]

#include <cstdlib>
#include <iostream>

#include "greedyrec/greedyrec.hpp"

using namespace greedyrec;

int main(int argc, char** argv) {
  SweepConfig cfg;
  cfg.m = 24;
  cfg.n = 32;
  cfg.k_min = 1;
  cfg.k_max = 4;
  cfg.l_min = 0;
  cfg.l_max = 3;
  cfg.trials = argc > 1 ? std::atoi(argv[1]) : 20;
  cfg.threads = argc > 2 ? std::atoi(argv[2]) : 1;
  cfg.filter_below_threshold = true;
  cfg.seed_partial = true;
  cfg.seed = 7;
  try {
    std::cout << sweep_csv(run_sweep(cfg));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
