// Builds the equiangular worst case for (k, l), prints what each solver does
// on it and why the sufficient conditions do not apply.
//
//   worst_case_walkthrough [k] [l]

#include <cstdlib>
#include <iostream>

#include "greedyrec/greedyrec.hpp"

using namespace greedyrec;

int main(int argc, char** argv) {
  const int k = argc > 1 ? std::atoi(argv[1]) : 3;
  const int l = argc > 2 ? std::atoi(argv[2]) : 1;
  try {
    for (SolverVariant v : kAllVariants) {
      const WorstCaseScenario s = build_scenario(k, l, v);
      const ScenarioReplay r = replay(s);
      std::cout << to_string(v) << ": " << s.dict.rows() << "x" << s.dict.cols() << " dictionary, mu = "
                << format_double(r.coherence) << " (threshold " << format_double(r.threshold) << ")\n";
      std::cout << "  Q = " << to_json(s.partial).dump() << ", Q* = " << to_json(s.truth).dump()
                << ", predicted wrong atom " << s.predicted_wrong << "\n";
      std::cout << "  selected " << to_json(r.trace.selected).dump() << " -> " << outcome_name(r.outcome);
      if (auto it = failure_iteration(r.outcome)) std::cout << " at iteration " << *it + 1;
      std::cout << "\n";
      const ErcReport erc = partial_erc(v, s.dict, s.partial, s.truth);
      std::cout << "  partial ERC lhs = " << format_double(erc.lhs) << (erc.satisfied ? " (satisfied)\n" : " (violated)\n");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
