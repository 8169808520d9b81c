#pragma once

#include <string>
#include <string_view>

#include "greedyrec/errors.hpp"

namespace greedyrec {

/// Which greedy selection rule: OMP correlates the residual with projected
/// atoms, OLS with normalized projected atoms.
enum class SolverVariant { Omp, Ols };

inline constexpr SolverVariant kAllVariants[] = {SolverVariant::Omp, SolverVariant::Ols};

inline std::string_view to_string(SolverVariant v) {
  return v == SolverVariant::Omp ? "omp" : "ols";
}

inline SolverVariant parse_variant(std::string_view text) {
  if (text == "omp" || text == "OMP") return SolverVariant::Omp;
  if (text == "ols" || text == "OLS") return SolverVariant::Ols;
  throw ParseError("unknown solver variant '" + std::string(text) + "' (expected omp or ols)");
}

}  // namespace greedyrec
