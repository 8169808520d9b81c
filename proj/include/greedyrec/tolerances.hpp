#pragma once

// Numerical thresholds shared by every module. Atoms are unit norm, so the
// absolute thresholds below are on the scale of a single atom.

namespace greedyrec::tol {

/// Maximum deviation of a column norm from 1 before it is treated as unnormalized.
inline constexpr double kUnitNorm = 1e-9;

/// Rank decisions: a singular value below kRankRelative * sigma_max counts as zero.
inline constexpr double kRankRelative = 1e-8;

/// A projected atom with norm at or below this is considered vanished.
inline constexpr double kVanished = 1e-10;

/// Two selection scores within this relative distance of the maximum are tied.
inline constexpr double kTieRelative = 1e-9;

/// Residual norms at or below this stop the greedy iteration.
inline constexpr double kZeroResidual = 1e-12;

/// Orthogonality slack accepted for a residual handed to the selection rule.
inline constexpr double kResidualOrthogonality = 1e-9;

/// Sufficient conditions of the form value < bound are reported as met only
/// when value is below bound by this relative margin, so instances sitting on
/// the boundary in exact arithmetic are never certified through rounding.
inline constexpr double kBoundaryRelative = 1e-9;

inline constexpr bool strictly_below(double value, double bound) {
  return value < bound - kBoundaryRelative * (bound < 0 ? -bound : bound);
}

}  // namespace greedyrec::tol
