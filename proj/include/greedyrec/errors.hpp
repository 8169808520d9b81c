#pragma once

#include <stdexcept>
#include <string>

namespace greedyrec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments violate a documented precondition (sizes, index ranges, l < k, ...).
class InvalidArgs : public Error {
 public:
  using Error::Error;
};

/// An exhaustive enumeration would exceed its configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// The random generator cannot meet the requested coherence target.
class TargetUnreachable : public Error {
 public:
  using Error::Error;
};

/// A column family that must be full rank is numerically rank deficient.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// The selection rule was handed a (numerically) zero residual.
class ZeroResidual : public Error {
 public:
  using Error::Error;
};

/// A seed support passed to a greedy run is unusable.
class InvalidSeed : public Error {
 public:
  using Error::Error;
};

/// A bound formula was evaluated outside the domain where it is proven.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Step-size calibration for the worst-case construction did not converge.
class CalibrationFailed : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV / JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace greedyrec
