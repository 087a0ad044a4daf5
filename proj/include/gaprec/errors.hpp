#pragma once

#include <stdexcept>
#include <string>

namespace gaprec {

/// Invalid input: bad sizes, bad configuration, violated preconditions.
/// The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The computation itself failed (overflow, non-convergence).
/// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SignalTooLongForGrid : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class WindowExceedsGrid : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InsufficientObservations : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class RangeNotMaterialized : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class FrequencyInGap : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class PoleAtZ : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridCapExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TransferSaturated : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeriesNotConverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoFeasibleDelta : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gaprec
