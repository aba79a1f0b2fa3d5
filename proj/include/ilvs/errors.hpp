#pragma once

#include <stdexcept>
#include <string>

namespace ilvs {

// Bad user input: config files, CLI arguments, preconditions on parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point ended up at or behind the camera plane.
class BehindCameraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An episode could not continue (target lost, strict field-of-view violation).
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular fits, non-SPD covariances, non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent files on load.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ilvs
