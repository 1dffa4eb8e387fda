#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edem {

/// Invalid user-supplied parameters (ranges, schema, selectors).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Geometric failure while building a mesh (degenerate cell, zero-area face).
class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two linked particle centers collapsed onto each other.
class SingularConfigurationError : public std::runtime_error {
public:
  SingularConfigurationError(std::size_t i, std::size_t j)
      : std::runtime_error("coincident centers on link (" + std::to_string(i) + ", " + std::to_string(j) + ")"),
        particle_i(i), particle_j(j)
  {
  }
  std::size_t particle_i;
  std::size_t particle_j;
};

/// A time step could not be completed.
class StepFailure : public std::runtime_error {
public:
  StepFailure(const std::string& what, std::size_t particle, double margin)
      : std::runtime_error(what + " (particle " + std::to_string(particle) + ", CFL margin " + std::to_string(margin) + ")"),
        particle(particle), margin(margin)
  {
  }
  std::size_t particle;
  double margin;
  long step = -1;
};

/// A diagnostic could not be measured from the supplied data.
class MeasurementError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed numeric input to an analysis routine.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace edem
