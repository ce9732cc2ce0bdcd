#pragma once

#include <stdexcept>
#include <string>

namespace edgetrace {

// Error taxonomy mirrors the CLI exit-code contract:
//   2 = configuration error, 3 = physics precondition violated,
//   4 = inadmissible partition / bordism failure, 5 = assertion failure.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdmissibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace edgetrace
