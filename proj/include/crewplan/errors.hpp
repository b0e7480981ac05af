#pragma once

#include <stdexcept>
#include <string>

namespace crewplan {

// Bad user input: malformed files, violated instance invariants, unsupported
// option combinations.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver could not produce a trustworthy answer (numerical failure,
// iteration caps, nonconvergence).
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crewplan
