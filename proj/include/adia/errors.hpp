#pragma once
// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly; the distinct types let tests and the CLI react precisely.

#include <stdexcept>
#include <string>

namespace adia {

// model evaluated outside its time domain
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// input matrix fails the hermiticity check
struct HermiticityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// spectral gap below the degeneracy floor somewhere on the grid
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// level matching across adjacent samples failed even after refinement
struct ContinuityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// detuning block numerically singular, its inverse is meaningless
struct SingularBlockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// fixed-point iteration diverged or its contraction premise broke down
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// arg of a vanishing coupling has no usable derivative at this sample
struct UndefinedArgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// malformed or inconsistent scenario configuration
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// adaptive integrator step fell below the floor
struct StepUnderflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace adia
