#pragma once

#include <stdexcept>
#include <string>

namespace wopt {

// Root of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constants that violate the feasibility inequalities of a resource class
// or a task.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// The eigenproblem needs |{m > 0}| > 0.
class WeightNotPositiveAnywhere : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Two fields, masks or classes that are required to live on the same
// domain (or on domains of equal measure) do not.
class DomainMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace wopt
