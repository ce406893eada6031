#pragma once

#include <stdexcept>
#include <string>

namespace onebit {

// Bad input: dimension mismatch, out-of-range parameter, malformed descriptor.
// The CLI maps this to exit code 2.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Operation not defined for the given variant (e.g. projecting onto a polytope).
class Unsupported : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

// Iterative routine failed to converge or produced non-finite values.
// The CLI maps this to exit code 3.
class NumericalFailure : public std::runtime_error
{
public:
  NumericalFailure(std::string const &what, double residual)
    : std::runtime_error(what + " (residual " + std::to_string(residual) + ")")
    , residual_(residual)
  {
  }

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace onebit
