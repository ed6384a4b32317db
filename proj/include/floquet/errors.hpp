#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace floquet {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed potential text. `position` is 1-based; end of input is size()+1.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An operation was called with arguments that violate its contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The integrator met a non-finite or runaway state.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double x, double energy)
      : Error(what), x_(x), energy_(energy) {}
  double x() const noexcept { return x_; }
  double energy() const noexcept { return energy_; }

 private:
  double x_;
  double energy_;
};

/// A numerical routine failed to converge or produced inconsistent output.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace floquet
