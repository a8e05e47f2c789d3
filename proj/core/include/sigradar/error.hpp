#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sigradar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or malformed data. The CLI maps this to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A required input file does not exist. The CLI maps this to exit code 2.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Training diverged; step() is the optimizer step at which the loss went non-finite.
class NonFiniteLossError : public Error {
 public:
  explicit NonFiniteLossError(std::size_t step)
      : Error("non-finite training loss at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace sigradar
