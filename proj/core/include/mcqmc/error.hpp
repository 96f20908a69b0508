#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcqmc {

// Caller violated a documented precondition (bad dimension, out-of-range parameter).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested computation is not available at this size, e.g. an exact
// star-discrepancy scan with d > 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An update function produced a state outside the domain.
class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target inversion failed at a specific step of the target list.
class InversionError : public std::runtime_error {
 public:
  InversionError(std::size_t index, const std::string& what)
      : std::runtime_error("step " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace mcqmc
