#include "mcqmc/types.hpp"

#include <cmath>

#include "mcqmc/error.hpp"

namespace mcqmc {

std::string to_string(DriverKind kind) {
  switch (kind) {
    case DriverKind::UniformRandom: return "uniform-random";
    case DriverKind::Halton: return "halton";
    case DriverKind::ScrambledHalton: return "scrambled-halton";
    case DriverKind::Explicit: return "explicit";
    case DriverKind::Inverted: return "inverted";
  }
  return "unknown";
}

std::string Provenance::describe() const {
  switch (kind) {
    case DriverKind::UniformRandom:
    case DriverKind::ScrambledHalton:
      return to_string(kind) + "(seed=" + std::to_string(seed) + ";index=" + std::to_string(offset) + ")";
    case DriverKind::Halton:
      return "halton(offset=" + std::to_string(offset) + ")";
    default:
      return to_string(kind);
  }
}

DriverSequence::DriverSequence(std::size_t s, std::vector<double> values, Provenance provenance)
    : s_(s), values_(std::move(values)), provenance_(provenance) {
  if (s_ == 0) throw PreconditionError("driver step dimension must be positive");
  if (values_.empty() || values_.size() % s_ != 0)
    throw PreconditionError("driver needs n >= 1 points of dimension s");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw PreconditionError("driver coordinate outside [0,1]");
  }
}

DriverSequence DriverSequence::prefix(std::size_t count) const {
  if (count == 0 || count > size()) throw PreconditionError("prefix length out of range");
  return DriverSequence(s_, std::vector<double>(values_.begin(), values_.begin() + count * s_),
                        provenance_);
}

}  // namespace mcqmc
