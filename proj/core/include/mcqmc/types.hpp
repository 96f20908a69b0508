#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mcqmc {

// A state x in G, a subset of R^d.
using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Test set (-inf, corner) intersected with G. Membership is strict in every coordinate.
struct AnchoredBox {
  std::vector<double> corner;

  std::size_t dimension() const noexcept { return corner.size(); }

  bool contains(std::span<const double> y) const noexcept {
    for (std::size_t j = 0; j < corner.size(); ++j) {
      if (!(y[j] < corner[j])) return false;
    }
    return true;
  }

  static AnchoredBox full(std::size_t d) { return AnchoredBox{std::vector<double>(d, kInf)}; }
};

enum class DriverKind { UniformRandom, Halton, ScrambledHalton, Explicit, Inverted };

std::string to_string(DriverKind kind);

struct Provenance {
  DriverKind kind = DriverKind::Explicit;
  std::uint64_t seed = 0;  // meaningful for seeded kinds
  std::size_t offset = 0;  // Halton start index, or candidate index for seeded kinds

  std::string describe() const;
};

// n points of [0,1]^s consumed one per chain step. Stored row-major.
class DriverSequence {
 public:
  DriverSequence(std::size_t s, std::vector<double> values, Provenance provenance = {});

  std::size_t size() const noexcept { return values_.size() / s_; }
  std::size_t step_dimension() const noexcept { return s_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::span<const double> operator[](std::size_t i) const noexcept {
    return {values_.data() + i * s_, s_};
  }
  std::span<const double> values() const noexcept { return values_; }

  // First `count` points as a new sequence with the same provenance.
  DriverSequence prefix(std::size_t count) const;

  friend bool operator==(const DriverSequence& a, const DriverSequence& b) {
    return a.s_ == b.s_ && a.values_ == b.values_;
  }

 private:
  std::size_t s_;
  std::vector<double> values_;
  Provenance provenance_;
};

}  // namespace mcqmc
