#include "mcqmc/rng.hpp"

#include <cmath>
#include <numbers>

namespace mcqmc {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t label) noexcept {
  return Rng(mix64(seed ^ mix64(label * kGolden + 0x632be59bd9b4e019ULL)));
}

std::uint64_t Rng::next_u64() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  // Box-Muller; u1 in (0,1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mcqmc
