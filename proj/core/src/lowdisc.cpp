#include "mcqmc/lowdisc.hpp"

#include <algorithm>
#include <cmath>

#include "mcqmc/error.hpp"

namespace mcqmc {

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  primes.reserve(count);
  for (std::uint32_t c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (std::uint32_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::uint64_t index, std::uint32_t base) noexcept {
  const double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

namespace {

std::size_t digits_for_double(std::uint32_t base) {
  return static_cast<std::size_t>(std::ceil(53.0 * std::log(2.0) / std::log(base))) + 1;
}

}  // namespace

double shifted_radical_inverse(std::uint64_t index, std::uint32_t base,
                               const std::vector<std::uint32_t>& shift) noexcept {
  const double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  for (std::size_t k = 0; k < shift.size(); ++k) {
    const auto digit = static_cast<std::uint32_t>(index % base);
    index /= base;
    result += static_cast<double>((digit + shift[k]) % base) * factor;
    factor *= inv_base;
  }
  // Shifting can push the sum to 1 - ulp rounding up to 1; keep it in [0,1].
  return std::min(result, 1.0);
}

DriverSequence halton_sequence(std::size_t n, std::size_t s, std::size_t offset) {
  if (n == 0 || s == 0) throw PreconditionError("halton_sequence needs n >= 1 and s >= 1");
  const auto bases = first_primes(s);
  std::vector<double> values(n * s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      values[i * s + j] = radical_inverse(offset + i + 1, bases[j]);
    }
  }
  return DriverSequence(s, std::move(values), Provenance{DriverKind::Halton, 0, offset});
}

DriverSequence scrambled_halton_sequence(std::size_t n, std::size_t s, std::uint64_t seed) {
  if (n == 0 || s == 0) throw PreconditionError("scrambled_halton_sequence needs n, s >= 1");
  const auto bases = first_primes(s);
  Rng rng(seed);
  std::vector<std::vector<std::uint32_t>> shifts(s);
  for (std::size_t j = 0; j < s; ++j) {
    shifts[j].resize(digits_for_double(bases[j]));
    for (auto& digit : shifts[j]) digit = static_cast<std::uint32_t>(rng.next_u64() % bases[j]);
  }
  std::vector<double> values(n * s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      values[i * s + j] = shifted_radical_inverse(i + 1, bases[j], shifts[j]);
    }
  }
  return DriverSequence(s, std::move(values), Provenance{DriverKind::ScrambledHalton, seed, 0});
}

DriverSequence uniform_driver(std::size_t n, std::size_t s, Rng& rng) {
  if (n == 0 || s == 0) throw PreconditionError("uniform_driver needs n >= 1 and s >= 1");
  const std::uint64_t seed = rng.seed();
  std::vector<double> values(n * s);
  for (auto& v : values) v = rng.uniform();
  return DriverSequence(s, std::move(values), Provenance{DriverKind::UniformRandom, seed, 0});
}

}  // namespace mcqmc
