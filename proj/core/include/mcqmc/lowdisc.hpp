#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mcqmc/rng.hpp"
#include "mcqmc/types.hpp"

namespace mcqmc {

// First `count` primes (2, 3, 5, ...).
std::vector<std::uint32_t> first_primes(std::size_t count);

// Van der Corput radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, std::uint32_t base) noexcept;

// Radical inverse with a digital shift: digit k becomes (a_k + shift[k]) mod base.
// Digits are generated until base^-k drops below double resolution.
double shifted_radical_inverse(std::uint64_t index, std::uint32_t base,
                               const std::vector<std::uint32_t>& shift) noexcept;

// Point i has coordinate j equal to the radical inverse of (offset + i + 1) in the
// j-th prime base. Rows are consecutive chain steps.
DriverSequence halton_sequence(std::size_t n, std::size_t s, std::size_t offset = 0);

// Halton rows with an independent seeded digital shift per coordinate.
DriverSequence scrambled_halton_sequence(std::size_t n, std::size_t s, std::uint64_t seed);

// n*s uniforms from the seeded stream, row-major.
DriverSequence uniform_driver(std::size_t n, std::size_t s, Rng& rng);

}  // namespace mcqmc
