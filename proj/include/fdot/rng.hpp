#pragma once

#include <cstdint>
#include <random>

namespace fdot {

// splitmix64 finalizer. Used to spread structured seed inputs (top seed plus
// row counter) over the full 64-bit space before feeding std::mt19937_64.
inline std::uint64_t splitmix64_mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-row seed scheme for batch runs: row i of a table draws from
// mt19937_64(splitmix64_mix(top_seed + (i+1)*golden_gamma)). Documented so
// noisy tables are reproducible bit-for-bit from one top-level seed.
inline std::uint64_t derive_row_seed(std::uint64_t top_seed,
                                     std::uint64_t row_index) {
  constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;
  return splitmix64_mix(top_seed + (row_index + 1) * golden_gamma);
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace fdot
