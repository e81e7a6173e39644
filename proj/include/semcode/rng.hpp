#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace semcode {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// Stream-splitting rule: fold each word into the running hash with one
// splitmix64 round. Every (master seed, word sequence) pair names one
// independent stream, so rollouts can be drawn in any order.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// Uniform double in [0, 1) from the top 53 bits. mt19937_64 output is fully
// specified by the standard, so draws are bit-stable for a fixed seed.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  auto k = static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(n));
  return k >= n ? n - 1 : k;
}

}  // namespace semcode
