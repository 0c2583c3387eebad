#ifndef TA2S2_RNG_HPP_
#define TA2S2_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ta2s2 {

using Rng = std::mt19937_64;

// splitmix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the stream identified by (seed, k1, k2, ...). Order matters.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(seed);
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(seed, keys));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ta2s2

#endif  // TA2S2_RNG_HPP_
