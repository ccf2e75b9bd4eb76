#pragma once

#include <cstdint>
#include <limits>

namespace liouville {

/// SplitMix64 finalizer; used to derive independent seeds from (seed, stream) keys.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` under `masterSeed`. Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t masterSeed, std::uint64_t stream);

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
///
/// Used instead of std::mt19937_64 + std distributions because the latter are
/// not bit-reproducible across standard library implementations.
class Xoshiro256 {
public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

private:
  std::uint64_t s_[4];
};

/// Counter-keyed stream: the generator for walk `walkIndex` under `masterSeed`.
inline Xoshiro256 walk_stream(std::uint64_t masterSeed, std::uint64_t walkIndex) {
  return Xoshiro256(derive_seed(masterSeed, walkIndex));
}

} // namespace liouville
