#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace semiband {

/// Name recorded in run manifests for the underlying engine.
inline constexpr std::string_view kRngName = "std::mt19937_64";

/// Name of the per-replica seed derivation, also recorded in manifests.
inline constexpr std::string_view kSeedMixName =
    "splitmix64(master + 0x9e3779b97f4a7c15 * (index + 1))";

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of replica `index` derived from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// Seedable 64-bit random stream that remembers the seed it was built from.
class Rng {
 public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }
  engine_type& engine() noexcept { return engine_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::uint64_t seed_;
  engine_type engine_;
};

}  // namespace semiband
