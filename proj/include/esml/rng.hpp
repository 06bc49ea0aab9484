#ifndef ESML_RNG_HPP
#define ESML_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace esml {

inline constexpr std::uint64_t kSplitMixGolden = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer. Also the mixing function used to derive per-replica
/// seeds from a master seed.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// splitmix64: 64 bits of state, passes BigCrush, trivially seedable.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept { return mix64(state_ += kSplitMixGolden); }
  std::uint64_t operator()() noexcept { return next(); }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~0ULL; }

 private:
  std::uint64_t state_;
};

/// Seed for replica r of a master seed. Documented derivation (also embedded
/// in every trace):
///   child = mix64(master XOR mix64(0x9E3779B97F4A7C15 * (replica + 1)))
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica) noexcept {
  return mix64(master ^ mix64(kSplitMixGolden * (replica + 1)));
}

inline constexpr const char* kStreamDerivation =
    "child=mix64(master^mix64(0x9E3779B97F4A7C15*(replica+1)));gen=splitmix64;"
    "u01=(bits>>11+1)*2^-53;normal=box-muller";

/// A seeded random stream: uniforms on (0,1], standard normals (Box-Muller
/// with one cached spare). Streams derived from distinct (master, replica)
/// pairs are independent for practical purposes and never shared.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept : gen_(seed), seed_(seed) {}

  static RandomStream derived(std::uint64_t master, std::uint64_t replica) noexcept {
    return RandomStream(derive_seed(master, replica));
  }

  std::uint64_t bits() noexcept { return gen_.next(); }

  /// Uniform on (0,1]; 53-bit resolution, never returns 0.
  double uniform() noexcept {
    return static_cast<double>((gen_.next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal deviate.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  SplitMix64 gen_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace esml

#endif  // ESML_RNG_HPP
