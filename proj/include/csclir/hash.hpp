#pragma once

// Stable, platform-independent hashing used to derive per-record random
// streams. Nothing here may change without changing every seeded output.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace csclir {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over raw bytes.
inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ULL));
}

// Top 53 bits mapped to [0, 1).
inline constexpr double to_unit_interval(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Which random decision a draw feeds. Distinct purposes at the same token
// index are independent.
enum class Draw : std::uint64_t {
  kSwitch = 1,    // Bernoulli(p) per word token
  kLanguage = 2,  // language pick per word token (ML) or per text (Wiki)
  kMix = 3,       // language pick per id when mixing collections
  kNegative = 4,  // extra negative sampling in toy training
};

// A counter-based random stream: every draw is a pure function of
// (seed, record id, side, index, purpose), so results never depend on the
// order in which records are processed.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::string_view record_id, std::uint64_t side) noexcept
      : key_(hash_combine(hash_combine(splitmix64(seed), fnv1a64(record_id)), side)) {}

  std::uint64_t bits(std::uint64_t index, Draw purpose) const noexcept {
    return hash_combine(hash_combine(key_, static_cast<std::uint64_t>(purpose)), index);
  }

  double uniform(std::uint64_t index, Draw purpose) const noexcept {
    return to_unit_interval(bits(index, purpose));
  }

  bool bernoulli(double p, std::uint64_t index, Draw purpose) const noexcept {
    return uniform(index, purpose) < p;
  }

  // Uniform integer in [0, n). n must be positive.
  std::size_t pick(std::size_t n, std::uint64_t index, Draw purpose) const noexcept {
    auto k = static_cast<std::size_t>(uniform(index, purpose) * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_ = 0;
};

}  // namespace csclir
