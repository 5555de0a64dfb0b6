#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace npsfuzz {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using EdgeId = std::uint32_t;

/// Sorted, duplicate-free list of edge ids.
using EdgeSet = std::vector<EdgeId>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough test cases to build a bitmap, split a corpus or train a model.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Bad user-facing configuration: unknown target, unknown variant, no seeds.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was observed broken at runtime.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Seeded random source. Draws are defined here rather than through the
/// std distributions so that a seed reproduces the same stream with any
/// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint8_t byte() { return static_cast<std::uint8_t>(engine_() >> 56); }

  /// Independent child stream; advances this stream by one draw.
  Rng fork() { return Rng(engine_() ^ 0x9E3779B97F4A7C15ULL); }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

EdgeSet edge_union(const EdgeSet& a, const EdgeSet& b);
EdgeSet edge_difference(const EdgeSet& a, const EdgeSet& b);
EdgeSet edge_intersection_set(const EdgeSet& a, const EdgeSet& b);

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

/// 64-bit FNV-1a, used for config fingerprints stored in reports.
std::uint64_t fnv1a(std::string_view data);
std::string hash_hex(std::uint64_t h);

}  // namespace npsfuzz
