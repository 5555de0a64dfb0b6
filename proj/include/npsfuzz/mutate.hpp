#pragma once

#include <vector>

#include "npsfuzz/common.hpp"
#include "npsfuzz/coverage.hpp"

namespace npsfuzz {

class CoverageModel;

/// Default cap on gradient-guided byte locations per seed.
inline constexpr std::size_t kDefaultGradientCap = 500;

struct HotByte {
  std::size_t offset = 0;
  int sign = 1;  // +1 or -1

  bool operator==(const HotByte&) const = default;
};

/// Top-k offsets by |gradient|, descending, ties by ascending offset.
/// Zero entries are never selected, so an all-zero gradient gives an empty
/// list. Throws std::invalid_argument for k == 0.
std::vector<HotByte> rank_bytes(std::span<const double> gradient, std::size_t k);

struct PatternConfig {
  /// Offsets added to / subtracted from the original byte value.
  std::vector<int> steps{1, 2, 4, 8, 16, 32, 64, 128};
  std::size_t chunk_max = 32;
  std::size_t max_input_len = 4096;
};

/// Expands the four per-byte patterns for every hot byte, in order:
///  - successive steps in the gradient's direction, then in the opposite
///    direction, each saturating (the saturated value 255 or 0 is always
///    the last value of its direction);
///  - one random chunk inserted at the offset (clamped to the seed length);
///  - one random-length chunk deleted from the offset.
/// In-place patterns skip offsets past the end of the seed, deletions that
/// would empty the input are skipped, outputs are truncated to
/// max_input_len.
std::vector<Bytes> mutate(ByteView seed, std::span<const HotByte> hot_bytes, Rng& rng,
                          const PatternConfig& config);

struct MutationPlan {
  std::size_t targeted_column = 0;
  std::vector<HotByte> hot_bytes;
  std::vector<Bytes> generated;
};

/// Gradient of the targeted column at the seed -> hot bytes -> mutations.
MutationPlan plan_mutations(const CoverageModel& model, ByteView seed, std::size_t column,
                            std::size_t k, Rng& rng, const PatternConfig& config);

/// Weighted sampling without replacement, weight 1 / (column coverage
/// frequency), so rarely covered columns are preferred.
std::vector<std::size_t> select_target_edges(const CoverageBitmap& bitmap, std::size_t count,
                                             Rng& rng);

}  // namespace npsfuzz
