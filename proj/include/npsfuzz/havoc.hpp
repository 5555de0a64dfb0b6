#pragma once

#include <cstdint>

#include "npsfuzz/common.hpp"

namespace npsfuzz {

enum class HavocOp : std::uint8_t {
  kBitFlip,
  kSetByte,
  kIncDec,
  kDuplicateChunk,
  kDeleteChunk,
  kInsertChunk,
};

inline constexpr std::size_t kHavocOpCount = 6;

struct HavocConfig {
  std::size_t min_chain = 1;
  std::size_t max_chain = 16;
  std::size_t chunk_max = 32;
  std::size_t max_input_len = 4096;
  /// Bit i enables HavocOp(i).
  std::uint32_t op_mask = (1u << kHavocOpCount) - 1;
};

/// Applies one atomic mutation in place. Length stays in [1, max_input_len].
void apply_havoc_op(HavocOp op, Bytes& data, Rng& rng, const HavocConfig& config);

/// Chains a uniformly drawn number (in [min_chain, max_chain]) of atomic
/// mutations, each drawn uniformly from the enabled ops.
Bytes havoc(ByteView input, Rng& rng, const HavocConfig& config);

}  // namespace npsfuzz
