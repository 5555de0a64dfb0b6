#include "npsfuzz/havoc.hpp"

#include <algorithm>
#include <stdexcept>

namespace npsfuzz {

namespace {

std::size_t chunk_len(Rng& rng, std::size_t chunk_max, std::size_t limit) {
  return rng.between(1, std::max<std::size_t>(1, std::min(chunk_max, limit)));
}

}  // namespace

void apply_havoc_op(HavocOp op, Bytes& data, Rng& rng, const HavocConfig& config) {
  const auto pos = [&](std::size_t n) { return static_cast<std::ptrdiff_t>(n); };
  switch (op) {
    case HavocOp::kBitFlip: {
      const std::size_t at = rng.below(data.size());
      data[at] ^= static_cast<std::uint8_t>(1u << rng.below(8));
      break;
    }
    case HavocOp::kSetByte:
      data[rng.below(data.size())] = rng.byte();
      break;
    case HavocOp::kIncDec: {
      const std::size_t at = rng.below(data.size());
      data[at] = static_cast<std::uint8_t>(data[at] + (rng.below(2) ? 1 : -1));
      break;
    }
    case HavocOp::kDuplicateChunk: {
      const std::size_t len = chunk_len(rng, config.chunk_max, data.size());
      const std::size_t from = rng.below(data.size() - len + 1);
      const std::size_t to = rng.below(data.size() + 1);
      Bytes chunk(data.begin() + pos(from), data.begin() + pos(from + len));
      data.insert(data.begin() + pos(to), chunk.begin(), chunk.end());
      break;
    }
    case HavocOp::kDeleteChunk: {
      if (data.size() < 2) break;
      const std::size_t len = chunk_len(rng, config.chunk_max, data.size() - 1);
      const std::size_t from = rng.below(data.size() - len + 1);
      data.erase(data.begin() + pos(from), data.begin() + pos(from + len));
      break;
    }
    case HavocOp::kInsertChunk: {
      const std::size_t len = chunk_len(rng, config.chunk_max, config.chunk_max);
      const std::size_t to = rng.below(data.size() + 1);
      Bytes chunk(len);
      for (auto& b : chunk) b = rng.byte();
      data.insert(data.begin() + pos(to), chunk.begin(), chunk.end());
      break;
    }
  }
  if (data.size() > config.max_input_len) data.resize(config.max_input_len);
}

Bytes havoc(ByteView input, Rng& rng, const HavocConfig& config) {
  if (input.empty()) throw std::invalid_argument("havoc: input must be non-empty");
  std::vector<HavocOp> enabled;
  for (std::size_t i = 0; i < kHavocOpCount; ++i) {
    if (config.op_mask & (1u << i)) enabled.push_back(static_cast<HavocOp>(i));
  }
  if (enabled.empty()) throw std::invalid_argument("havoc: no operations enabled");
  if (config.min_chain < 1 || config.max_chain < config.min_chain) {
    throw std::invalid_argument("havoc: bad chain bounds");
  }

  Bytes data(input.begin(), input.end());
  if (data.size() > config.max_input_len) data.resize(config.max_input_len);
  const std::size_t chain = rng.between(config.min_chain, config.max_chain);
  for (std::size_t i = 0; i < chain; ++i) {
    apply_havoc_op(enabled[rng.below(enabled.size())], data, rng, config);
  }
  return data;
}

}  // namespace npsfuzz
