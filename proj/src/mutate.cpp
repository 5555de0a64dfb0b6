#include "npsfuzz/mutate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "npsfuzz/model.hpp"

namespace npsfuzz {

std::vector<HotByte> rank_bytes(std::span<const double> gradient, std::size_t k) {
  if (k == 0) throw std::invalid_argument("rank_bytes: k must be >= 1");
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (gradient[i] != 0.0) nonzero.push_back(i);
  }
  const std::size_t n = std::min(k, nonzero.size());
  auto by_magnitude = [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(gradient[a]);
    const double mb = std::abs(gradient[b]);
    return ma != mb ? ma > mb : a < b;
  };
  std::partial_sort(nonzero.begin(), nonzero.begin() + static_cast<std::ptrdiff_t>(n),
                    nonzero.end(), by_magnitude);
  std::vector<HotByte> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({nonzero[i], gradient[nonzero[i]] > 0 ? 1 : -1});
  }
  return out;
}

namespace {

void push_bounded(std::vector<Bytes>& out, Bytes candidate, std::size_t max_len) {
  if (candidate.size() > max_len) candidate.resize(max_len);
  if (!candidate.empty()) out.push_back(std::move(candidate));
}

// Values original +/- step, saturating; the bound itself closes the run.
void step_run(std::vector<Bytes>& out, ByteView seed, std::size_t offset, int direction,
              const std::vector<int>& steps, std::size_t max_len) {
  const int original = seed[offset];
  const int bound = direction > 0 ? 255 : 0;
  int last = original;
  auto emit = [&](int value) {
    Bytes candidate(seed.begin(), seed.end());
    candidate[offset] = static_cast<std::uint8_t>(value);
    push_bounded(out, std::move(candidate), max_len);
    last = value;
  };
  for (int step : steps) {
    if (last == bound) break;
    const int value = std::clamp(original + direction * step, 0, 255);
    if (value != last) emit(value);
  }
  if (last != bound) emit(bound);
}

}  // namespace

std::vector<Bytes> mutate(ByteView seed, std::span<const HotByte> hot_bytes, Rng& rng,
                          const PatternConfig& config) {
  std::vector<Bytes> out;
  const std::size_t max_len = config.max_input_len;
  for (const auto& hot : hot_bytes) {
    if (hot.offset < seed.size()) {
      step_run(out, seed, hot.offset, hot.sign, config.steps, max_len);
      step_run(out, seed, hot.offset, -hot.sign, config.steps, max_len);
    }

    {
      const std::size_t at = std::min(hot.offset, seed.size());
      const std::size_t len = rng.between(1, std::max<std::size_t>(config.chunk_max, 1));
      Bytes candidate(seed.begin(), seed.begin() + static_cast<std::ptrdiff_t>(at));
      for (std::size_t i = 0; i < len; ++i) candidate.push_back(rng.byte());
      candidate.insert(candidate.end(), seed.begin() + static_cast<std::ptrdiff_t>(at), seed.end());
      push_bounded(out, std::move(candidate), max_len);
    }

    if (hot.offset < seed.size()) {
      const std::size_t len = std::min<std::size_t>(
          rng.between(1, std::max<std::size_t>(config.chunk_max, 1)), seed.size() - hot.offset);
      if (len < seed.size()) {
        Bytes candidate(seed.begin(), seed.begin() + static_cast<std::ptrdiff_t>(hot.offset));
        candidate.insert(candidate.end(),
                         seed.begin() + static_cast<std::ptrdiff_t>(hot.offset + len), seed.end());
        push_bounded(out, std::move(candidate), max_len);
      }
    }
  }
  return out;
}

MutationPlan plan_mutations(const CoverageModel& model, ByteView seed, std::size_t column,
                            std::size_t k, Rng& rng, const PatternConfig& config) {
  MutationPlan plan;
  plan.targeted_column = column;
  const Eigen::VectorXd grad = model.input_gradient(encode(seed, model.input_len()), column);
  plan.hot_bytes = rank_bytes({grad.data(), static_cast<std::size_t>(grad.size())}, k);
  plan.generated = mutate(seed, plan.hot_bytes, rng, config);
  return plan;
}

std::vector<std::size_t> select_target_edges(const CoverageBitmap& bitmap, std::size_t count,
                                             Rng& rng) {
  if (count == 0) throw std::invalid_argument("select_target_edges: count must be >= 1");
  std::vector<std::size_t> columns(bitmap.cols());
  std::iota(columns.begin(), columns.end(), std::size_t{0});
  std::vector<double> weights(bitmap.cols());
  for (std::size_t c = 0; c < bitmap.cols(); ++c) {
    const std::size_t hits = bitmap.column_count(c);
    // Columns without hits cannot come out of aggregate(); treat them as
    // maximally rare if a hand-built bitmap has one.
    weights[c] = static_cast<double>(bitmap.rows()) / static_cast<double>(std::max<std::size_t>(hits, 1));
  }

  std::vector<std::size_t> picked;
  const std::size_t n = std::min(count, columns.size());
  for (std::size_t round = 0; round < n; ++round) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double r = rng.unit() * total;
    std::size_t i = 0;
    for (; i + 1 < weights.size(); ++i) {
      if (r < weights[i]) break;
      r -= weights[i];
    }
    picked.push_back(columns[i]);
    columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(i));
    weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return picked;
}

}  // namespace npsfuzz
