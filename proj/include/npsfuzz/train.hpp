#pragma once

#include <cstdint>
#include <vector>

#include "npsfuzz/coverage.hpp"
#include "npsfuzz/mleval.hpp"
#include "npsfuzz/model.hpp"

namespace npsfuzz {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t epochs = 50;
  double holdout_fraction = 0.10;
  /// Cosine decay restarts every this many epochs.
  std::size_t restart_period = 10;
  std::size_t batch_size = 32;
  std::size_t hidden = 4096;
  std::uint64_t seed = 0;

  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Learning rate at `step` of `steps_per_epoch`, within `epoch`.
double cosine_restart_lr(const TrainConfig& config, std::size_t epoch, std::size_t step,
                         std::size_t steps_per_epoch);

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> holdout;
};

/// Seeded shuffle of [0, n); the first max(1, round(n * fraction)) indices
/// are held out. Throws InsufficientData when either side would be empty.
HoldoutSplit split_holdout(std::size_t n, double fraction, std::uint64_t seed);

struct TrainResult {
  CoverageModel model;
  HoldoutSplit split;
  /// Mean training-split loss after each epoch.
  std::vector<double> epoch_loss;
  EdgeMetrics holdout_metrics;
};

/// Mean per-edge binary cross-entropy of the model on the given rows.
double bce_loss(const CoverageModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Fits a fresh model to `bitmap` (one row per corpus input, same order)
/// with Adam on mean binary cross-entropy. The holdout rows never touch
/// the weights; metrics are computed on them alone.
TrainResult train(const CoverageBitmap& bitmap, std::span<const Bytes> corpus,
                  const TrainConfig& config, std::size_t input_len);

/// When the fuzzer may (re)train: first training once the corpus reaches
/// min_corpus, later ones only after min_new_testcases additions and
/// min_interval virtual-time units.
struct RetrainPolicy {
  std::size_t min_corpus = 200;
  std::size_t min_new_testcases = 10;
  std::uint64_t min_interval = 3600;
};

struct RetrainState {
  std::size_t corpus_size = 0;
  std::size_t new_since_last = 0;
  std::uint64_t elapsed_since_last = 0;
  bool trained_before = false;
};

bool should_retrain(const RetrainPolicy& policy, const RetrainState& state);

}  // namespace npsfuzz
