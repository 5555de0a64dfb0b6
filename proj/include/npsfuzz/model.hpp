#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "npsfuzz/common.hpp"

namespace npsfuzz {

/// Maps bytes to [0,1] (value/255), zero-padding or truncating to `len`.
Eigen::VectorXd encode(ByteView input, std::size_t len);
/// Inverse of encode() for the first `len` components (rounds to nearest).
Bytes decode(const Eigen::VectorXd& encoded, std::size_t len);

/// Dense network predicting per-edge coverage probability from an encoded
/// input: ReLU hidden layer, one sigmoid output per bitmap column.
///
/// The output layer is tied to the column layout of the (reduced) training
/// bitmap through edge_index(); there is no output for an edge the training
/// corpus never covered.
class CoverageModel {
 public:
  CoverageModel() = default;
  /// Zero-initialised weights.
  CoverageModel(std::size_t input_len, std::size_t hidden, std::vector<EdgeSet> edge_index);

  /// Glorot-uniform weights, zero biases.
  static CoverageModel random(std::size_t input_len, std::size_t hidden,
                              std::vector<EdgeSet> edge_index, Rng& rng);

  std::size_t input_len() const { return static_cast<std::size_t>(w1_.rows()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1_.cols()); }
  std::size_t edges() const { return static_cast<std::size_t>(w2_.cols()); }
  const std::vector<EdgeSet>& edge_index() const { return edge_index_; }

  Eigen::MatrixXd& w1() { return w1_; }
  Eigen::VectorXd& b1() { return b1_; }
  Eigen::MatrixXd& w2() { return w2_; }
  Eigen::VectorXd& b2() { return b2_; }
  const Eigen::MatrixXd& w1() const { return w1_; }
  const Eigen::VectorXd& b1() const { return b1_; }
  const Eigen::MatrixXd& w2() const { return w2_; }
  const Eigen::VectorXd& b2() const { return b2_; }

  Eigen::VectorXd logits(const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict(ByteView input) const { return predict(encode(input, input_len())); }
  /// Row i holds the probabilities for row i of `x`.
  Eigen::MatrixXd predict_batch(const Eigen::MatrixXd& x) const;

  /// Gradient of the pre-sigmoid logit of `column` with respect to each
  /// encoded input component. Throws DimensionError for a bad column.
  Eigen::VectorXd input_gradient(const Eigen::VectorXd& x, std::size_t column) const;

  bool all_finite() const;

  /// Text checkpoint, first line "npsfuzz-model 1". Weights are written as
  /// hex floats, so save/load is exact.
  void save(std::ostream& out) const;
  static CoverageModel load(std::istream& in);

 private:
  Eigen::MatrixXd w1_;  // input_len x hidden
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;  // hidden x edges
  Eigen::VectorXd b2_;
  std::vector<EdgeSet> edge_index_;
};

/// Encodes a batch: one row per input.
Eigen::MatrixXd encode_batch(std::span<const Bytes> inputs, std::size_t len);

/// Model input width for a corpus: longest input, capped at max_input_len.
std::size_t model_input_len(std::span<const Bytes> corpus, std::size_t max_input_len);

}  // namespace npsfuzz
