#include "npsfuzz/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace npsfuzz {

Eigen::VectorXd encode(ByteView input, std::size_t len) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
  const std::size_t n = std::min(len, input.size());
  for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = input[i] / 255.0;
  return x;
}

Bytes decode(const Eigen::VectorXd& encoded, std::size_t len) {
  Bytes out(std::min<std::size_t>(len, static_cast<std::size_t>(encoded.size())));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = std::clamp(encoded[static_cast<Eigen::Index>(i)], 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

Eigen::MatrixXd encode_batch(std::span<const Bytes> inputs, std::size_t len) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = encode(inputs[i], len).transpose();
  }
  return x;
}

std::size_t model_input_len(std::span<const Bytes> corpus, std::size_t max_input_len) {
  std::size_t len = 1;
  for (const auto& in : corpus) len = std::max(len, in.size());
  return std::min(len, max_input_len);
}

CoverageModel::CoverageModel(std::size_t input_len, std::size_t hidden,
                             std::vector<EdgeSet> edge_index)
    : w1_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(input_len),
                                static_cast<Eigen::Index>(hidden))),
      b1_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden))),
      w2_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hidden),
                                static_cast<Eigen::Index>(edge_index.size()))),
      b2_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(edge_index.size()))),
      edge_index_(std::move(edge_index)) {
  if (input_len == 0 || hidden == 0 || edge_index_.empty()) {
    throw DimensionError("model dimensions must be positive");
  }
}

CoverageModel CoverageModel::random(std::size_t input_len, std::size_t hidden,
                                    std::vector<EdgeSet> edge_index, Rng& rng) {
  CoverageModel m(input_len, hidden, std::move(edge_index));
  auto fill = [&rng](Eigen::MatrixXd& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = (2.0 * rng.unit() - 1.0) * limit;
    }
  };
  fill(m.w1_);
  fill(m.w2_);
  return m;
}

Eigen::VectorXd CoverageModel::logits(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != input_len()) {
    throw DimensionError("encoded input width does not match the model");
  }
  const Eigen::VectorXd h = (w1_.transpose() * x + b1_).cwiseMax(0.0);
  return w2_.transpose() * h + b2_;
}

namespace {
double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}
}  // namespace

Eigen::VectorXd CoverageModel::predict(const Eigen::VectorXd& x) const {
  return logits(x).unaryExpr(&sigmoid);
}

Eigen::MatrixXd CoverageModel::predict_batch(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != input_len()) {
    throw DimensionError("encoded input width does not match the model");
  }
  Eigen::MatrixXd h = (x * w1_).rowwise() + b1_.transpose();
  h = h.cwiseMax(0.0);
  Eigen::MatrixXd z = (h * w2_).rowwise() + b2_.transpose();
  return z.unaryExpr(&sigmoid);
}

Eigen::VectorXd CoverageModel::input_gradient(const Eigen::VectorXd& x,
                                              std::size_t column) const {
  if (column >= edges()) throw DimensionError("targeted column out of range");
  if (static_cast<std::size_t>(x.size()) != input_len()) {
    throw DimensionError("encoded input width does not match the model");
  }
  const Eigen::VectorXd pre = w1_.transpose() * x + b1_;
  Eigen::VectorXd upstream = w2_.col(static_cast<Eigen::Index>(column));
  for (Eigen::Index j = 0; j < pre.size(); ++j) {
    if (pre[j] <= 0.0) upstream[j] = 0.0;
  }
  return w1_ * upstream;
}

bool CoverageModel::all_finite() const {
  return w1_.allFinite() && b1_.allFinite() && w2_.allFinite() && b2_.allFinite();
}

namespace {

void write_values(std::ostream& out, const double* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) out << (i ? " " : "") << data[i];
  out << '\n';
}

void read_values(std::istream& in, double* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    std::string token;
    if (!(in >> token)) throw Error("truncated model checkpoint");
    data[i] = std::strtod(token.c_str(), nullptr);
  }
}

}  // namespace

void CoverageModel::save(std::ostream& out) const {
  const auto flags = out.flags();
  out << "npsfuzz-model 1\n";
  out << input_len() << ' ' << hidden() << ' ' << edges() << '\n';
  for (const auto& group : edge_index_) {
    out << group.size();
    for (auto e : group) out << ' ' << e;
    out << '\n';
  }
  out << std::hexfloat;
  write_values(out, w1_.data(), w1_.size());
  write_values(out, b1_.data(), b1_.size());
  write_values(out, w2_.data(), w2_.size());
  write_values(out, b2_.data(), b2_.size());
  out.flags(flags);
}

CoverageModel CoverageModel::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "npsfuzz-model" || version != 1) throw Error("not an npsfuzz model checkpoint");
  std::size_t input_len = 0, hidden = 0, edges = 0;
  if (!(in >> input_len >> hidden >> edges)) throw Error("bad checkpoint header");
  std::vector<EdgeSet> index(edges);
  for (auto& group : index) {
    std::size_t n = 0;
    in >> n;
    group.resize(n);
    for (auto& e : group) in >> e;
  }
  if (!in) throw Error("bad checkpoint edge index");
  CoverageModel m(input_len, hidden, std::move(index));
  read_values(in, m.w1_.data(), m.w1_.size());
  read_values(in, m.b1_.data(), m.b1_.size());
  read_values(in, m.w2_.data(), m.w2_.size());
  read_values(in, m.b2_.data(), m.b2_.size());
  return m;
}

}  // namespace npsfuzz
