#include "npsfuzz/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace npsfuzz {

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (!(holdout_fraction > 0 && holdout_fraction < 1)) {
    throw ConfigError("holdout_fraction must be in (0, 1)");
  }
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (restart_period == 0) throw ConfigError("restart_period must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (hidden == 0) throw ConfigError("hidden must be >= 1");
}

double cosine_restart_lr(const TrainConfig& config, std::size_t epoch, std::size_t step,
                         std::size_t steps_per_epoch) {
  const double period = static_cast<double>(config.restart_period * steps_per_epoch);
  const double t = static_cast<double>((epoch % config.restart_period) * steps_per_epoch + step);
  return config.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * t / period));
}

HoldoutSplit split_holdout(std::size_t n, double fraction, std::uint64_t seed) {
  const auto held = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                 std::llround(static_cast<double>(n) * fraction)));
  if (n < 2 || held >= n) {
    throw InsufficientData("corpus too small for a non-empty train/holdout split");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed ^ 0x5851F42D4C957F2DULL);
  shuffle(order, rng);
  HoldoutSplit split;
  split.holdout.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
  std::sort(split.holdout.begin(), split.holdout.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

namespace {

Eigen::MatrixXd label_matrix(const CoverageBitmap& bitmap) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(bitmap.rows()),
                    static_cast<Eigen::Index>(bitmap.cols()));
  for (std::size_t r = 0; r < bitmap.rows(); ++r) {
    for (std::size_t c = 0; c < bitmap.cols(); ++c) {
      y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = bitmap.at(r, c);
    }
  }
  return y;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

struct AdamSlot {
  Eigen::MatrixXd m, v;
  explicit AdamSlot(Eigen::Index r, Eigen::Index c)
      : m(Eigen::MatrixXd::Zero(r, c)), v(Eigen::MatrixXd::Zero(r, c)) {}

  template <typename Param, typename Grad>
  void step(Param& p, const Grad& g, double lr, const TrainConfig& cfg, double bc1, double bc2) {
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.epsilon);
  }
};

// Numerically stable log(1 + exp(-|z|)) based BCE on logits.
double bce_from_logits(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y) {
  double total = 0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double zi = z(i, j);
      total += std::max(zi, 0.0) - zi * y(i, j) + std::log1p(std::exp(-std::abs(zi)));
    }
  }
  return total / static_cast<double>(z.size());
}

Eigen::MatrixXd forward_logits(const CoverageModel& model, const Eigen::MatrixXd& x,
                               Eigen::MatrixXd* hidden_pre = nullptr) {
  Eigen::MatrixXd pre = (x * model.w1()).rowwise() + model.b1().transpose();
  Eigen::MatrixXd z = (pre.cwiseMax(0.0) * model.w2()).rowwise() + model.b2().transpose();
  if (hidden_pre) *hidden_pre = std::move(pre);
  return z;
}

}  // namespace

double bce_loss(const CoverageModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return bce_from_logits(forward_logits(model, x), y);
}

TrainResult train(const CoverageBitmap& bitmap, std::span<const Bytes> corpus,
                  const TrainConfig& config, std::size_t input_len) {
  config.validate();
  if (bitmap.rows() != corpus.size()) {
    throw DimensionError("bitmap rows do not align with the corpus");
  }
  if (bitmap.cols() == 0) throw InsufficientData("bitmap has no columns");

  HoldoutSplit split = split_holdout(corpus.size(), config.holdout_fraction, config.seed);
  const Eigen::MatrixXd x_all = encode_batch(corpus, input_len);
  const Eigen::MatrixXd y_all = label_matrix(bitmap);
  const Eigen::MatrixXd x_train = gather_rows(x_all, split.train);
  const Eigen::MatrixXd y_train = gather_rows(y_all, split.train);

  Rng rng(config.seed);
  CoverageModel model =
      CoverageModel::random(input_len, config.hidden, bitmap.edge_index(), rng);

  AdamSlot s_w1(model.w1().rows(), model.w1().cols());
  AdamSlot s_b1(model.b1().size(), 1);
  AdamSlot s_w2(model.w2().rows(), model.w2().cols());
  AdamSlot s_b2(model.b2().size(), 1);

  const std::size_t n_train = split.train.size();
  const std::size_t steps_per_epoch = (n_train + config.batch_size - 1) / config.batch_size;
  const double edges = static_cast<double>(bitmap.cols());
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      const std::size_t begin = step * config.batch_size;
      const std::size_t end = std::min(n_train, begin + config.batch_size);
      std::span<const std::size_t> rows(order.data() + begin, end - begin);
      const Eigen::MatrixXd xb = gather_rows(x_train, rows);
      const Eigen::MatrixXd yb = gather_rows(y_train, rows);
      const double batch = static_cast<double>(rows.size());

      Eigen::MatrixXd pre;
      const Eigen::MatrixXd z = forward_logits(model, xb, &pre);
      const Eigen::MatrixXd h = pre.cwiseMax(0.0);
      const Eigen::MatrixXd p =
          z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      const Eigen::MatrixXd dz = (p - yb) / (batch * edges);
      const Eigen::MatrixXd g_w2 = h.transpose() * dz;
      const Eigen::VectorXd g_b2 = dz.colwise().sum().transpose();
      Eigen::MatrixXd dh = dz * model.w2().transpose();
      dh = dh.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
      const Eigen::MatrixXd g_w1 = xb.transpose() * dh;
      const Eigen::VectorXd g_b1 = dh.colwise().sum().transpose();

      ++t;
      const double lr = cosine_restart_lr(config, epoch, step, steps_per_epoch);
      const double bc1 = 1 - std::pow(config.beta1, static_cast<double>(t));
      const double bc2 = 1 - std::pow(config.beta2, static_cast<double>(t));
      s_w1.step(model.w1(), g_w1, lr, config, bc1, bc2);
      s_b1.step(model.b1(), g_b1, lr, config, bc1, bc2);
      s_w2.step(model.w2(), g_w2, lr, config, bc1, bc2);
      s_b2.step(model.b2(), g_b2, lr, config, bc1, bc2);
    }
    result.epoch_loss.push_back(bce_loss(model, x_train, y_train));
  }
  if (!model.all_finite()) throw InvariantViolation("training produced non-finite weights");

  std::vector<Bytes> holdout_inputs;
  for (auto i : split.holdout) holdout_inputs.push_back(corpus[i]);
  result.holdout_metrics = evaluate(model, holdout_inputs, bitmap.select_rows(split.holdout));
  result.model = std::move(model);
  result.split = std::move(split);
  return result;
}

bool should_retrain(const RetrainPolicy& policy, const RetrainState& state) {
  if (state.corpus_size < policy.min_corpus) return false;
  if (!state.trained_before) return true;
  return state.new_since_last >= policy.min_new_testcases &&
         state.elapsed_since_last >= policy.min_interval;
}

}  // namespace npsfuzz
