#include "npsfuzz/mleval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"

namespace npsfuzz {
namespace {

CoverageBitmap labels_from(const std::vector<std::vector<int>>& rows) {
  const std::size_t cols = rows.front().size();
  std::vector<EdgeSet> index;
  for (std::size_t c = 0; c < cols; ++c) index.push_back({static_cast<EdgeId>(c)});
  std::vector<std::uint64_t> ids(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) ids[r] = r;
  CoverageBitmap b(rows.size(), index, ids);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) b.set(r, c, rows[r][c] != 0);
  }
  return b;
}

/// Model whose output for column c is the constant sigmoid(logits[c]).
CoverageModel constant_model(std::size_t input_len, std::vector<double> probabilities) {
  std::vector<EdgeSet> index;
  for (std::size_t c = 0; c < probabilities.size(); ++c) index.push_back({static_cast<EdgeId>(c)});
  CoverageModel m(input_len, 2, index);
  for (std::size_t c = 0; c < probabilities.size(); ++c) {
    const double p = probabilities[c];
    m.b2()[static_cast<Eigen::Index>(c)] = std::log(p / (1 - p));
  }
  return m;
}

TEST(PrAuc, PerfectRanking) {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  const std::vector<std::uint8_t> l{1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(*pr_auc(s, l), 1.0);
}

TEST(PrAuc, SinglePositiveRankedLast) {
  // Curve (0,1) -> (0,0) ... -> (1, 1/n): area 1 / (2n).
  for (std::size_t n : {2u, 5u, 17u}) {
    std::vector<double> s;
    std::vector<std::uint8_t> l;
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back(1.0 - static_cast<double>(i) / static_cast<double>(n));
      l.push_back(i + 1 == n);
    }
    EXPECT_NEAR(*pr_auc(s, l), 1.0 / (2.0 * static_cast<double>(n)), 1e-15);
    EXPECT_NEAR(*pr_auc(s, l), oracle::pr_auc_enumerated(s, l), 1e-15);
  }
}

TEST(PrAuc, NoPositivesIsUndefined) {
  EXPECT_FALSE(pr_auc(std::vector<double>{0.1, 0.2}, std::vector<std::uint8_t>{0, 0}));
}

TEST(PrAuc, MatchesEnumerationOnRandomInstances) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.between(1, 64);
    std::vector<double> s(n);
    std::vector<std::uint8_t> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(10)) / 10.0;  // ties on purpose
      l[i] = rng.below(3) == 0;
    }
    l[rng.below(n)] = 1;
    EXPECT_NEAR(*pr_auc(s, l), oracle::pr_auc_enumerated(s, l), 1e-9);
  }
}

TEST(PrAuc, MacroExcludesEdgesWithoutPositives) {
  const auto labels = labels_from({{1, 0}, {0, 0}, {1, 0}});
  Eigen::MatrixXd scores(3, 2);
  scores << 0.9, 0.1, 0.2, 0.2, 0.8, 0.3;
  const auto summary = pr_auc_macro(scores, labels);
  EXPECT_EQ(summary.excluded, 1u);
  EXPECT_DOUBLE_EQ(summary.macro, 1.0);
  EXPECT_FALSE(summary.per_edge[1]);
}

TEST(Evaluate, PerfectPredictor) {
  const auto labels = labels_from({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}});
  Eigen::MatrixXd scores(3, 3);
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) scores(r, c) = labels.at(r, c) ? 0.99 : 0.01;
  }
  const auto m = evaluate_scores(scores, labels);
  EXPECT_DOUBLE_EQ(m.macro_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_precision, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_recall, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_pr_auc, 1.0);
}

TEST(Evaluate, AllNegativePredictorLooksAccurate) {
  std::vector<std::vector<int>> rows(10, {0});
  rows[3][0] = 1;
  const auto labels = labels_from(rows);
  const CoverageModel model = constant_model(2, {0.01});
  std::vector<Bytes> inputs(10, Bytes{1, 2});
  const auto m = evaluate(model, inputs, labels);
  EXPECT_DOUBLE_EQ(m.accuracy[0], 0.9);
  EXPECT_DOUBLE_EQ(m.precision[0], 0.0);
  EXPECT_DOUBLE_EQ(m.recall[0], 0.0);
  EXPECT_DOUBLE_EQ(m.f1[0], 0.0);
  EXPECT_DOUBLE_EQ(m.covered_fraction, 0.1);
}

TEST(Evaluate, MatchesConfusionOracle) {
  Rng rng(8);
  const auto labels = oracle::random_bitmap(20, 5, rng, 0.3);
  Eigen::MatrixXd scores(20, 5);
  for (Eigen::Index r = 0; r < 20; ++r) {
    for (Eigen::Index c = 0; c < 5; ++c) scores(r, c) = rng.unit();
  }
  const auto m = evaluate_scores(scores, labels, 0.5);
  double acc = 0;
  for (std::size_t c = 0; c < 5; ++c) {
    std::vector<double> s(20);
    for (std::size_t r = 0; r < 20; ++r) s[r] = scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    const auto o = oracle::confusion(s, labels.column(c), 0.5);
    EXPECT_DOUBLE_EQ(m.accuracy[c], o.accuracy);
    EXPECT_DOUBLE_EQ(m.precision[c], o.precision);
    EXPECT_DOUBLE_EQ(m.recall[c], o.recall);
    EXPECT_NEAR(m.f1[c], o.f1, 1e-15);
    acc += o.accuracy;
  }
  EXPECT_NEAR(m.macro_accuracy, acc / 5, 1e-15);
}

TEST(Evaluate, PermutationInvariant) {
  Rng rng(10);
  const auto labels = oracle::random_bitmap(30, 4, rng, 0.4);
  Eigen::MatrixXd scores(30, 4);
  for (Eigen::Index r = 0; r < 30; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) scores(r, c) = rng.unit();
  }
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  shuffle(perm, rng);
  Eigen::MatrixXd permuted(30, 4);
  for (std::size_t i = 0; i < 30; ++i) permuted.row(static_cast<Eigen::Index>(i)) = scores.row(static_cast<Eigen::Index>(perm[i]));
  const auto a = evaluate_scores(scores, labels);
  const auto b = evaluate_scores(permuted, labels.select_rows(perm));
  EXPECT_NEAR(a.macro_accuracy, b.macro_accuracy, 1e-15);
  EXPECT_NEAR(a.macro_f1, b.macro_f1, 1e-15);
  EXPECT_NEAR(a.macro_pr_auc, b.macro_pr_auc, 1e-12);
}

TEST(Evaluate, RangesAndDimensionErrors) {
  const auto labels = labels_from({{1, 0}, {0, 1}});
  const CoverageModel three = constant_model(1, {0.5, 0.5, 0.5});
  std::vector<Bytes> inputs(2, Bytes{1});
  EXPECT_THROW(evaluate(three, inputs, labels), DimensionError);
  const CoverageModel two = constant_model(1, {0.7, 0.2});
  const auto m = evaluate(two, inputs, labels);
  for (double v : {m.macro_accuracy, m.macro_precision, m.macro_recall, m.macro_f1, m.macro_pr_auc}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Heatmaps, ConstantModelAndIdentity) {
  const auto labels = labels_from({{1, 0}, {0, 1}, {1, 1}});
  const CoverageModel model = constant_model(3, {0.6, 0.6});
  std::vector<Bytes> corpus(3, Bytes{1, 2, 3});
  const auto maps = coverage_heatmaps(model, corpus, labels);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(maps.predicted.at(r, c), 1);
  }
  EXPECT_EQ(maps.actual, labels);
  std::ostringstream csv;
  write_bitmap_csv(csv, maps.predicted);
  EXPECT_EQ(csv.str(), "test_case,0,1\n0,1,1\n1,1,1\n2,1,1\n");
}

TEST(Reachability, ZeroGradientModelReachesNothing) {
  const CoverageModel model = constant_model(4, {0.1, 0.2});
  std::vector<Bytes> corpus{{1, 2, 3, 4}, {9}};
  const auto gain = mutation_reachability(model, corpus, 500, PatternConfig{}, 1);
  EXPECT_EQ(gain.cols(), 2u);
  for (std::size_t r = 0; r < gain.rows(); ++r) {
    for (std::size_t c = 0; c < gain.cols(); ++c) EXPECT_EQ(gain.at(r, c), 0);
  }
}

TEST(Reachability, GainOnlyWherePredictionCrossesThreshold) {
  // Single hidden unit tracking byte 0; column 0 fires for large byte 0,
  // column 1 is always predicted covered.
  CoverageModel m(2, 1, {{3}, {8}});
  m.w1()(0, 0) = 1.0;
  m.w2()(0, 0) = 10.0;
  m.b2()[0] = -5.0;
  m.b2()[1] = 5.0;
  std::vector<Bytes> corpus{{10, 0}, {250, 0}};
  const auto gain = mutation_reachability(m, corpus, 500, PatternConfig{}, 2);
  EXPECT_EQ(gain.edge_index(), m.edge_index());
  EXPECT_EQ(gain.at(0, 0), 1);  // increments of byte 0 cross 0.5
  EXPECT_EQ(gain.at(1, 0), 0);  // already predicted covered
  EXPECT_EQ(gain.at(0, 1), 0);
  EXPECT_EQ(gain.at(1, 1), 0);
}

TEST(MetricsCsv, TableLayout) {
  EdgeMetrics m;
  m.covered_fraction = 0.25;
  m.macro_accuracy = 1;
  std::ostringstream out;
  write_metrics_csv(out, m);
  EXPECT_EQ(out.str(),
            "%covered_edges,accuracy,precision,recall,f1,pr_auc,pr_auc_excluded\n"
            "0.25,1,0,0,0,0,0\n");
}

}  // namespace
}  // namespace npsfuzz
