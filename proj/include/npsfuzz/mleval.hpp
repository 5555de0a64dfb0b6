#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "npsfuzz/coverage.hpp"
#include "npsfuzz/model.hpp"
#include "npsfuzz/mutate.hpp"

namespace npsfuzz {

/// Per-edge binary classification metrics, macro-averaged over edges.
/// Precision, recall and F1 are 0 where their denominators are 0.
struct EdgeMetrics {
  std::vector<double> accuracy;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  /// Empty for edges without a positive label (excluded from the average).
  std::vector<std::optional<double>> pr_auc;

  double macro_accuracy = 0;
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  /// Mean over edges with >= 1 positive; 0 if there are none.
  double macro_pr_auc = 0;
  std::size_t pr_auc_excluded = 0;

  /// Share of positive cells in the labels ("%covered edges").
  double covered_fraction = 0;
};

/// Area under the precision-recall curve for one edge. The curve starts at
/// (recall 0, precision 1) and visits one point per distinct score,
/// thresholds descending, with score >= threshold counted as positive;
/// segments are integrated with the trapezoid rule. Returns nullopt when
/// there are no positive labels.
std::optional<double> pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct PrAucSummary {
  std::vector<std::optional<double>> per_edge;
  double macro = 0;
  std::size_t excluded = 0;
};

/// `scores` is test case x column; labels must have the same shape.
PrAucSummary pr_auc_macro(const Eigen::MatrixXd& scores, const CoverageBitmap& labels);

/// Metrics for probability scores thresholded at `threshold` (p >= t is a
/// predicted hit).
EdgeMetrics evaluate_scores(const Eigen::MatrixXd& scores, const CoverageBitmap& labels,
                            double threshold = 0.5);

/// Throws DimensionError when the model's column count differs from the
/// label bitmap's or the input count differs from its rows.
EdgeMetrics evaluate(const CoverageModel& model, std::span<const Bytes> inputs,
                     const CoverageBitmap& labels, double threshold = 0.5);

struct CoverageHeatmaps {
  CoverageBitmap predicted;
  CoverageBitmap actual;
};

CoverageHeatmaps coverage_heatmaps(const CoverageModel& model, std::span<const Bytes> corpus,
                                   const CoverageBitmap& bitmap, double threshold = 0.5);

/// Model-side estimate of what gradient mutations could reach: cell (i, c)
/// is 1 iff some mutation of test case i generated from the gradient of
/// column c pushes the predicted probability of c to >= threshold while
/// the unmutated prediction was below it. No program executions.
CoverageBitmap mutation_reachability(const CoverageModel& model, std::span<const Bytes> corpus,
                                     std::size_t k, const PatternConfig& patterns,
                                     std::uint64_t rng_seed, double threshold = 0.5);

/// CSV with header "%covered_edges,accuracy,precision,recall,f1,pr_auc,pr_auc_excluded".
void write_metrics_csv(std::ostream& out, const EdgeMetrics& metrics, bool header = true);
/// Per-edge rows: "column,edges,positives,accuracy,precision,recall,f1,pr_auc".
void write_edge_metrics_csv(std::ostream& out, const EdgeMetrics& metrics,
                            const CoverageBitmap& labels);

}  // namespace npsfuzz
