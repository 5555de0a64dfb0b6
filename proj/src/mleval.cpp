#include "npsfuzz/mleval.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace npsfuzz {

std::optional<double> pr_auc(std::span<const double> scores,
                             std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
  const auto positives =
      static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
  if (positives == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double area = 0;
  double prev_recall = 0;
  double prev_precision = 1;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    // Consume the whole tie group: all of it crosses the threshold together.
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (labels[order[i]] ? tp : fp) += 1;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * (precision + prev_precision) / 2;
    prev_recall = recall;
    prev_precision = precision;
  }
  return area;
}

PrAucSummary pr_auc_macro(const Eigen::MatrixXd& scores, const CoverageBitmap& labels) {
  if (static_cast<std::size_t>(scores.rows()) != labels.rows() ||
      static_cast<std::size_t>(scores.cols()) != labels.cols()) {
    throw DimensionError("score matrix does not match label bitmap");
  }
  PrAucSummary out;
  double sum = 0;
  std::size_t included = 0;
  for (std::size_t c = 0; c < labels.cols(); ++c) {
    const Eigen::VectorXd col = scores.col(static_cast<Eigen::Index>(c));
    const auto label = labels.column(c);
    auto v = pr_auc({col.data(), static_cast<std::size_t>(col.size())}, label);
    if (v) {
      sum += *v;
      ++included;
    } else {
      ++out.excluded;
    }
    out.per_edge.push_back(v);
  }
  out.macro = included ? sum / static_cast<double>(included) : 0.0;
  return out;
}

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}
double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
}  // namespace

EdgeMetrics evaluate_scores(const Eigen::MatrixXd& scores, const CoverageBitmap& labels,
                            double threshold) {
  if (!(threshold > 0 && threshold < 1)) throw ConfigError("threshold must be in (0, 1)");
  const PrAucSummary auc = pr_auc_macro(scores, labels);

  EdgeMetrics m;
  std::size_t positives_total = 0;
  for (std::size_t c = 0; c < labels.cols(); ++c) {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t r = 0; r < labels.rows(); ++r) {
      const bool predicted =
          scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) >= threshold;
      const bool actual = labels.at(r, c) != 0;
      if (predicted && actual) ++tp;
      else if (predicted) ++fp;
      else if (actual) ++fn;
      else ++tn;
    }
    positives_total += tp + fn;
    const double precision = ratio(tp, tp + fp);
    const double recall = ratio(tp, tp + fn);
    m.accuracy.push_back(ratio(tp + tn, labels.rows()));
    m.precision.push_back(precision);
    m.recall.push_back(recall);
    m.f1.push_back(precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0);
  }
  m.pr_auc = auc.per_edge;
  m.macro_accuracy = mean(m.accuracy);
  m.macro_precision = mean(m.precision);
  m.macro_recall = mean(m.recall);
  m.macro_f1 = mean(m.f1);
  m.macro_pr_auc = auc.macro;
  m.pr_auc_excluded = auc.excluded;
  m.covered_fraction = ratio(positives_total, labels.rows() * labels.cols());
  return m;
}

EdgeMetrics evaluate(const CoverageModel& model, std::span<const Bytes> inputs,
                     const CoverageBitmap& labels, double threshold) {
  if (model.edges() != labels.cols()) {
    throw DimensionError("model output count does not match bitmap columns");
  }
  if (inputs.size() != labels.rows()) throw DimensionError("inputs do not match bitmap rows");
  return evaluate_scores(model.predict_batch(encode_batch(inputs, model.input_len())), labels,
                         threshold);
}

CoverageHeatmaps coverage_heatmaps(const CoverageModel& model, std::span<const Bytes> corpus,
                                   const CoverageBitmap& bitmap, double threshold) {
  if (model.edges() != bitmap.cols()) {
    throw DimensionError("model output count does not match bitmap columns");
  }
  if (corpus.size() != bitmap.rows()) throw DimensionError("corpus does not match bitmap rows");
  const Eigen::MatrixXd p = model.predict_batch(encode_batch(corpus, model.input_len()));
  CoverageBitmap predicted(bitmap.rows(), bitmap.edge_index(), bitmap.corpus_ids());
  for (std::size_t r = 0; r < bitmap.rows(); ++r) {
    for (std::size_t c = 0; c < bitmap.cols(); ++c) {
      predicted.set(r, c, p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) >= threshold);
    }
  }
  return {std::move(predicted), bitmap};
}

CoverageBitmap mutation_reachability(const CoverageModel& model, std::span<const Bytes> corpus,
                                     std::size_t k, const PatternConfig& patterns,
                                     std::uint64_t rng_seed, double threshold) {
  std::vector<std::uint64_t> ids(corpus.size());
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  CoverageBitmap gain(corpus.size(), model.edge_index(), std::move(ids));
  Rng rng(rng_seed);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Eigen::VectorXd base = model.predict(corpus[i]);
    for (std::size_t c = 0; c < model.edges(); ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      if (base[col] >= threshold) continue;
      const MutationPlan plan = plan_mutations(model, corpus[i], c, k, rng, patterns);
      for (const auto& candidate : plan.generated) {
        if (model.predict(candidate)[col] >= threshold) {
          gain.set(i, c, true);
          break;
        }
      }
    }
  }
  return gain;
}

void write_metrics_csv(std::ostream& out, const EdgeMetrics& m, bool header) {
  if (header) out << "%covered_edges,accuracy,precision,recall,f1,pr_auc,pr_auc_excluded\n";
  out << m.covered_fraction << ',' << m.macro_accuracy << ',' << m.macro_precision << ','
      << m.macro_recall << ',' << m.macro_f1 << ',' << m.macro_pr_auc << ','
      << m.pr_auc_excluded << '\n';
}

void write_edge_metrics_csv(std::ostream& out, const EdgeMetrics& m, const CoverageBitmap& labels) {
  out << "column,edges,positives,accuracy,precision,recall,f1,pr_auc\n";
  for (std::size_t c = 0; c < m.accuracy.size(); ++c) {
    out << c << ',';
    const auto& group = labels.edge_index()[c];
    for (std::size_t i = 0; i < group.size(); ++i) out << (i ? ";" : "") << group[i];
    out << ',' << labels.column_count(c) << ',' << m.accuracy[c] << ',' << m.precision[c] << ','
        << m.recall[c] << ',' << m.f1[c] << ',';
    if (m.pr_auc[c]) out << *m.pr_auc[c];
    out << '\n';
  }
}

}  // namespace npsfuzz
