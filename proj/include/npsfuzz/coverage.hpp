#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "npsfuzz/common.hpp"
#include "npsfuzz/target.hpp"

namespace npsfuzz {

/// Identifier of the single coverage measurement used to compare fuzzer
/// configurations: union of edges over a re-execution of the final corpus.
inline constexpr std::string_view kReplayMetricId = "replay-union-v1";

/// Non-owning view of one corpus test case.
struct TestCaseView {
  std::uint64_t id = 0;
  ByteView input;
};

/// Dense test-case x edge-group binary matrix.
///
/// Column c stands for the edge ids in edge_index()[c]. Bitmaps built by
/// aggregate() only ever contain edges that some test case covered, so a
/// never-covered edge has no column to refer to.
class CoverageBitmap {
 public:
  CoverageBitmap() = default;
  CoverageBitmap(std::size_t rows, std::vector<EdgeSet> edge_index,
                 std::vector<std::uint64_t> corpus_ids);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return edge_index_.size(); }

  std::uint8_t at(std::size_t r, std::size_t c) const { return cells_[r * cols() + c]; }
  void set(std::size_t r, std::size_t c, bool v) { cells_[r * cols() + c] = v ? 1 : 0; }

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {cells_.data() + r * cols(), cols()};
  }
  std::vector<std::uint8_t> column(std::size_t c) const;
  std::size_t column_count(std::size_t c) const;

  const std::vector<EdgeSet>& edge_index() const { return edge_index_; }
  const std::vector<std::uint64_t>& corpus_ids() const { return corpus_ids_; }

  /// Union of all edge ids named by the columns.
  EdgeSet edges() const;

  /// Rows picked by index, in the given order.
  CoverageBitmap select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const CoverageBitmap&) const = default;

 private:
  std::size_t rows_ = 0;
  std::vector<EdgeSet> edge_index_;
  std::vector<std::uint64_t> corpus_ids_;
  std::vector<std::uint8_t> cells_;
};

/// Per-trial memo of test-case id -> edges hit, so that retraining only
/// executes test cases added since the previous bitmap was built.
class CoverageCache {
 public:
  const EdgeSet& edges_for(const Target& target, const TestCaseView& tc);

  bool contains(std::uint64_t id) const { return entries_.contains(id); }
  void insert(std::uint64_t id, EdgeSet edges) { entries_.emplace(id, std::move(edges)); }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t executions() const { return executions_; }

 private:
  std::unordered_map<std::uint64_t, EdgeSet> entries_;
  std::uint64_t executions_ = 0;
};

/// One row per test case, one column per edge seen anywhere in the corpus,
/// columns ascending by edge id. Throws InsufficientData on an empty corpus.
CoverageBitmap aggregate(std::span<const TestCaseView> corpus, const Target& target,
                         CoverageCache& cache);
CoverageBitmap aggregate(std::span<const TestCaseView> corpus, const Target& target);

/// Builds a bitmap over a fixed column layout from precomputed edge sets.
/// A cell is 1 iff the test case hit any edge of the column's group.
CoverageBitmap project(std::span<const EdgeSet> edges_per_row,
                       std::vector<EdgeSet> edge_index,
                       std::vector<std::uint64_t> corpus_ids);

/// Merges columns whose 0/1 pattern is identical across all rows. Output
/// columns are ordered by their smallest edge id.
CoverageBitmap reduce(const CoverageBitmap& bitmap);

/// Inverse of reduce(): one column per edge id, ascending.
CoverageBitmap expand(const CoverageBitmap& bitmap);

struct ReplayResult {
  EdgeSet edges;
  std::size_t count() const { return edges.size(); }
};

ReplayResult replay_coverage(std::span<const Bytes> corpus, const Target& target);

/// Fraction of covered cells. Pass the unreduced bitmap.
double imbalance(const CoverageBitmap& bitmap);

/// Header "test_case,<group>,..." where a group is edge ids joined by ';'.
void write_bitmap_csv(std::ostream& out, const CoverageBitmap& bitmap);

}  // namespace npsfuzz
