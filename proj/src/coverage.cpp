#include "npsfuzz/coverage.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace npsfuzz {

CoverageBitmap::CoverageBitmap(std::size_t rows, std::vector<EdgeSet> edge_index,
                               std::vector<std::uint64_t> corpus_ids)
    : rows_(rows),
      edge_index_(std::move(edge_index)),
      corpus_ids_(std::move(corpus_ids)),
      cells_(rows_ * edge_index_.size(), 0) {
  if (corpus_ids_.size() != rows_) throw DimensionError("corpus ids do not match rows");
}

std::vector<std::uint8_t> CoverageBitmap::column(std::size_t c) const {
  std::vector<std::uint8_t> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

std::size_t CoverageBitmap::column_count(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_; ++r) n += at(r, c);
  return n;
}

EdgeSet CoverageBitmap::edges() const {
  EdgeSet out;
  for (const auto& group : edge_index_) out.insert(out.end(), group.begin(), group.end());
  std::sort(out.begin(), out.end());
  return out;
}

CoverageBitmap CoverageBitmap::select_rows(std::span<const std::size_t> indices) const {
  std::vector<std::uint64_t> ids;
  ids.reserve(indices.size());
  for (auto i : indices) ids.push_back(corpus_ids_.at(i));
  CoverageBitmap out(indices.size(), edge_index_, std::move(ids));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    std::copy_n(row(indices[r]).begin(), cols(), out.cells_.begin() + r * cols());
  }
  return out;
}

const EdgeSet& CoverageCache::edges_for(const Target& target, const TestCaseView& tc) {
  auto it = entries_.find(tc.id);
  if (it != entries_.end()) return it->second;
  ++executions_;
  return entries_.emplace(tc.id, execute(target, tc.input).edges_hit).first->second;
}

CoverageBitmap project(std::span<const EdgeSet> edges_per_row, std::vector<EdgeSet> edge_index,
                       std::vector<std::uint64_t> corpus_ids) {
  CoverageBitmap out(edges_per_row.size(), std::move(edge_index), std::move(corpus_ids));
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto& hit = edges_per_row[r];
    for (std::size_t c = 0; c < out.cols(); ++c) {
      const auto& group = out.edge_index()[c];
      const bool any = std::any_of(group.begin(), group.end(), [&](EdgeId e) {
        return std::binary_search(hit.begin(), hit.end(), e);
      });
      out.set(r, c, any);
    }
  }
  return out;
}

CoverageBitmap aggregate(std::span<const TestCaseView> corpus, const Target& target,
                         CoverageCache& cache) {
  if (corpus.empty()) throw InsufficientData("cannot aggregate an empty corpus");
  std::vector<EdgeSet> per_row;
  per_row.reserve(corpus.size());
  EdgeSet seen;
  std::vector<std::uint64_t> ids;
  for (const auto& tc : corpus) {
    per_row.push_back(cache.edges_for(target, tc));
    seen = edge_union(seen, per_row.back());
    ids.push_back(tc.id);
  }
  std::vector<EdgeSet> index;
  index.reserve(seen.size());
  for (auto e : seen) index.push_back({e});
  return project(per_row, std::move(index), std::move(ids));
}

CoverageBitmap aggregate(std::span<const TestCaseView> corpus, const Target& target) {
  CoverageCache cache;
  return aggregate(corpus, target, cache);
}

CoverageBitmap reduce(const CoverageBitmap& bitmap) {
  // Column pattern -> merged edge group. Groups are later ordered by their
  // smallest edge id, which is independent of the input column order.
  std::map<std::vector<std::uint8_t>, EdgeSet> groups;
  for (std::size_t c = 0; c < bitmap.cols(); ++c) {
    auto& group = groups[bitmap.column(c)];
    group = edge_union(group, bitmap.edge_index()[c]);
  }
  std::vector<std::pair<const std::vector<std::uint8_t>*, EdgeSet>> ordered;
  for (auto& [pattern, edges] : groups) ordered.emplace_back(&pattern, std::move(edges));
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.second.front() < b.second.front(); });

  std::vector<EdgeSet> index;
  for (const auto& [pattern, edges] : ordered) index.push_back(edges);
  CoverageBitmap out(bitmap.rows(), std::move(index), bitmap.corpus_ids());
  for (std::size_t c = 0; c < ordered.size(); ++c) {
    const auto& pattern = *ordered[c].first;
    for (std::size_t r = 0; r < bitmap.rows(); ++r) out.set(r, c, pattern[r]);
  }
  return out;
}

CoverageBitmap expand(const CoverageBitmap& bitmap) {
  std::vector<std::pair<EdgeId, std::size_t>> edge_to_col;
  for (std::size_t c = 0; c < bitmap.cols(); ++c) {
    for (auto e : bitmap.edge_index()[c]) edge_to_col.emplace_back(e, c);
  }
  std::sort(edge_to_col.begin(), edge_to_col.end());
  std::vector<EdgeSet> index;
  for (const auto& [e, c] : edge_to_col) index.push_back({e});
  CoverageBitmap out(bitmap.rows(), std::move(index), bitmap.corpus_ids());
  for (std::size_t i = 0; i < edge_to_col.size(); ++i) {
    for (std::size_t r = 0; r < bitmap.rows(); ++r) {
      out.set(r, i, bitmap.at(r, edge_to_col[i].second));
    }
  }
  return out;
}

ReplayResult replay_coverage(std::span<const Bytes> corpus, const Target& target) {
  ReplayResult out;
  for (const auto& input : corpus) out.edges = edge_union(out.edges, execute(target, input).edges_hit);
  return out;
}

double imbalance(const CoverageBitmap& bitmap) {
  const std::size_t cells = bitmap.rows() * bitmap.cols();
  if (cells == 0) throw InsufficientData("imbalance of an empty bitmap");
  std::size_t ones = 0;
  for (std::size_t r = 0; r < bitmap.rows(); ++r) {
    for (auto v : bitmap.row(r)) ones += v;
  }
  return static_cast<double>(ones) / static_cast<double>(cells);
}

void write_bitmap_csv(std::ostream& out, const CoverageBitmap& bitmap) {
  out << "test_case";
  for (const auto& group : bitmap.edge_index()) {
    out << ',';
    for (std::size_t i = 0; i < group.size(); ++i) out << (i ? ";" : "") << group[i];
  }
  out << '\n';
  for (std::size_t r = 0; r < bitmap.rows(); ++r) {
    out << bitmap.corpus_ids()[r];
    for (auto v : bitmap.row(r)) out << ',' << static_cast<int>(v);
    out << '\n';
  }
}

}  // namespace npsfuzz
