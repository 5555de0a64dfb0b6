#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "npsfuzz/coverage.hpp"
#include "npsfuzz/havoc.hpp"
#include "npsfuzz/mleval.hpp"
#include "npsfuzz/model.hpp"
#include "npsfuzz/mutate.hpp"
#include "npsfuzz/target.hpp"
#include "npsfuzz/train.hpp"

namespace npsfuzz {

enum class Source { kSeed, kHavoc, kMl };

std::string_view to_string(Source s);
Source parse_source(std::string_view s);

enum class MutatorMix { kHavocOnly, kNps, kNpsHavoc };

/// "havoc-only", "nps", "nps+havoc".
std::string_view to_string(MutatorMix m);
/// Throws ConfigError for unknown names.
MutatorMix parse_mix(std::string_view s);

struct CorpusEntry {
  std::uint64_t id = 0;
  Bytes input;
  EdgeSet edges;
  Source source = Source::kSeed;
  std::optional<std::uint64_t> parent;
  std::uint64_t found_at = 0;
  /// Edges that were new to the trial when this entry was inserted.
  std::size_t new_edges = 0;
};

struct FuzzConfig {
  std::uint64_t rng_seed = 0;
  /// Virtual-time budget.
  std::uint64_t budget = 10000;
  MutatorMix mix = MutatorMix::kHavocOnly;
  HavocConfig havoc;
  std::size_t havoc_per_round = 32;
  /// Havoc rounds between two ML rounds in nps+havoc mode.
  std::size_t havoc_rounds_per_ml_round = 4;
  /// Columns targeted per ML round.
  std::size_t edges_per_ml_round = 2;
  RetrainPolicy retrain;
  TrainConfig train;
  std::size_t gradient_cap = kDefaultGradientCap;
  PatternConfig patterns;
  std::uint64_t overhead_per_exec = 0;
  /// Virtual time charged per (re)training.
  std::uint64_t train_cost = 100;

  void validate() const;
};

nlohmann::json to_json(const FuzzConfig& config);
FuzzConfig fuzz_config_from_json(const nlohmann::json& j, FuzzConfig base = {});
/// Fingerprint of the canonical JSON form.
std::string config_hash(const FuzzConfig& config);

struct CrashRecord {
  CrashSignature signature;
  Bytes first_input;
  std::uint64_t first_seen = 0;
  std::uint64_t hits = 0;
};

struct ModelRecord {
  std::uint64_t trained_at = 0;
  /// The model was trained on corpus entries [0, corpus_size).
  std::size_t corpus_size = 0;
  std::size_t raw_edges = 0;
  std::size_t columns = 0;
  std::size_t input_len = 0;
  double imbalance = 0;
  std::size_t holdout_size = 0;
  double final_loss = 0;
  EdgeMetrics holdout;
};

struct MlBatch {
  std::uint64_t time = 0;
  std::uint64_t entry = 0;
  std::size_t model = 0;
  std::size_t column = 0;
  EdgeSet column_edges;
  std::size_t hot_bytes = 0;
  std::size_t generated = 0;
};

struct CoveragePoint {
  std::uint64_t time = 0;
  std::size_t edges = 0;
  bool operator==(const CoveragePoint&) const = default;
};

struct TrialReport {
  std::string target;
  MutatorMix mix = MutatorMix::kHavocOnly;
  std::uint64_t rng_seed = 0;
  std::uint64_t budget = 0;
  std::uint64_t overhead_per_exec = 0;
  std::string config_hash;
  std::string metric_id{kReplayMetricId};

  std::uint64_t end_time = 0;
  std::uint64_t executions = 0;
  std::vector<CoveragePoint> coverage_series;
  std::vector<CorpusEntry> corpus;
  std::vector<CrashRecord> crashes;
  std::uint64_t crash_executions = 0;
  std::size_t distinct_crash_inputs = 0;
  std::vector<ModelRecord> models;
  std::vector<MlBatch> ml_batches;

  std::vector<Bytes> corpus_inputs() const;
  std::size_t final_coverage() const {
    return coverage_series.empty() ? 0 : coverage_series.back().edges;
  }
};

nlohmann::json to_json(const TrialReport& report);
TrialReport trial_report_from_json(const nlohmann::json& j);

struct TrialOutcome {
  TrialReport report;
  /// Most recently trained model, if any.
  std::optional<CoverageModel> model;
};

/// Runs one deterministic fuzzing trial. Throws ConfigError without seeds.
TrialOutcome run_trial_full(const Target& target, std::span<const Bytes> seeds,
                            const FuzzConfig& config);
TrialReport run_trial(const Target& target, std::span<const Bytes> seeds,
                      const FuzzConfig& config);

/// True iff the execution hit an edge not yet in `global` (sorted).
bool is_interesting(const ExecResult& result, const EdgeSet& global);

/// Inserts the signature; true iff it was not seen before.
bool dedup_crash(const CrashSignature& signature, std::set<CrashSignature>& seen);

/// Replay coverage of the corpus entries from `source` (all entries when
/// nullopt).
std::size_t attribute_coverage(const TrialReport& report, const Target& target,
                               std::optional<Source> source);

struct MlSeedStats {
  double ml_seeds = 0;
  double ml_cov_plus = 0;
  double derived = 0;
};

/// Fractions in [0, 1]: ML entries over corpus size, ML entries that added
/// coverage over ML entries, and entries with an ML strict ancestor over
/// corpus size.
MlSeedStats ml_seed_stats(const TrialReport& report);

struct EdgeIntersection {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t either = 0;
  std::size_t a_only = 0;
  std::size_t b_only = 0;
  bool operator==(const EdgeIntersection&) const = default;
};

EdgeIntersection edge_intersection(const EdgeSet& a, const EdgeSet& b);
/// Replays both corpora on `target`. Throws ConfigError when the reports
/// are for different targets.
EdgeIntersection edge_intersection(const TrialReport& a, const TrialReport& b,
                                   const Target& target);

/// One file per entry, named "<id>_<source>_<parent id or 'none'>".
void write_corpus_dir(const TrialReport& report, const std::filesystem::path& dir);
/// Reads every regular file in the directory, sorted by file name.
std::vector<Bytes> read_corpus_dir(const std::filesystem::path& dir);

/// "time,edges" rows.
void write_coverage_csv(std::ostream& out, const TrialReport& report);

}  // namespace npsfuzz
