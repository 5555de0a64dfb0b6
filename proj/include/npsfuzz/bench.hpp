#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "npsfuzz/budget.hpp"
#include "npsfuzz/engine.hpp"

namespace npsfuzz {

/// Environment variable naming the root for relative campaign output dirs.
inline constexpr const char* kOutputRootEnv = "NPSFUZZ_OUTPUT_ROOT";

struct SeedSpec {
  /// Explicit seeds (hex in JSON).
  std::vector<Bytes> inputs;
  /// Directory of seed files.
  std::optional<std::filesystem::path> dir;
  /// Extra random seeds appended after the others.
  std::size_t random_count = 0;
  std::size_t random_min_len = 1;
  std::size_t random_max_len = 16;
  std::uint64_t random_seed = 0;
};

struct CampaignConfig {
  std::string target;
  std::vector<MutatorMix> variants{MutatorMix::kHavocOnly, MutatorMix::kNpsHavoc};
  std::size_t trials = 30;
  std::uint64_t base_seed = 0;
  /// Per-trial template; rng_seed and mix are overwritten per trial.
  FuzzConfig fuzz;
  /// Multiplies fuzz.retrain.min_interval.
  double interval_scale = 1.0;
  SeedSpec seeds;
  /// Empty: nothing is persisted.
  std::filesystem::path output_dir;
  std::size_t jobs = 1;

  /// Throws ConfigError for unknown targets, no variants, zero trials.
  void validate() const;
  /// Fuzz config actually used by trial `index` of `mix`.
  FuzzConfig trial_config(MutatorMix mix, std::size_t index) const;
};

nlohmann::json to_json(const CampaignConfig& config);
/// Relative output dirs are resolved against $NPSFUZZ_OUTPUT_ROOT when set.
CampaignConfig campaign_config_from_json(const nlohmann::json& j);
std::string config_hash(const CampaignConfig& config);

/// Seeds for the campaign: explicit, then directory, then random; the
/// target's default seeds when none of those is given.
std::vector<Bytes> resolve_seeds(const SeedSpec& spec, const Target& target);

struct CoverageBand {
  std::vector<std::uint64_t> time;
  std::vector<double> mean;
  std::vector<double> low;
  std::vector<double> high;
};

struct VariantSummary {
  MutatorMix mix = MutatorMix::kHavocOnly;
  /// Replay coverage of each trial's final corpus, by trial index.
  std::vector<std::size_t> finals;
  double mean = 0;
  /// Sample standard deviation (0 for a single trial).
  double stddev = 0;
  /// mean +/- 1.96 * std / sqrt(n) over a fixed time grid.
  CoverageBand band;
  double mean_unique_crashes = 0;
  MlSeedStats ml_stats;
  double mean_ml_coverage = 0;
};

struct CrashRow {
  MutatorMix mix = MutatorMix::kHavocOnly;
  CrashSignature signature;
  std::size_t trials = 0;
  std::uint64_t hits = 0;
};

/// Mean over paired trials of edge_intersection(a, b).
struct IntersectionRow {
  MutatorMix a = MutatorMix::kHavocOnly;
  MutatorMix b = MutatorMix::kHavocOnly;
  double a_edges = 0, b_edges = 0, either = 0, a_only = 0, b_only = 0;
};

struct CampaignReport {
  std::string target;
  std::uint64_t base_seed = 0;
  std::size_t trials = 0;
  std::string config_hash;
  std::string metric_id{kReplayMetricId};
  std::vector<VariantSummary> variants;
  std::vector<CrashRow> crashes;
  std::vector<IntersectionRow> intersections;
};

nlohmann::json to_json(const CampaignReport& report);

/// Aggregates stored trial reports. Coverage is recomputed by replaying
/// every corpus on `target`, identically for all variants.
CampaignReport summarize_campaign(const Target& target, std::uint64_t base_seed,
                                  const std::string& config_hash,
                                  const std::map<MutatorMix, std::vector<TrialReport>>& trials);

/// Runs every (variant, trial) pair, persists trial artifacts under
/// output_dir when set, and aggregates.
CampaignReport run_campaign(const CampaignConfig& config);

/// Rebuilds the report from a campaign output directory.
CampaignReport load_campaign(const std::filesystem::path& dir);

/// Writes coverage_table.csv, timeseries_<variant>.csv, crashes.csv,
/// ml_stats.csv, edge_intersection.csv, coverage.svg and
/// campaign_report.json. Throws Error if the directory is not writable.
void emit_reports(const CampaignReport& report, const std::filesystem::path& dir);

}  // namespace npsfuzz
