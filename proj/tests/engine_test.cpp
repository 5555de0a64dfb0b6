#include "npsfuzz/engine.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"

namespace npsfuzz {
namespace {

FuzzConfig small_nps_config(std::uint64_t seed, std::uint64_t budget) {
  FuzzConfig c;
  c.rng_seed = seed;
  c.budget = budget;
  c.mix = MutatorMix::kNpsHavoc;
  c.retrain = {8, 4, 200};
  c.train.hidden = 16;
  c.train.epochs = 5;
  c.train.batch_size = 8;
  c.train.learning_rate = 1e-2;
  c.train_cost = 20;
  return c;
}

std::vector<Bytes> ladder_seeds() {
  std::vector<Bytes> seeds;
  Rng rng(3);
  for (int i = 0; i < 12; ++i) {
    Bytes b(16);
    for (auto& v : b) v = rng.byte();
    seeds.push_back(b);
  }
  return seeds;
}

TEST(RunTrial, ZeroBudgetOnlyRunsSeeds) {
  const auto target = make_magic_chain();
  FuzzConfig c;
  c.budget = 0;
  const auto r = run_trial(*target, target->default_seeds(), c);
  EXPECT_EQ(r.executions, 0u);
  EXPECT_EQ(r.corpus.size(), 1u);
  ASSERT_EQ(r.coverage_series.size(), 1u);
  EXPECT_EQ(r.coverage_series[0].time, 0u);
  EXPECT_EQ(r.final_coverage(), r.corpus[0].edges.size());
}

TEST(RunTrial, RejectsMissingOrEmptySeeds) {
  const auto target = make_magic_chain();
  EXPECT_THROW(run_trial(*target, std::vector<Bytes>{}, FuzzConfig{}), ConfigError);
  EXPECT_THROW(run_trial(*target, std::vector<Bytes>{Bytes{}}, FuzzConfig{}), ConfigError);
}

TEST(RunTrial, SeriesIsMonotoneAndWithinBudget) {
  const auto target = make_branch_ladder();
  for (auto mix : {MutatorMix::kHavocOnly, MutatorMix::kNps, MutatorMix::kNpsHavoc}) {
    FuzzConfig c = small_nps_config(4, 3000);
    c.mix = mix;
    const auto r = run_trial(*target, ladder_seeds(), c);
    ASSERT_FALSE(r.coverage_series.empty());
    for (std::size_t i = 1; i < r.coverage_series.size(); ++i) {
      EXPECT_GE(r.coverage_series[i].time, r.coverage_series[i - 1].time);
      EXPECT_GE(r.coverage_series[i].edges, r.coverage_series[i - 1].edges);
    }
    EXPECT_EQ(r.coverage_series.back().time, r.end_time);
    EXPECT_GE(r.end_time, c.budget);
    if (mix == MutatorMix::kHavocOnly) {
      EXPECT_TRUE(r.models.empty());
      EXPECT_TRUE(r.ml_batches.empty());
    } else {
      EXPECT_FALSE(r.models.empty()) << to_string(mix);
    }
  }
}

TEST(RunTrial, DeterministicForSeed) {
  const auto target = make_branch_ladder();
  const FuzzConfig c = small_nps_config(11, 2500);
  const auto a = run_trial(*target, ladder_seeds(), c);
  const auto b = run_trial(*target, ladder_seeds(), c);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  FuzzConfig other = c;
  other.rng_seed = 12;
  EXPECT_NE(to_json(run_trial(*target, ladder_seeds(), other)).dump(), to_json(a).dump());
}

TEST(RunTrial, CorpusEdgesMatchExecution) {
  const auto target = make_branch_ladder();
  const auto r = run_trial(*target, ladder_seeds(), small_nps_config(5, 2000));
  EdgeSet global;
  for (const auto& e : r.corpus) {
    EXPECT_EQ(e.edges, execute(*target, e.input).edges_hit);
    EXPECT_GT(e.input.size(), 0u);
    EXPECT_LE(e.input.size(), target->spec().max_input_len);
    global = edge_union(global, e.edges);
  }
  EXPECT_EQ(r.final_coverage(), global.size());
}

TEST(RunTrial, ProvenanceIsClosed) {
  const auto target = make_branch_ladder();
  const auto r = run_trial(*target, ladder_seeds(), small_nps_config(6, 3000));
  for (std::size_t i = 0; i < r.corpus.size(); ++i) {
    const auto& e = r.corpus[i];
    EXPECT_EQ(e.id, i);
    if (e.source == Source::kSeed) {
      EXPECT_FALSE(e.parent);
    } else {
      ASSERT_TRUE(e.parent);
      EXPECT_LT(*e.parent, e.id);
    }
  }
}

TEST(RunTrial, MlBatchesTargetTrainedColumns) {
  const auto target = make_branch_ladder();
  const auto out = run_trial_full(*target, ladder_seeds(), small_nps_config(7, 4000));
  const auto& r = out.report;
  ASSERT_FALSE(r.ml_batches.empty());
  ASSERT_TRUE(out.model);
  for (const auto& b : r.ml_batches) {
    ASSERT_LT(b.model, r.models.size());
    const auto& m = r.models[b.model];
    EXPECT_LT(b.column, m.columns);
    EdgeSet trained;
    for (std::size_t i = 0; i < m.corpus_size; ++i) trained = edge_union(trained, r.corpus[i].edges);
    for (EdgeId e : b.column_edges) EXPECT_TRUE(std::binary_search(trained.begin(), trained.end(), e));
    EXPECT_LE(b.hot_bytes, kDefaultGradientCap);
  }
}

TEST(RunTrial, CrashesAreRecordedNotKept) {
  const auto target = make_magic_chain();
  // Seed that already reaches the crash guard except for the last byte.
  const std::vector<Bytes> seeds{{'F', 'U', 'Z', 'Z', 0x42, 0x99, 0, 0xFE}};
  FuzzConfig c;
  c.rng_seed = 1;
  c.budget = 20000;
  const auto r = run_trial(*target, seeds, c);
  ASSERT_EQ(r.crashes.size(), 1u);
  EXPECT_GE(r.crash_executions, r.crashes[0].hits);
  EXPECT_TRUE(execute(*target, r.crashes[0].first_input).crash);
  for (const auto& e : r.corpus) EXPECT_FALSE(execute(*target, e.input).crash);
}

TEST(IsInteresting, Examples) {
  EXPECT_TRUE(is_interesting({{0, 1, 2}, std::nullopt, 1}, {0, 1}));
  EXPECT_FALSE(is_interesting({{0, 1}, std::nullopt, 1}, {0, 1, 2}));
  EXPECT_FALSE(is_interesting({{0}, std::nullopt, 1}, {0}));
}

TEST(DedupCrash, MatchesSetSemantics) {
  std::set<CrashSignature> seen;
  EXPECT_TRUE(dedup_crash({{1, 2}}, seen));
  EXPECT_FALSE(dedup_crash({{1, 2}}, seen));
  EXPECT_TRUE(dedup_crash({{2, 1}}, seen));

  Rng rng(21);
  std::set<CrashSignature> mine;
  std::set<std::vector<std::uint32_t>> reference;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::uint32_t> frames(rng.between(1, 3));
    for (auto& f : frames) f = static_cast<std::uint32_t>(rng.below(4));
    EXPECT_EQ(dedup_crash({frames}, mine), reference.insert(frames).second);
  }
  EXPECT_EQ(mine.size(), reference.size());
}

TEST(AttributeCoverage, SourcesAndUnion) {
  const auto target = make_branch_ladder();
  FuzzConfig c = small_nps_config(8, 3000);
  c.mix = MutatorMix::kHavocOnly;
  const auto havoc_only = run_trial(*target, ladder_seeds(), c);
  EXPECT_EQ(attribute_coverage(havoc_only, *target, Source::kMl), 0u);
  EXPECT_EQ(attribute_coverage(havoc_only, *target, std::nullopt), havoc_only.final_coverage());

  const auto mixed = run_trial(*target, ladder_seeds(), small_nps_config(8, 4000));
  const auto all = attribute_coverage(mixed, *target, std::nullopt);
  for (auto s : {Source::kSeed, Source::kHavoc, Source::kMl}) {
    EXPECT_LE(attribute_coverage(mixed, *target, s), all);
  }
}

CorpusEntry entry(std::uint64_t id, Source s, std::optional<std::uint64_t> parent,
                  std::size_t new_edges) {
  CorpusEntry e;
  e.id = id;
  e.input = {static_cast<std::uint8_t>(id + 1)};
  e.source = s;
  e.parent = parent;
  e.new_edges = new_edges;
  return e;
}

TEST(MlSeedStats, HavocOnlyIsZero) {
  TrialReport r;
  r.corpus = {entry(0, Source::kSeed, std::nullopt, 1), entry(1, Source::kHavoc, 0, 1)};
  const auto s = ml_seed_stats(r);
  EXPECT_EQ(s.ml_seeds, 0.0);
  EXPECT_EQ(s.ml_cov_plus, 0.0);
  EXPECT_EQ(s.derived, 0.0);
  EXPECT_EQ(ml_seed_stats(TrialReport{}).ml_seeds, 0.0);
}

TEST(MlSeedStats, HandBuiltChain) {
  // seed -> ml -> havoc -> havoc
  TrialReport r;
  r.corpus = {entry(0, Source::kSeed, std::nullopt, 2), entry(1, Source::kMl, 0, 1),
              entry(2, Source::kHavoc, 1, 1), entry(3, Source::kHavoc, 2, 1)};
  const auto s = ml_seed_stats(r);
  EXPECT_DOUBLE_EQ(s.ml_seeds, 0.25);
  EXPECT_DOUBLE_EQ(s.ml_cov_plus, 1.0);
  EXPECT_DOUBLE_EQ(s.derived, 0.5);
}

TEST(MlSeedStats, DerivedMatchesBfs) {
  Rng rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    TrialReport r;
    const std::size_t n = rng.between(1, 40);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || rng.below(5) == 0) {
        r.corpus.push_back(entry(i, Source::kSeed, std::nullopt, 1));
      } else {
        const Source s = rng.below(3) == 0 ? Source::kMl : Source::kHavoc;
        r.corpus.push_back(entry(i, s, rng.below(i), rng.below(2)));
      }
    }
    const auto s = ml_seed_stats(r);
    EXPECT_NEAR(s.derived * static_cast<double>(n),
                static_cast<double>(oracle::derived_from_ml_bfs(r)), 1e-9);
    for (double v : {s.ml_seeds, s.ml_cov_plus, s.derived}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(EdgeIntersection, Example) {
  EXPECT_EQ(edge_intersection(EdgeSet{1, 2}, EdgeSet{2, 3}), (EdgeIntersection{2, 2, 3, 1, 1}));
  EXPECT_EQ(edge_intersection(EdgeSet{}, EdgeSet{4}), (EdgeIntersection{0, 1, 1, 0, 1}));
}

TEST(EdgeIntersection, ReportsMustShareTarget) {
  const auto ladder = make_branch_ladder();
  const auto chain = make_magic_chain();
  FuzzConfig c;
  c.budget = 200;
  const auto a = run_trial(*ladder, ladder_seeds(), c);
  const auto b = run_trial(*chain, chain->default_seeds(), c);
  EXPECT_THROW(edge_intersection(a, b, *ladder), ConfigError);
  const auto same = edge_intersection(a, a, *ladder);
  EXPECT_EQ(same.a_only, 0u);
  EXPECT_EQ(same.either, a.final_coverage());
}

TEST(TrialReportJson, RoundTrip) {
  const auto target = make_branch_ladder();
  const auto r = run_trial(*target, ladder_seeds(), small_nps_config(9, 3000));
  const auto back = trial_report_from_json(to_json(r));
  EXPECT_EQ(to_json(back).dump(), to_json(r).dump());
}

TEST(FuzzConfigJson, RoundTripAndErrors) {
  FuzzConfig c = small_nps_config(3, 777);
  c.patterns.steps = {1, 3};
  const FuzzConfig back = fuzz_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_THROW(fuzz_config_from_json({{"mix", "bogus"}}), ConfigError);
  FuzzConfig bad;
  bad.havoc_per_round = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(CorpusDir, WriteThenRead) {
  const auto target = make_branch_ladder();
  FuzzConfig c;
  c.budget = 1000;
  const auto r = run_trial(*target, ladder_seeds(), c);
  const auto dir = std::filesystem::temp_directory_path() / "npsfuzz_corpus_dir_test";
  std::filesystem::remove_all(dir);
  write_corpus_dir(r, dir);
  EXPECT_EQ(read_corpus_dir(dir), r.corpus_inputs());
  EXPECT_TRUE(std::filesystem::exists(dir / "000000_seed_none"));
  std::filesystem::remove_all(dir);
  EXPECT_THROW(read_corpus_dir(dir), ConfigError);
}

TEST(CoverageCsv, Layout) {
  TrialReport r;
  r.coverage_series = {{0, 1}, {5, 3}};
  std::ostringstream out;
  write_coverage_csv(out, r);
  EXPECT_EQ(out.str(), "time,edges\n0,1\n5,3\n");
}

}  // namespace
}  // namespace npsfuzz
