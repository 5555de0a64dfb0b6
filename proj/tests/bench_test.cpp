#include "npsfuzz/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace npsfuzz {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("npsfuzz_bench_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CampaignConfig small_campaign(std::size_t trials) {
  CampaignConfig c;
  c.target = "branch_ladder";
  c.trials = trials;
  c.base_seed = 100;
  c.fuzz.budget = 1500;
  c.fuzz.retrain = {8, 4, 200};
  c.fuzz.train.hidden = 8;
  c.fuzz.train.epochs = 3;
  c.fuzz.train.learning_rate = 1e-2;
  c.seeds.random_count = 10;
  c.seeds.random_min_len = 16;
  c.seeds.random_max_len = 16;
  c.seeds.random_seed = 5;
  return c;
}

TEST(Overhead, ZeroLeavesBudgetAccountingUnchanged) {
  EXPECT_EQ(apply_overhead(7, 0), 7u);
  EXPECT_EQ(apply_overhead(1, 9), 10u);
  BudgetAccount acct(100, 0);
  while (!acct.exhausted()) acct.charge_execution(1);
  EXPECT_EQ(acct.executions(), 100u);
}

TEST(Overhead, EqualToCostHalvesExecutions) {
  const auto target = make_branch_ladder();
  const std::vector<Bytes> seeds = target->default_seeds();
  FuzzConfig plain;
  plain.budget = 4000;
  plain.rng_seed = 3;
  FuzzConfig slowed = plain;
  slowed.overhead_per_exec = 1;
  const auto a = run_trial(*target, seeds, plain);
  const auto b = run_trial(*target, seeds, slowed);
  EXPECT_EQ(a.executions, 4000u);
  EXPECT_NEAR(static_cast<double>(b.executions), 2000.0, 1.0);
  EXPECT_LE(b.final_coverage(), a.final_coverage());
}

TEST(Campaign, RepeatedRunIsIdentical) {
  const auto a = run_campaign(small_campaign(2));
  const auto b = run_campaign(small_campaign(2));
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  ASSERT_EQ(a.variants.size(), 2u);
  EXPECT_EQ(a.variants[0].finals.size(), 2u);
}

TEST(Campaign, ParallelMatchesSerial) {
  CampaignConfig c = small_campaign(2);
  const auto serial = run_campaign(c);
  c.jobs = 3;
  EXPECT_EQ(to_json(run_campaign(c)).dump(), to_json(serial).dump());
}

TEST(Campaign, SingleTrialHasZeroStd) {
  const auto r = run_campaign(small_campaign(1));
  for (const auto& v : r.variants) {
    EXPECT_EQ(v.stddev, 0.0);
    for (std::size_t k = 0; k < v.band.time.size(); ++k) {
      EXPECT_EQ(v.band.low[k], v.band.mean[k]);
      EXPECT_EQ(v.band.high[k], v.band.mean[k]);
    }
  }
}

TEST(Campaign, TrialSeedsAreBasePlusIndex) {
  const CampaignConfig c = small_campaign(3);
  EXPECT_EQ(c.trial_config(MutatorMix::kNps, 2).rng_seed, 102u);
  EXPECT_EQ(c.trial_config(MutatorMix::kNps, 2).mix, MutatorMix::kNps);
}

TEST(Campaign, PersistedTrialsReproduceSummary) {
  CampaignConfig c = small_campaign(3);
  c.output_dir = scratch("persist");
  const auto report = run_campaign(c);
  EXPECT_TRUE(fs::exists(c.output_dir / "campaign.json"));
  EXPECT_TRUE(fs::exists(c.output_dir / "trials" / "havoc-only" / "trial_000.json"));
  EXPECT_TRUE(fs::is_directory(c.output_dir / "trials" / "nps+havoc" / "trial_002_corpus"));

  // Mean recomputed by hand from the stored trial reports.
  const auto target = make_branch_ladder();
  for (const auto& v : report.variants) {
    double sum = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      std::ifstream in(c.output_dir / "trials" / std::string(to_string(v.mix)) /
                       ("trial_00" + std::to_string(i) + ".json"));
      const auto trial = trial_report_from_json(nlohmann::json::parse(in));
      EXPECT_EQ(trial.rng_seed, 100 + i);
      sum += static_cast<double>(replay_coverage(trial.corpus_inputs(), *target).count());
    }
    EXPECT_NEAR(v.mean, sum / 3.0, 1e-12);
  }
  const auto loaded = load_campaign(c.output_dir);
  EXPECT_EQ(to_json(loaded).dump(), to_json(report).dump());
  fs::remove_all(c.output_dir);
}

TEST(Campaign, ConfigErrors) {
  CampaignConfig c = small_campaign(1);
  c.target = "no_such_target";
  EXPECT_THROW(run_campaign(c), ConfigError);
  EXPECT_THROW(campaign_config_from_json({{"target", "branch_ladder"}, {"variants", {"turbo"}}}),
               ConfigError);
  EXPECT_THROW(campaign_config_from_json({{"trials", 3}}), ConfigError);
  c = small_campaign(0);
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(CampaignJson, RoundTripAndOutputRoot) {
  CampaignConfig c = small_campaign(4);
  c.seeds.inputs = {{1, 2, 3}};
  c.output_dir = "/abs/out";
  const auto back = campaign_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));

  ::setenv(kOutputRootEnv, "/tmp/root", 1);
  const auto rel = campaign_config_from_json({{"target", "magic_chain"}, {"output_dir", "camp"}});
  EXPECT_EQ(rel.output_dir, fs::path("/tmp/root/camp"));
  ::unsetenv(kOutputRootEnv);
  const auto plain = campaign_config_from_json({{"target", "magic_chain"}, {"output_dir", "camp"}});
  EXPECT_EQ(plain.output_dir, fs::path("camp"));
}

TEST(ResolveSeeds, DefaultsExplicitAndRandom) {
  const auto target = make_magic_chain();
  EXPECT_EQ(resolve_seeds(SeedSpec{}, *target), target->default_seeds());
  SeedSpec s;
  s.inputs = {{9}};
  s.random_count = 3;
  s.random_min_len = 2;
  s.random_max_len = 4;
  const auto seeds = resolve_seeds(s, *target);
  ASSERT_EQ(seeds.size(), 4u);
  EXPECT_EQ(seeds[0], Bytes{9});
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_GE(seeds[i].size(), 2u);
    EXPECT_LE(seeds[i].size(), 4u);
  }
  EXPECT_EQ(resolve_seeds(s, *target), seeds);
}

TEST(EmitReports, FilesAndStability) {
  const auto report = run_campaign(small_campaign(2));
  const fs::path dir = scratch("emit");
  emit_reports(report, dir);
  for (const char* f : {"coverage_table.csv", "timeseries_havoc-only.csv",
                        "timeseries_nps_havoc.csv", "crashes.csv", "ml_stats.csv",
                        "edge_intersection.csv", "coverage.svg", "campaign_report.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  // branch_ladder never crashes.
  EXPECT_EQ(slurp(dir / "crashes.csv"), "variant,frames,trials,hits\n");

  std::istringstream ts(slurp(dir / "timeseries_havoc-only.csv"));
  std::string line;
  std::getline(ts, line);
  EXPECT_EQ(line, "time,mean,ci_low,ci_high");
  double prev_t = -1, prev_mean = -1;
  while (std::getline(ts, line)) {
    double t, mean, lo, hi;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &mean, &lo, &hi), 4);
    EXPECT_GE(t, prev_t);
    EXPECT_GE(mean, prev_mean);
    EXPECT_LE(lo, mean);
    EXPECT_GE(hi, mean);
    prev_t = t;
    prev_mean = mean;
  }

  const std::string first = slurp(dir / "coverage_table.csv") + slurp(dir / "coverage.svg");
  emit_reports(report, dir);
  EXPECT_EQ(slurp(dir / "coverage_table.csv") + slurp(dir / "coverage.svg"), first);
  fs::remove_all(dir);
}

TEST(EmitReports, UnwritableDirectory) {
  const fs::path file = scratch("not_a_dir");
  std::ofstream(file) << "x";
  EXPECT_THROW(emit_reports(CampaignReport{}, file / "sub"), Error);
  fs::remove_all(file);
}

}  // namespace
}  // namespace npsfuzz
