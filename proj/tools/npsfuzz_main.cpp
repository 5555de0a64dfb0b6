// npsfuzz command line: run campaigns, replay corpora, evaluate model
// checkpoints and regenerate reports.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "npsfuzz/bench.hpp"
#include "npsfuzz/mleval.hpp"

namespace {

using namespace npsfuzz;
namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kConfigExit = 2;

fs::path output_root() {
  const char* root = std::getenv(kOutputRootEnv);
  return root && *root ? fs::path(root) : fs::path("npsfuzz_out");
}

json read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

struct RunArgs {
  std::string config;
  std::optional<std::string> target;
  std::vector<std::string> variants;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> overhead;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> hidden;
  std::optional<double> interval_scale;
  std::optional<std::string> out;
};

void print_summary(const CampaignReport& r) {
  std::printf("target %s, %zu trial(s) per variant, config %s\n", r.target.c_str(), r.trials,
              r.config_hash.c_str());
  std::printf("%-12s %10s %10s %10s %10s\n", "variant", "mean", "std", "crashes", "ml_seeds");
  for (const auto& v : r.variants) {
    std::printf("%-12s %10.3f %10.3f %10.3f %10.3f\n", std::string(to_string(v.mix)).c_str(), v.mean,
                v.stddev, v.mean_unique_crashes, v.ml_stats.ml_seeds);
  }
}

int cmd_run(const RunArgs& a) {
  CampaignConfig c = campaign_config_from_json(read_config(a.config));
  if (a.target) c.target = *a.target;
  if (!a.variants.empty()) {
    c.variants.clear();
    for (const auto& v : a.variants) c.variants.push_back(parse_mix(v));
  }
  if (a.trials) c.trials = *a.trials;
  if (a.seed) c.base_seed = *a.seed;
  if (a.budget) c.fuzz.budget = *a.budget;
  if (a.overhead) c.fuzz.overhead_per_exec = *a.overhead;
  if (a.jobs) c.jobs = *a.jobs;
  if (a.hidden) c.fuzz.train.hidden = *a.hidden;
  if (a.interval_scale) c.interval_scale = *a.interval_scale;
  if (a.out) c.output_dir = *a.out;
  if (c.output_dir.empty()) {
    c.output_dir = output_root() / (c.target + "-" + config_hash(c).substr(0, 8));
  } else if (c.output_dir.is_relative() && std::getenv(kOutputRootEnv) && a.out) {
    c.output_dir = output_root() / c.output_dir;
  }
  c.validate();

  const CampaignReport report = run_campaign(c);
  emit_reports(report, c.output_dir / "reports");
  print_summary(report);
  std::printf("artifacts in %s\n", c.output_dir.string().c_str());
  return 0;
}

int cmd_replay(const std::string& target_name, const std::string& corpus, bool as_json) {
  const auto target = find_target(target_name);
  const auto inputs = read_corpus_dir(corpus);
  const ReplayResult r = replay_coverage(inputs, *target);
  if (as_json) {
    std::cout << json{{"target", target_name},
                      {"metric_id", kReplayMetricId},
                      {"test_cases", inputs.size()},
                      {"edges", r.count()},
                      {"edge_ids", r.edges}}
                     .dump()
              << "\n";
  } else {
    std::printf("%zu test cases, %zu edges\n", inputs.size(), r.count());
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& corpus, const std::string& target_name,
             double threshold, const std::string& per_edge) {
  const auto target = find_target(target_name);
  std::ifstream in(checkpoint);
  if (!in) throw ConfigError("cannot open checkpoint " + checkpoint);
  const CoverageModel model = CoverageModel::load(in);
  const auto inputs = read_corpus_dir(corpus);
  if (inputs.empty()) throw ConfigError("corpus directory is empty: " + corpus);

  std::vector<EdgeSet> edges;
  std::vector<std::uint64_t> ids;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    edges.push_back(execute(*target, inputs[i]).edges_hit);
    ids.push_back(i);
  }
  const CoverageBitmap labels = project(edges, model.edge_index(), ids);
  const EdgeMetrics m = evaluate(model, inputs, labels, threshold);
  write_metrics_csv(std::cout, m);
  if (!per_edge.empty()) {
    std::ofstream out(per_edge);
    write_edge_metrics_csv(out, m, labels);
    if (!out) throw Error("cannot write " + per_edge);
  }
  return 0;
}

int cmd_report(const std::string& artifacts, const std::string& out) {
  const CampaignReport r = load_campaign(artifacts);
  const fs::path dir = out.empty() ? fs::path(artifacts) / "reports" : fs::path(out);
  emit_reports(r, dir);
  print_summary(r);
  std::printf("reports in %s\n", dir.string().c_str());
  return 0;
}

int cmd_targets() {
  for (const auto& t : registered_targets()) {
    std::printf("%-16s edges=%zu max_input_len=%zu\n", t.name.c_str(), t.num_edges, t.max_input_len);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural program smoothing fuzzer on synthetic targets"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a fuzzing campaign described by a JSON config");
  run_cmd->add_option("-c,--config", run.config, "Campaign config (JSON)")->required();
  run_cmd->add_option("--target", run.target, "Override the target");
  run_cmd->add_option("--variants", run.variants, "Override variants (havoc-only, nps, nps+havoc)");
  run_cmd->add_option("--trials", run.trials, "Trials per variant");
  run_cmd->add_option("--seed", run.seed, "Base rng seed");
  run_cmd->add_option("--budget", run.budget, "Virtual-time budget per trial");
  run_cmd->add_option("--overhead", run.overhead, "Extra virtual time per execution");
  run_cmd->add_option("--jobs", run.jobs, "Worker threads");
  run_cmd->add_option("--hidden", run.hidden, "Hidden layer width");
  run_cmd->add_option("--interval-scale", run.interval_scale, "Multiplier for the retrain interval");
  run_cmd->add_option("-o,--out", run.out, "Output directory");

  std::string replay_target, replay_corpus;
  bool replay_json = false;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a corpus directory and count edges");
  replay_cmd->add_option("--target", replay_target)->required();
  replay_cmd->add_option("--corpus", replay_corpus)->required();
  replay_cmd->add_flag("--json", replay_json, "Print JSON");

  std::string eval_ckpt, eval_corpus, eval_target, eval_per_edge;
  double eval_threshold = 0.5;
  auto* eval_cmd = app.add_subcommand("eval-model", "Evaluate a model checkpoint on a corpus");
  eval_cmd->add_option("--checkpoint", eval_ckpt)->required();
  eval_cmd->add_option("--corpus", eval_corpus)->required();
  eval_cmd->add_option("--target", eval_target)->required();
  eval_cmd->add_option("--threshold", eval_threshold, "Probability counted as a predicted hit");
  eval_cmd->add_option("--per-edge", eval_per_edge, "Also write per-edge metrics to this CSV");

  std::string report_dir, report_out;
  auto* report_cmd = app.add_subcommand("report", "Regenerate reports from campaign artifacts");
  report_cmd->add_option("--artifacts", report_dir)->required();
  report_cmd->add_option("--out", report_out, "Report directory (default <artifacts>/reports)");

  auto* targets_cmd = app.add_subcommand("targets", "List the available targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*replay_cmd) return cmd_replay(replay_target, replay_corpus, replay_json);
    if (*eval_cmd) return cmd_eval(eval_ckpt, eval_corpus, eval_target, eval_threshold, eval_per_edge);
    if (*report_cmd) return cmd_report(report_dir, report_out);
    if (*targets_cmd) return cmd_targets();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
