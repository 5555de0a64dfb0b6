#include "npsfuzz/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace npsfuzz {

namespace fs = std::filesystem;
using nlohmann::json;

void CampaignConfig::validate() const {
  find_target(target);
  if (variants.empty()) throw ConfigError("campaign needs at least one variant");
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (jobs == 0) throw ConfigError("jobs must be >= 1");
  if (!(interval_scale > 0)) throw ConfigError("interval_scale must be > 0");
  if (seeds.random_count > 0 &&
      (seeds.random_min_len == 0 || seeds.random_max_len < seeds.random_min_len)) {
    throw ConfigError("bad random seed length bounds");
  }
  fuzz.validate();
}

FuzzConfig CampaignConfig::trial_config(MutatorMix mix, std::size_t index) const {
  FuzzConfig c = fuzz;
  c.mix = mix;
  c.rng_seed = base_seed + index;
  c.retrain.min_interval = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::llround(static_cast<double>(fuzz.retrain.min_interval) *
                                                  interval_scale)));
  return c;
}

json to_json(const CampaignConfig& c) {
  json variants = json::array();
  for (auto v : c.variants) variants.push_back(to_string(v));
  json seed_inputs = json::array();
  for (const auto& s : c.seeds.inputs) seed_inputs.push_back(to_hex(s));
  json seeds = {{"inputs", seed_inputs},
                {"random_count", c.seeds.random_count},
                {"random_min_len", c.seeds.random_min_len},
                {"random_max_len", c.seeds.random_max_len},
                {"random_seed", c.seeds.random_seed}};
  if (c.seeds.dir) seeds["dir"] = c.seeds.dir->string();
  return {{"target", c.target},
          {"variants", variants},
          {"trials", c.trials},
          {"base_seed", c.base_seed},
          {"fuzz", to_json(c.fuzz)},
          {"interval_scale", c.interval_scale},
          {"seeds", seeds},
          {"output_dir", c.output_dir.string()},
          {"jobs", c.jobs}};
}

CampaignConfig campaign_config_from_json(const json& j) {
  CampaignConfig c;
  try {
    c.target = j.at("target").get<std::string>();
    if (j.contains("variants")) {
      c.variants.clear();
      for (const auto& v : j.at("variants")) c.variants.push_back(parse_mix(v.get<std::string>()));
    }
    c.trials = j.value("trials", c.trials);
    c.base_seed = j.value("base_seed", c.base_seed);
    if (j.contains("fuzz")) c.fuzz = fuzz_config_from_json(j.at("fuzz"));
    // Common knobs may also sit at the top level.
    c.fuzz.budget = j.value("budget", c.fuzz.budget);
    c.fuzz.overhead_per_exec = j.value("overhead_per_exec", c.fuzz.overhead_per_exec);
    c.interval_scale = j.value("interval_scale", c.interval_scale);
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      for (const auto& hex : s.value("inputs", json::array())) {
        c.seeds.inputs.push_back(from_hex(hex.get<std::string>()));
      }
      if (s.contains("dir")) c.seeds.dir = s.at("dir").get<std::string>();
      c.seeds.random_count = s.value("random_count", c.seeds.random_count);
      c.seeds.random_min_len = s.value("random_min_len", c.seeds.random_min_len);
      c.seeds.random_max_len = s.value("random_max_len", c.seeds.random_max_len);
      c.seeds.random_seed = s.value("random_seed", c.seeds.random_seed);
    }
    c.output_dir = j.value("output_dir", std::string());
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad campaign config: ") + e.what());
  }
  if (!c.output_dir.empty() && c.output_dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) {
      c.output_dir = fs::path(root) / c.output_dir;
    }
  }
  return c;
}

std::string config_hash(const CampaignConfig& config) {
  json j = to_json(config);
  // Where artifacts go and how many workers run them does not change them.
  j.erase("output_dir");
  j.erase("jobs");
  return hash_hex(fnv1a(j.dump()));
}

std::vector<Bytes> resolve_seeds(const SeedSpec& spec, const Target& target) {
  std::vector<Bytes> seeds = spec.inputs;
  if (spec.dir) {
    auto from_dir = read_corpus_dir(*spec.dir);
    seeds.insert(seeds.end(), from_dir.begin(), from_dir.end());
  }
  if (spec.random_count > 0) {
    Rng rng(spec.random_seed);
    for (std::size_t i = 0; i < spec.random_count; ++i) {
      Bytes s(rng.between(spec.random_min_len, spec.random_max_len));
      for (auto& b : s) b = rng.byte();
      seeds.push_back(std::move(s));
    }
  }
  if (seeds.empty()) seeds = target.default_seeds();
  return seeds;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

std::size_t coverage_at(const TrialReport& r, std::uint64_t t) {
  std::size_t edges = 0;
  for (const auto& p : r.coverage_series) {
    if (p.time > t) break;
    edges = p.edges;
  }
  return edges;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

constexpr std::size_t kGridPoints = 100;

}  // namespace

CampaignReport summarize_campaign(const Target& target, std::uint64_t base_seed,
                                  const std::string& hash,
                                  const std::map<MutatorMix, std::vector<TrialReport>>& trials) {
  CampaignReport out;
  out.target = target.spec().name;
  out.base_seed = base_seed;
  out.config_hash = hash;

  std::map<MutatorMix, std::vector<EdgeSet>> replayed;
  for (const auto& [mix, reports] : trials) {
    out.trials = std::max(out.trials, reports.size());
    VariantSummary v;
    v.mix = mix;
    std::vector<double> finals, crashes, ml_cov, ml_seeds, ml_plus, derived;
    std::uint64_t horizon = 0;
    std::map<CrashSignature, CrashRow> crash_rows;
    for (const auto& r : reports) {
      if (r.target != out.target) throw ConfigError("trial report for a different target");
      EdgeSet edges = replay_coverage(r.corpus_inputs(), target).edges;
      v.finals.push_back(edges.size());
      finals.push_back(static_cast<double>(edges.size()));
      replayed[mix].push_back(std::move(edges));
      crashes.push_back(static_cast<double>(r.crashes.size()));
      ml_cov.push_back(static_cast<double>(attribute_coverage(r, target, Source::kMl)));
      const MlSeedStats s = ml_seed_stats(r);
      ml_seeds.push_back(s.ml_seeds);
      ml_plus.push_back(s.ml_cov_plus);
      derived.push_back(s.derived);
      horizon = std::max({horizon, r.budget, r.end_time});
      for (const auto& c : r.crashes) {
        auto& row = crash_rows[c.signature];
        row.mix = mix;
        row.signature = c.signature;
        ++row.trials;
        row.hits += c.hits;
      }
    }
    v.mean = mean_of(finals);
    v.stddev = sample_std(finals);
    v.mean_unique_crashes = mean_of(crashes);
    v.mean_ml_coverage = mean_of(ml_cov);
    v.ml_stats = {mean_of(ml_seeds), mean_of(ml_plus), mean_of(derived)};

    const double n = static_cast<double>(reports.size());
    for (std::size_t k = 0; k <= kGridPoints; ++k) {
      const std::uint64_t t = horizon * k / kGridPoints;
      std::vector<double> at;
      for (const auto& r : reports) at.push_back(static_cast<double>(coverage_at(r, t)));
      const double m = mean_of(at);
      const double half = n > 0 ? 1.96 * sample_std(at) / std::sqrt(n) : 0.0;
      v.band.time.push_back(t);
      v.band.mean.push_back(m);
      v.band.low.push_back(m - half);
      v.band.high.push_back(m + half);
    }
    out.variants.push_back(std::move(v));
    for (auto& [sig, row] : crash_rows) out.crashes.push_back(std::move(row));
  }

  // Pairwise comparison of every variant against every later one.
  for (auto a = replayed.begin(); a != replayed.end(); ++a) {
    for (auto b = std::next(a); b != replayed.end(); ++b) {
      IntersectionRow row{a->first, b->first};
      const std::size_t pairs = std::min(a->second.size(), b->second.size());
      for (std::size_t i = 0; i < pairs; ++i) {
        const auto x = edge_intersection(a->second[i], b->second[i]);
        row.a_edges += static_cast<double>(x.a);
        row.b_edges += static_cast<double>(x.b);
        row.either += static_cast<double>(x.either);
        row.a_only += static_cast<double>(x.a_only);
        row.b_only += static_cast<double>(x.b_only);
      }
      if (pairs > 0) {
        const double p = static_cast<double>(pairs);
        row.a_edges /= p;
        row.b_edges /= p;
        row.either /= p;
        row.a_only /= p;
        row.b_only /= p;
      }
      out.intersections.push_back(row);
    }
  }
  return out;
}

json to_json(const CampaignReport& r) {
  json variants = json::array();
  for (const auto& v : r.variants) {
    variants.push_back({{"variant", to_string(v.mix)},
                        {"finals", v.finals},
                        {"mean", v.mean},
                        {"std", v.stddev},
                        {"mean_unique_crashes", v.mean_unique_crashes},
                        {"ml_seeds", v.ml_stats.ml_seeds},
                        {"ml_cov_plus", v.ml_stats.ml_cov_plus},
                        {"ml_derived", v.ml_stats.derived},
                        {"mean_ml_coverage", v.mean_ml_coverage},
                        {"band",
                         {{"time", v.band.time},
                          {"mean", v.band.mean},
                          {"low", v.band.low},
                          {"high", v.band.high}}}});
  }
  json crashes = json::array();
  for (const auto& c : r.crashes) {
    crashes.push_back({{"variant", to_string(c.mix)},
                       {"frames", c.signature.frames},
                       {"trials", c.trials},
                       {"hits", c.hits}});
  }
  json inter = json::array();
  for (const auto& x : r.intersections) {
    inter.push_back({{"a", to_string(x.a)},
                     {"b", to_string(x.b)},
                     {"a_edges", x.a_edges},
                     {"b_edges", x.b_edges},
                     {"either", x.either},
                     {"a_only", x.a_only},
                     {"b_only", x.b_only}});
  }
  return {{"target", r.target},       {"base_seed", r.base_seed},
          {"trials", r.trials},       {"config_hash", r.config_hash},
          {"metric_id", r.metric_id}, {"variants", variants},
          {"crashes", crashes},       {"intersections", inter}};
}

// ---------------------------------------------------------------------------
// Running and persistence

namespace {

fs::path trial_path(const fs::path& root, MutatorMix mix, std::size_t index, const char* suffix) {
  char name[64];
  std::snprintf(name, sizeof name, "trial_%03zu%s", index, suffix);
  return root / "trials" / std::string(to_string(mix)) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

void persist_trial(const fs::path& root, std::size_t index, const TrialOutcome& outcome) {
  const auto mix = outcome.report.mix;
  fs::create_directories(trial_path(root, mix, index, "").parent_path());
  write_text(trial_path(root, mix, index, ".json"), to_json(outcome.report).dump(1) + "\n");
  write_corpus_dir(outcome.report, trial_path(root, mix, index, "_corpus"));
  if (outcome.model) {
    std::ofstream out(trial_path(root, mix, index, ".model"));
    outcome.model->save(out);
  }
}

}  // namespace

CampaignReport run_campaign(const CampaignConfig& config) {
  config.validate();
  const auto target = find_target(config.target);
  const std::vector<Bytes> seeds = resolve_seeds(config.seeds, *target);
  const std::string hash = config_hash(config);

  if (!config.output_dir.empty()) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw Error("cannot create output directory " + config.output_dir.string());
    json meta = to_json(config);
    meta["config_hash"] = hash;
    write_text(config.output_dir / "campaign.json", meta.dump(1) + "\n");
  }

  struct Task {
    MutatorMix mix;
    std::size_t index;
  };
  std::vector<Task> tasks;
  for (auto mix : config.variants) {
    for (std::size_t i = 0; i < config.trials; ++i) tasks.push_back({mix, i});
  }
  std::vector<std::optional<TrialReport>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        const auto& task = tasks[t];
        TrialOutcome outcome =
            run_trial_full(*target, seeds, config.trial_config(task.mix, task.index));
        if (!config.output_dir.empty()) persist_trial(config.output_dir, task.index, outcome);
        results[t] = std::move(outcome.report);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::min(config.jobs, tasks.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::map<MutatorMix, std::vector<TrialReport>> by_variant;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    by_variant[tasks[t].mix].push_back(std::move(*results[t]));
  }
  CampaignReport report = summarize_campaign(*target, config.base_seed, hash, by_variant);
  if (!config.output_dir.empty()) {
    write_text(config.output_dir / "campaign_report.json", to_json(report).dump(1) + "\n");
  }
  return report;
}

CampaignReport load_campaign(const fs::path& dir) {
  std::ifstream in(dir / "campaign.json");
  if (!in) throw ConfigError("no campaign.json in " + dir.string());
  const json meta = json::parse(in);
  const CampaignConfig config = campaign_config_from_json(meta);
  const auto target = find_target(config.target);

  std::map<MutatorMix, std::vector<TrialReport>> by_variant;
  for (auto mix : config.variants) {
    for (std::size_t i = 0; i < config.trials; ++i) {
      std::ifstream trial(trial_path(dir, mix, i, ".json"));
      if (!trial) throw Error("missing trial report " + trial_path(dir, mix, i, ".json").string());
      by_variant[mix].push_back(trial_report_from_json(json::parse(trial)));
    }
  }
  return summarize_campaign(*target, config.base_seed, meta.at("config_hash").get<std::string>(),
                            by_variant);
}

// ---------------------------------------------------------------------------
// Report emission

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string frames_text(const CrashSignature& s) {
  std::string out;
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    out += (i ? ";" : "") + std::to_string(s.frames[i]);
  }
  return out;
}

std::string file_slug(MutatorMix mix) {
  std::string s(to_string(mix));
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

std::string coverage_svg(const CampaignReport& r) {
  constexpr double kW = 640, kH = 400, kPad = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::uint64_t t_max = 1;
  double y_max = 1;
  for (const auto& v : r.variants) {
    if (!v.band.time.empty()) t_max = std::max(t_max, v.band.time.back());
    for (double h : v.band.high) y_max = std::max(y_max, h);
  }
  auto x = [&](std::uint64_t t) { return kPad + (kW - 2 * kPad) * static_cast<double>(t) / static_cast<double>(t_max); };
  auto y = [&](double e) { return kH - kPad - (kH - 2 * kPad) * std::max(e, 0.0) / y_max; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">virtual time (max " << t_max << ")</text>\n";
  svg << "<text x=\"12\" y=\"" << kH / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 "
      << kH / 2 << ")\" text-anchor=\"middle\">edges (max " << num(y_max) << ")</text>\n";
  for (std::size_t i = 0; i < r.variants.size(); ++i) {
    const auto& v = r.variants[i];
    const char* color = kColors[i % 4];
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t k = 0; k < v.band.time.size(); ++k) {
      svg << num(x(v.band.time[k])) << ',' << num(y(v.band.high[k])) << ' ';
    }
    for (std::size_t k = v.band.time.size(); k-- > 0;) {
      svg << num(x(v.band.time[k])) << ',' << num(y(v.band.low[k])) << ' ';
    }
    svg << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t k = 0; k < v.band.time.size(); ++k) {
      svg << num(x(v.band.time[k])) << ',' << num(y(v.band.mean[k])) << ' ';
    }
    svg << "\"/>\n<text x=\"" << kPad + 10 << "\" y=\"" << kPad + 15 * static_cast<double>(i + 1)
        << "\" fill=\"" << color << "\" font-size=\"12\">" << to_string(v.mix) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

void emit_reports(const CampaignReport& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create report directory " + dir.string());

  std::ostringstream table;
  table << "variant,trials,mean,std,min,max\n";
  for (const auto& v : r.variants) {
    const auto [lo, hi] = std::minmax_element(v.finals.begin(), v.finals.end());
    table << to_string(v.mix) << ',' << v.finals.size() << ',' << num(v.mean) << ','
          << num(v.stddev) << ',' << (v.finals.empty() ? 0 : *lo) << ','
          << (v.finals.empty() ? 0 : *hi) << '\n';
  }
  write_text(dir / "coverage_table.csv", table.str());

  for (const auto& v : r.variants) {
    std::ostringstream ts;
    ts << "time,mean,ci_low,ci_high\n";
    for (std::size_t k = 0; k < v.band.time.size(); ++k) {
      ts << v.band.time[k] << ',' << num(v.band.mean[k]) << ',' << num(v.band.low[k]) << ','
         << num(v.band.high[k]) << '\n';
    }
    write_text(dir / ("timeseries_" + file_slug(v.mix) + ".csv"), ts.str());
  }

  std::ostringstream crashes;
  crashes << "variant,frames,trials,hits\n";
  for (const auto& c : r.crashes) {
    crashes << to_string(c.mix) << ',' << frames_text(c.signature) << ',' << c.trials << ','
            << c.hits << '\n';
  }
  write_text(dir / "crashes.csv", crashes.str());

  std::ostringstream ml;
  ml << "variant,ml_seeds,ml_cov_plus,ml_derived,ml_only_coverage\n";
  for (const auto& v : r.variants) {
    ml << to_string(v.mix) << ',' << num(v.ml_stats.ml_seeds) << ',' << num(v.ml_stats.ml_cov_plus)
       << ',' << num(v.ml_stats.derived) << ',' << num(v.mean_ml_coverage) << '\n';
  }
  write_text(dir / "ml_stats.csv", ml.str());

  std::ostringstream inter;
  inter << "a,b,a_edges,b_edges,union,a_only,b_only\n";
  for (const auto& x : r.intersections) {
    inter << to_string(x.a) << ',' << to_string(x.b) << ',' << num(x.a_edges) << ','
          << num(x.b_edges) << ',' << num(x.either) << ',' << num(x.a_only) << ','
          << num(x.b_only) << '\n';
  }
  write_text(dir / "edge_intersection.csv", inter.str());

  write_text(dir / "coverage.svg", coverage_svg(r));
  write_text(dir / "campaign_report.json", to_json(r).dump(1) + "\n");
}

}  // namespace npsfuzz
