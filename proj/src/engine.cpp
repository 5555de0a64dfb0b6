#include "npsfuzz/engine.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "npsfuzz/budget.hpp"

namespace npsfuzz {

using nlohmann::json;

std::string_view to_string(Source s) {
  switch (s) {
    case Source::kSeed: return "seed";
    case Source::kHavoc: return "havoc";
    case Source::kMl: return "ml";
  }
  return "?";
}

Source parse_source(std::string_view s) {
  if (s == "seed") return Source::kSeed;
  if (s == "havoc") return Source::kHavoc;
  if (s == "ml") return Source::kMl;
  throw ConfigError("unknown source: " + std::string(s));
}

std::string_view to_string(MutatorMix m) {
  switch (m) {
    case MutatorMix::kHavocOnly: return "havoc-only";
    case MutatorMix::kNps: return "nps";
    case MutatorMix::kNpsHavoc: return "nps+havoc";
  }
  return "?";
}

MutatorMix parse_mix(std::string_view s) {
  if (s == "havoc-only") return MutatorMix::kHavocOnly;
  if (s == "nps") return MutatorMix::kNps;
  if (s == "nps+havoc") return MutatorMix::kNpsHavoc;
  throw ConfigError("unknown fuzzer variant: " + std::string(s));
}

void FuzzConfig::validate() const {
  if (havoc_per_round == 0) throw ConfigError("havoc_per_round must be >= 1");
  if (edges_per_ml_round == 0) throw ConfigError("edges_per_ml_round must be >= 1");
  if (gradient_cap == 0) throw ConfigError("gradient_cap must be >= 1");
  if (havoc.min_chain < 1 || havoc.max_chain < havoc.min_chain) {
    throw ConfigError("bad havoc chain bounds");
  }
  if (retrain.min_corpus == 0 || retrain.min_new_testcases == 0 || retrain.min_interval == 0) {
    throw ConfigError("retrain thresholds must be positive");
  }
  train.validate();
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const FuzzConfig& c) {
  return {
      {"rng_seed", c.rng_seed},
      {"budget", c.budget},
      {"mix", to_string(c.mix)},
      {"havoc",
       {{"min_chain", c.havoc.min_chain},
        {"max_chain", c.havoc.max_chain},
        {"chunk_max", c.havoc.chunk_max},
        {"op_mask", c.havoc.op_mask}}},
      {"havoc_per_round", c.havoc_per_round},
      {"havoc_rounds_per_ml_round", c.havoc_rounds_per_ml_round},
      {"edges_per_ml_round", c.edges_per_ml_round},
      {"retrain",
       {{"min_corpus", c.retrain.min_corpus},
        {"min_new_testcases", c.retrain.min_new_testcases},
        {"min_interval", c.retrain.min_interval}}},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"holdout_fraction", c.train.holdout_fraction},
        {"restart_period", c.train.restart_period},
        {"batch_size", c.train.batch_size},
        {"hidden", c.train.hidden},
        {"seed", c.train.seed}}},
      {"gradient_cap", c.gradient_cap},
      {"patterns", {{"steps", c.patterns.steps}, {"chunk_max", c.patterns.chunk_max}}},
      {"overhead_per_exec", c.overhead_per_exec},
      {"train_cost", c.train_cost},
  };
}

FuzzConfig fuzz_config_from_json(const json& j, FuzzConfig c) {
  c.rng_seed = j.value("rng_seed", c.rng_seed);
  c.budget = j.value("budget", c.budget);
  if (j.contains("mix")) c.mix = parse_mix(j.at("mix").get<std::string>());
  if (j.contains("havoc")) {
    const auto& h = j.at("havoc");
    c.havoc.min_chain = h.value("min_chain", c.havoc.min_chain);
    c.havoc.max_chain = h.value("max_chain", c.havoc.max_chain);
    c.havoc.chunk_max = h.value("chunk_max", c.havoc.chunk_max);
    c.havoc.op_mask = h.value("op_mask", c.havoc.op_mask);
  }
  c.havoc_per_round = j.value("havoc_per_round", c.havoc_per_round);
  c.havoc_rounds_per_ml_round = j.value("havoc_rounds_per_ml_round", c.havoc_rounds_per_ml_round);
  c.edges_per_ml_round = j.value("edges_per_ml_round", c.edges_per_ml_round);
  if (j.contains("retrain")) {
    const auto& r = j.at("retrain");
    c.retrain.min_corpus = r.value("min_corpus", c.retrain.min_corpus);
    c.retrain.min_new_testcases = r.value("min_new_testcases", c.retrain.min_new_testcases);
    c.retrain.min_interval = r.value("min_interval", c.retrain.min_interval);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.epochs = t.value("epochs", c.train.epochs);
    c.train.holdout_fraction = t.value("holdout_fraction", c.train.holdout_fraction);
    c.train.restart_period = t.value("restart_period", c.train.restart_period);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.hidden = t.value("hidden", c.train.hidden);
    c.train.seed = t.value("seed", c.train.seed);
  }
  c.gradient_cap = j.value("gradient_cap", c.gradient_cap);
  if (j.contains("patterns")) {
    const auto& p = j.at("patterns");
    c.patterns.steps = p.value("steps", c.patterns.steps);
    c.patterns.chunk_max = p.value("chunk_max", c.patterns.chunk_max);
  }
  c.overhead_per_exec = j.value("overhead_per_exec", c.overhead_per_exec);
  c.train_cost = j.value("train_cost", c.train_cost);
  return c;
}

std::string config_hash(const FuzzConfig& config) {
  return hash_hex(fnv1a(to_json(config).dump()));
}

namespace {

json metrics_json(const EdgeMetrics& m) {
  return {{"covered_fraction", m.covered_fraction}, {"accuracy", m.macro_accuracy},
          {"precision", m.macro_precision},         {"recall", m.macro_recall},
          {"f1", m.macro_f1},                       {"pr_auc", m.macro_pr_auc},
          {"pr_auc_excluded", m.pr_auc_excluded}};
}

EdgeMetrics metrics_from_json(const json& j) {
  EdgeMetrics m;
  m.covered_fraction = j.at("covered_fraction").get<double>();
  m.macro_accuracy = j.at("accuracy").get<double>();
  m.macro_precision = j.at("precision").get<double>();
  m.macro_recall = j.at("recall").get<double>();
  m.macro_f1 = j.at("f1").get<double>();
  m.macro_pr_auc = j.at("pr_auc").get<double>();
  m.pr_auc_excluded = j.at("pr_auc_excluded").get<std::size_t>();
  return m;
}

}  // namespace

json to_json(const TrialReport& r) {
  json corpus = json::array();
  for (const auto& e : r.corpus) {
    corpus.push_back({{"id", e.id},
                      {"source", to_string(e.source)},
                      {"parent", e.parent ? json(*e.parent) : json(nullptr)},
                      {"found_at", e.found_at},
                      {"new_edges", e.new_edges},
                      {"edges", e.edges},
                      {"input", to_hex(e.input)}});
  }
  json crashes = json::array();
  for (const auto& c : r.crashes) {
    crashes.push_back({{"frames", c.signature.frames},
                       {"first_input", to_hex(c.first_input)},
                       {"first_seen", c.first_seen},
                       {"hits", c.hits}});
  }
  json series = json::array();
  for (const auto& p : r.coverage_series) series.push_back({p.time, p.edges});
  json models = json::array();
  for (const auto& m : r.models) {
    models.push_back({{"trained_at", m.trained_at},
                      {"corpus_size", m.corpus_size},
                      {"raw_edges", m.raw_edges},
                      {"columns", m.columns},
                      {"input_len", m.input_len},
                      {"imbalance", m.imbalance},
                      {"holdout_size", m.holdout_size},
                      {"final_loss", m.final_loss},
                      {"holdout", metrics_json(m.holdout)}});
  }
  json batches = json::array();
  for (const auto& b : r.ml_batches) {
    batches.push_back({{"time", b.time},
                       {"entry", b.entry},
                       {"model", b.model},
                       {"column", b.column},
                       {"column_edges", b.column_edges},
                       {"hot_bytes", b.hot_bytes},
                       {"generated", b.generated}});
  }
  return {{"target", r.target},
          {"mix", to_string(r.mix)},
          {"rng_seed", r.rng_seed},
          {"budget", r.budget},
          {"overhead_per_exec", r.overhead_per_exec},
          {"config_hash", r.config_hash},
          {"metric_id", r.metric_id},
          {"end_time", r.end_time},
          {"executions", r.executions},
          {"final_coverage", r.final_coverage()},
          {"coverage_series", series},
          {"corpus", corpus},
          {"crashes", crashes},
          {"crash_executions", r.crash_executions},
          {"distinct_crash_inputs", r.distinct_crash_inputs},
          {"models", models},
          {"ml_batches", batches}};
}

TrialReport trial_report_from_json(const json& j) {
  TrialReport r;
  r.target = j.at("target").get<std::string>();
  r.mix = parse_mix(j.at("mix").get<std::string>());
  r.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  r.budget = j.at("budget").get<std::uint64_t>();
  r.overhead_per_exec = j.at("overhead_per_exec").get<std::uint64_t>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.metric_id = j.at("metric_id").get<std::string>();
  r.end_time = j.at("end_time").get<std::uint64_t>();
  r.executions = j.at("executions").get<std::uint64_t>();
  for (const auto& p : j.at("coverage_series")) {
    r.coverage_series.push_back({p.at(0).get<std::uint64_t>(), p.at(1).get<std::size_t>()});
  }
  for (const auto& e : j.at("corpus")) {
    CorpusEntry entry;
    entry.id = e.at("id").get<std::uint64_t>();
    entry.source = parse_source(e.at("source").get<std::string>());
    if (!e.at("parent").is_null()) entry.parent = e.at("parent").get<std::uint64_t>();
    entry.found_at = e.at("found_at").get<std::uint64_t>();
    entry.new_edges = e.at("new_edges").get<std::size_t>();
    entry.edges = e.at("edges").get<EdgeSet>();
    entry.input = from_hex(e.at("input").get<std::string>());
    r.corpus.push_back(std::move(entry));
  }
  for (const auto& c : j.at("crashes")) {
    CrashRecord rec;
    rec.signature.frames = c.at("frames").get<std::vector<std::uint32_t>>();
    rec.first_input = from_hex(c.at("first_input").get<std::string>());
    rec.first_seen = c.at("first_seen").get<std::uint64_t>();
    rec.hits = c.at("hits").get<std::uint64_t>();
    r.crashes.push_back(std::move(rec));
  }
  r.crash_executions = j.at("crash_executions").get<std::uint64_t>();
  r.distinct_crash_inputs = j.at("distinct_crash_inputs").get<std::size_t>();
  for (const auto& m : j.at("models")) {
    ModelRecord rec;
    rec.trained_at = m.at("trained_at").get<std::uint64_t>();
    rec.corpus_size = m.at("corpus_size").get<std::size_t>();
    rec.raw_edges = m.at("raw_edges").get<std::size_t>();
    rec.columns = m.at("columns").get<std::size_t>();
    rec.input_len = m.at("input_len").get<std::size_t>();
    rec.imbalance = m.at("imbalance").get<double>();
    rec.holdout_size = m.at("holdout_size").get<std::size_t>();
    rec.final_loss = m.at("final_loss").get<double>();
    rec.holdout = metrics_from_json(m.at("holdout"));
    r.models.push_back(std::move(rec));
  }
  for (const auto& b : j.at("ml_batches")) {
    MlBatch batch;
    batch.time = b.at("time").get<std::uint64_t>();
    batch.entry = b.at("entry").get<std::uint64_t>();
    batch.model = b.at("model").get<std::size_t>();
    batch.column = b.at("column").get<std::size_t>();
    batch.column_edges = b.at("column_edges").get<EdgeSet>();
    batch.hot_bytes = b.at("hot_bytes").get<std::size_t>();
    batch.generated = b.at("generated").get<std::size_t>();
    r.ml_batches.push_back(std::move(batch));
  }
  return r;
}

std::vector<Bytes> TrialReport::corpus_inputs() const {
  std::vector<Bytes> out;
  out.reserve(corpus.size());
  for (const auto& e : corpus) out.push_back(e.input);
  return out;
}

// ---------------------------------------------------------------------------
// Small operations

bool is_interesting(const ExecResult& result, const EdgeSet& global) {
  return !std::includes(global.begin(), global.end(), result.edges_hit.begin(),
                        result.edges_hit.end());
}

bool dedup_crash(const CrashSignature& signature, std::set<CrashSignature>& seen) {
  return seen.insert(signature).second;
}

std::size_t attribute_coverage(const TrialReport& report, const Target& target,
                               std::optional<Source> source) {
  std::vector<Bytes> inputs;
  for (const auto& e : report.corpus) {
    if (!source || e.source == *source) inputs.push_back(e.input);
  }
  return replay_coverage(inputs, target).count();
}

MlSeedStats ml_seed_stats(const TrialReport& report) {
  const auto& corpus = report.corpus;
  if (corpus.empty()) return {};
  std::map<std::uint64_t, const CorpusEntry*> by_id;
  for (const auto& e : corpus) by_id[e.id] = &e;

  std::size_t ml = 0, ml_cov = 0, derived = 0;
  for (const auto& e : corpus) {
    if (e.source == Source::kMl) {
      ++ml;
      if (e.new_edges > 0) ++ml_cov;
    }
    // Walk the strict ancestors; parents always precede children, so the
    // walk terminates at a seed.
    for (auto parent = e.parent; parent;) {
      auto it = by_id.find(*parent);
      if (it == by_id.end()) break;
      if (it->second->source == Source::kMl) {
        ++derived;
        break;
      }
      parent = it->second->parent;
    }
  }
  const auto n = static_cast<double>(corpus.size());
  return {static_cast<double>(ml) / n,
          ml ? static_cast<double>(ml_cov) / static_cast<double>(ml) : 0.0,
          static_cast<double>(derived) / n};
}

EdgeIntersection edge_intersection(const EdgeSet& a, const EdgeSet& b) {
  return {a.size(), b.size(), edge_union(a, b).size(), edge_difference(a, b).size(),
          edge_difference(b, a).size()};
}

EdgeIntersection edge_intersection(const TrialReport& a, const TrialReport& b,
                                   const Target& target) {
  if (a.target != b.target || a.target != target.spec().name) {
    throw ConfigError("edge_intersection: reports come from different targets");
  }
  return edge_intersection(replay_coverage(a.corpus_inputs(), target).edges,
                           replay_coverage(b.corpus_inputs(), target).edges);
}

namespace {
std::string id_text(std::uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(id));
  return buf;
}
}  // namespace

void write_corpus_dir(const TrialReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& e : report.corpus) {
    const std::string name = id_text(e.id) + "_" + std::string(to_string(e.source)) + "_" +
                             (e.parent ? id_text(*e.parent) : std::string("none"));
    std::ofstream out(dir / name, std::ios::binary);
    out.write(reinterpret_cast<const char*>(e.input.data()),
              static_cast<std::streamsize>(e.input.size()));
    if (!out) throw Error("cannot write corpus file " + (dir / name).string());
  }
}

std::vector<Bytes> read_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Bytes> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    out.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

void write_coverage_csv(std::ostream& out, const TrialReport& report) {
  out << "time,edges\n";
  for (const auto& p : report.coverage_series) out << p.time << ',' << p.edges << '\n';
}

// ---------------------------------------------------------------------------
// The fuzzing loop

namespace {

class Trial {
 public:
  Trial(const Target& target, const FuzzConfig& config)
      : target_(target),
        config_(config),
        rng_(config.rng_seed),
        budget_(config.budget, config.overhead_per_exec) {
    const std::size_t max_len = target.spec().max_input_len;
    havoc_ = config.havoc;
    havoc_.max_input_len = std::min(havoc_.max_input_len, max_len);
    patterns_ = config.patterns;
    patterns_.max_input_len = std::min(patterns_.max_input_len, max_len);
  }

  TrialOutcome run(std::span<const Bytes> seeds) {
    for (const auto& seed : seeds) add_seed(seed);
    if (corpus_.empty()) throw ConfigError("no usable seeds");
    series_.push_back({0, global_.size()});

    const bool nps = config_.mix != MutatorMix::kHavocOnly;
    std::size_t havoc_since_ml = 0;
    while (!budget_.exhausted()) {
      if (nps) {
        maybe_retrain();
        if (budget_.exhausted()) break;
      }
      const bool ml_turn =
          model_ && (config_.mix == MutatorMix::kNps ||
                     havoc_since_ml >= config_.havoc_rounds_per_ml_round);
      if (ml_turn && ml_round() > 0) {
        havoc_since_ml = 0;
      } else {
        havoc_round();
        ++havoc_since_ml;
      }
    }
    if (series_.back().time != budget_.now()) series_.push_back({budget_.now(), global_.size()});
    return finish();
  }

 private:
  std::size_t next_entry() {
    if (!boost_.empty()) {
      const std::size_t idx = boost_.front();
      boost_.pop_front();
      return idx;
    }
    return cursor_++ % corpus_.size();
  }

  void add_seed(const Bytes& seed) {
    if (seed.empty()) throw ConfigError("seeds must be non-empty");
    ExecResult r = execute(target_, seed);
    if (r.crash) {
      record_crash(*r.crash, seed);
      return;
    }
    insert(seed, std::move(r), Source::kSeed, std::nullopt);
  }

  void insert(const Bytes& input, ExecResult r, Source source, std::optional<std::uint64_t> parent) {
    CorpusEntry e;
    e.id = corpus_.size();
    e.input = input;
    e.new_edges = edge_difference(r.edges_hit, global_).size();
    global_ = edge_union(global_, r.edges_hit);
    e.edges = std::move(r.edges_hit);
    e.source = source;
    e.parent = parent;
    e.found_at = budget_.now();
    corpus_.push_back(std::move(e));
  }

  void record_crash(const CrashSignature& sig, const Bytes& input) {
    ++crash_executions_;
    crash_inputs_.insert(input);
    if (dedup_crash(sig, seen_crashes_)) {
      crash_index_[sig] = crashes_.size();
      crashes_.push_back({sig, input, budget_.now(), 1});
    } else {
      ++crashes_[crash_index_.at(sig)].hits;
    }
  }

  /// Executes one candidate; returns false once the budget is exhausted.
  bool process(const Bytes& candidate, Source source, std::uint64_t parent) {
    if (budget_.exhausted()) return false;
    ExecResult r = execute(target_, candidate);
    budget_.charge_execution(r.exec_cost);
    if (r.crash) {
      record_crash(*r.crash, candidate);
    } else if (is_interesting(r, global_)) {
      insert(candidate, std::move(r), source, parent);
      boost_.push_back(corpus_.size() - 1);
      series_.push_back({budget_.now(), global_.size()});
    }
    return true;
  }

  void havoc_round() {
    const std::size_t idx = next_entry();
    const Bytes parent_input = corpus_[idx].input;
    const std::uint64_t parent_id = corpus_[idx].id;
    for (std::size_t i = 0; i < config_.havoc_per_round; ++i) {
      if (!process(havoc(parent_input, rng_, havoc_), Source::kHavoc, parent_id)) return;
    }
  }

  std::size_t ml_round() {
    const std::size_t idx = next_entry();
    const Bytes seed = corpus_[idx].input;
    const std::uint64_t seed_id = corpus_[idx].id;
    std::size_t executed = 0;
    for (std::size_t column : select_target_edges(bitmap_, config_.edges_per_ml_round, rng_)) {
      check_targetable(column);
      MutationPlan plan = plan_mutations(*model_, seed, column, config_.gradient_cap, rng_, patterns_);
      batches_.push_back({budget_.now(), seed_id, models_.size() - 1, column,
                          model_->edge_index()[column], plan.hot_bytes.size(),
                          plan.generated.size()});
      for (const auto& candidate : plan.generated) {
        if (!process(candidate, Source::kMl, seed_id)) return executed;
        ++executed;
      }
    }
    return executed;
  }

  // Gradient targets must be columns of the training bitmap, i.e. edges the
  // training corpus already covered.
  void check_targetable(std::size_t column) const {
    if (column >= model_->edges() || model_->edges() != bitmap_.cols()) {
      throw InvariantViolation("ML batch targets a column outside the training bitmap");
    }
    for (EdgeId e : model_->edge_index()[column]) {
      if (!std::binary_search(trained_edges_.begin(), trained_edges_.end(), e)) {
        throw InvariantViolation("ML batch targets an edge the training corpus never covered");
      }
    }
  }

  void maybe_retrain() {
    const RetrainState state{corpus_.size(), corpus_.size() - trained_corpus_size_,
                             budget_.now() - last_train_time_, model_.has_value()};
    if (!should_retrain(config_.retrain, state)) return;

    std::vector<TestCaseView> views;
    std::vector<Bytes> inputs;
    for (const auto& e : corpus_) {
      views.push_back({e.id, e.input});
      inputs.push_back(e.input);
    }
    const CoverageBitmap raw = aggregate(views, target_, cache_);
    CoverageBitmap reduced = reduce(raw);

    TrainConfig tc = config_.train;
    tc.seed = config_.train.seed ^ (config_.rng_seed * 0x9E3779B97F4A7C15ULL) ^ models_.size();
    const std::size_t input_len = model_input_len(inputs, target_.spec().max_input_len);
    TrainResult result;
    try {
      result = train(reduced, inputs, tc, input_len);
    } catch (const InsufficientData&) {
      return;
    }

    ModelRecord rec;
    rec.trained_at = budget_.now();
    rec.corpus_size = corpus_.size();
    rec.raw_edges = raw.cols();
    rec.columns = reduced.cols();
    rec.input_len = input_len;
    rec.imbalance = imbalance(raw);
    rec.holdout_size = result.split.holdout.size();
    rec.final_loss = result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back();
    rec.holdout = result.holdout_metrics;
    models_.push_back(rec);

    trained_edges_ = raw.edges();
    bitmap_ = std::move(reduced);
    model_ = std::move(result.model);
    trained_corpus_size_ = corpus_.size();
    last_train_time_ = budget_.now();
    budget_.charge(config_.train_cost);
  }

  TrialOutcome finish() {
    TrialReport r;
    r.target = target_.spec().name;
    r.mix = config_.mix;
    r.rng_seed = config_.rng_seed;
    r.budget = config_.budget;
    r.overhead_per_exec = config_.overhead_per_exec;
    r.config_hash = config_hash(config_);
    r.end_time = budget_.now();
    r.executions = budget_.executions();
    r.coverage_series = std::move(series_);
    r.corpus = std::move(corpus_);
    r.crashes = std::move(crashes_);
    r.crash_executions = crash_executions_;
    r.distinct_crash_inputs = crash_inputs_.size();
    r.models = std::move(models_);
    r.ml_batches = std::move(batches_);
    return {std::move(r), std::move(model_)};
  }

  const Target& target_;
  const FuzzConfig& config_;
  Rng rng_;
  BudgetAccount budget_;
  HavocConfig havoc_;
  PatternConfig patterns_;

  std::vector<CorpusEntry> corpus_;
  EdgeSet global_;
  std::vector<CoveragePoint> series_;
  std::size_t cursor_ = 0;
  std::deque<std::size_t> boost_;

  std::set<CrashSignature> seen_crashes_;
  std::map<CrashSignature, std::size_t> crash_index_;
  std::vector<CrashRecord> crashes_;
  std::set<Bytes> crash_inputs_;
  std::uint64_t crash_executions_ = 0;

  CoverageCache cache_;
  std::optional<CoverageModel> model_;
  CoverageBitmap bitmap_;
  EdgeSet trained_edges_;
  std::size_t trained_corpus_size_ = 0;
  std::uint64_t last_train_time_ = 0;
  std::vector<ModelRecord> models_;
  std::vector<MlBatch> batches_;
};

}  // namespace

TrialOutcome run_trial_full(const Target& target, std::span<const Bytes> seeds,
                            const FuzzConfig& config) {
  if (seeds.empty()) throw ConfigError("run_trial needs at least one seed");
  config.validate();
  return Trial(target, config).run(seeds);
}

TrialReport run_trial(const Target& target, std::span<const Bytes> seeds,
                      const FuzzConfig& config) {
  return run_trial_full(target, seeds, config).report;
}

}  // namespace npsfuzz
