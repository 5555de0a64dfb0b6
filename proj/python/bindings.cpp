#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "npsfuzz/bench.hpp"
#include "npsfuzz/engine.hpp"
#include "npsfuzz/mleval.hpp"

namespace py = pybind11;
using namespace npsfuzz;

namespace {

Bytes to_bytes(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

std::vector<Bytes> to_corpus(const std::vector<py::bytes>& inputs) {
  std::vector<Bytes> out;
  out.reserve(inputs.size());
  for (const auto& b : inputs) out.push_back(to_bytes(b));
  return out;
}

py::bytes from_bytes(const Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

py::dict bitmap_dict(const CoverageBitmap& b) {
  std::vector<std::vector<int>> cells(b.rows(), std::vector<int>(b.cols()));
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) cells[r][c] = b.at(r, c);
  }
  py::dict d;
  d["cells"] = cells;
  d["edge_index"] = b.edge_index();
  return d;
}

CoverageBitmap corpus_bitmap(const std::string& target, const std::vector<Bytes>& corpus) {
  std::vector<TestCaseView> views;
  for (std::size_t i = 0; i < corpus.size(); ++i) views.push_back({i, corpus[i]});
  return aggregate(views, *find_target(target));
}

}  // namespace

PYBIND11_MODULE(_npsfuzz, m) {
  m.doc() = "Neural program smoothing fuzzer core";

  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  m.def("targets", [] {
    std::vector<py::dict> out;
    for (const auto& t : registered_targets()) {
      py::dict d;
      d["name"] = t.name;
      d["num_edges"] = t.num_edges;
      d["max_input_len"] = t.max_input_len;
      out.push_back(d);
    }
    return out;
  });

  m.def("default_seeds", [](const std::string& target) {
    std::vector<py::bytes> out;
    for (const auto& s : find_target(target)->default_seeds()) out.push_back(from_bytes(s));
    return out;
  });

  m.def("execute", [](const std::string& target, const py::bytes& input) {
    const ExecResult r = execute(*find_target(target), to_bytes(input));
    py::dict d;
    d["edges"] = r.edges_hit;
    d["crash"] = r.crash ? py::cast(r.crash->frames) : py::none();
    d["exec_cost"] = r.exec_cost;
    return d;
  });

  m.def("replay_coverage", [](const std::string& target, const std::vector<py::bytes>& corpus) {
    return replay_coverage(to_corpus(corpus), *find_target(target)).edges;
  });

  m.def(
      "coverage_bitmap",
      [](const std::string& target, const std::vector<py::bytes>& corpus, bool reduced) {
        const CoverageBitmap raw = corpus_bitmap(target, to_corpus(corpus));
        return bitmap_dict(reduced ? reduce(raw) : raw);
      },
      py::arg("target"), py::arg("corpus"), py::arg("reduced") = true);

  m.def("imbalance", [](const std::string& target, const std::vector<py::bytes>& corpus) {
    return imbalance(corpus_bitmap(target, to_corpus(corpus)));
  });

  m.def("pr_auc", [](const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
    return pr_auc(scores, labels);
  });

  m.def("rank_bytes", [](const std::vector<double>& gradient, std::size_t k) {
    std::vector<std::pair<std::size_t, int>> out;
    for (const auto& h : rank_bytes(gradient, k)) out.emplace_back(h.offset, h.sign);
    return out;
  });

  m.def(
      "mutate",
      [](const py::bytes& seed, const std::vector<std::pair<std::size_t, int>>& hot,
         std::uint64_t rng_seed, std::size_t max_input_len) {
        std::vector<HotByte> hot_bytes;
        for (const auto& [offset, sign] : hot) hot_bytes.push_back({offset, sign < 0 ? -1 : 1});
        PatternConfig cfg;
        cfg.max_input_len = max_input_len;
        Rng rng(rng_seed);
        std::vector<py::bytes> out;
        for (const auto& b : mutate(to_bytes(seed), hot_bytes, rng, cfg)) out.push_back(from_bytes(b));
        return out;
      },
      py::arg("seed"), py::arg("hot_bytes"), py::arg("rng_seed") = 0,
      py::arg("max_input_len") = PatternConfig{}.max_input_len);

  m.def(
      "should_retrain",
      [](std::size_t corpus_size, std::size_t new_since_last, std::uint64_t elapsed,
         bool trained_before, std::size_t min_corpus, std::size_t min_new, std::uint64_t min_interval) {
        return should_retrain({min_corpus, min_new, min_interval},
                              {corpus_size, new_since_last, elapsed, trained_before});
      },
      py::arg("corpus_size"), py::arg("new_since_last"), py::arg("elapsed_since_last"),
      py::arg("trained_before"), py::arg("min_corpus") = RetrainPolicy{}.min_corpus,
      py::arg("min_new_testcases") = RetrainPolicy{}.min_new_testcases,
      py::arg("min_interval") = RetrainPolicy{}.min_interval);

  m.def("run_trial_json", [](const std::string& target, const std::vector<py::bytes>& seeds,
                             const std::string& config_json) {
    const FuzzConfig cfg = fuzz_config_from_json(nlohmann::json::parse(config_json));
    const auto t = find_target(target);
    const auto corpus = to_corpus(seeds);
    py::gil_scoped_release release;
    return to_json(run_trial(*t, corpus, cfg)).dump();
  });

  m.def("run_campaign_json", [](const std::string& config_json) {
    const CampaignConfig cfg = campaign_config_from_json(nlohmann::json::parse(config_json));
    py::gil_scoped_release release;
    return to_json(run_campaign(cfg)).dump();
  });

  m.attr("REPLAY_METRIC_ID") = std::string(kReplayMetricId);
}
