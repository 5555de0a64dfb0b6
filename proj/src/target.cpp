#include "npsfuzz/target.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace npsfuzz {

ExecResult execute(const Target& target, ByteView input) {
  const auto& spec = target.spec();
  if (input.size() > spec.max_input_len) input = input.first(spec.max_input_len);
  ExecResult result = target.run(input);

  auto& edges = result.edges_hit;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (edges.empty() || edges.front() != 0) {
    throw InvariantViolation(spec.name + ": entry edge 0 not reported");
  }
  if (edges.back() >= spec.num_edges) {
    throw InvariantViolation(spec.name + ": edge id out of range");
  }
  if (result.crash && result.crash->frames.empty()) {
    throw InvariantViolation(spec.name + ": empty crash signature");
  }
  if (result.exec_cost < 1) result.exec_cost = 1;
  return result;
}

namespace {

class MagicChain final : public Target {
 public:
  const TargetSpec& spec() const override { return spec_; }

  ExecResult run(ByteView in) const override {
    ExecResult r;
    r.edges_hit.push_back(0);
    if (in.size() < 4 || in[0] != 'F' || in[1] != 'U' || in[2] != 'Z' || in[3] != 'Z') {
      return r;
    }
    r.edges_hit.push_back(1);
    if (in.size() < 5 || in[4] != 0x42) return r;
    r.edges_hit.push_back(2);
    if (in.size() < 7 || static_cast<std::uint8_t>(in[5] + in[6]) != 0x99) return r;
    r.edges_hit.push_back(3);
    if (in.size() >= 8 && in[7] == 0xFF) r.crash = CrashSignature{{3}};
    return r;
  }

  std::vector<Bytes> default_seeds() const override {
    return {Bytes{'F', 'U', 'Z', 'Z', 0, 0, 0, 0}};
  }

 private:
  TargetSpec spec_{"magic_chain", 4, 64};
};

class BranchLadder final : public Target {
 public:
  static constexpr std::size_t kRungs = 16;

  const TargetSpec& spec() const override { return spec_; }

  ExecResult run(ByteView in) const override {
    ExecResult r;
    r.edges_hit.push_back(0);
    for (std::size_t i = 0; i < kRungs && i < in.size(); ++i) {
      if (in[i] == static_cast<std::uint8_t>(13 * i)) {
        r.edges_hit.push_back(static_cast<EdgeId>(i + 1));
      }
    }
    return r;
  }

  std::vector<Bytes> default_seeds() const override {
    Bytes seed(kRungs, 0xAA);
    for (std::size_t i = 0; i < 4; ++i) seed[i] = static_cast<std::uint8_t>(13 * i);
    return {seed};
  }

 private:
  TargetSpec spec_{"branch_ladder", kRungs + 1, 32};
};

class ChecksumGuard final : public Target {
 public:
  const TargetSpec& spec() const override { return spec_; }

  ExecResult run(ByteView in) const override {
    ExecResult r;
    r.edges_hit.push_back(0);
    const unsigned sum = std::accumulate(in.begin(), in.end(), 0u);
    if (sum % 251 == 0) r.edges_hit.push_back(1);
    return r;
  }

  std::vector<Bytes> default_seeds() const override { return {Bytes{1, 2, 3, 4}}; }

 private:
  TargetSpec spec_{"checksum_guard", 2, 32};
};

struct Registry {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<const Target>, std::less<>> targets;

  Registry() {
    for (auto t : {make_magic_chain(), make_branch_ladder(), make_checksum_guard()}) {
      targets.emplace(t->spec().name, t);
    }
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

std::shared_ptr<const Target> make_magic_chain() { return std::make_shared<MagicChain>(); }
std::shared_ptr<const Target> make_branch_ladder() { return std::make_shared<BranchLadder>(); }
std::shared_ptr<const Target> make_checksum_guard() {
  return std::make_shared<ChecksumGuard>();
}

std::vector<TargetSpec> builtin_targets() {
  return {make_magic_chain()->spec(), make_branch_ladder()->spec(),
          make_checksum_guard()->spec()};
}

void register_target(std::shared_ptr<const Target> target) {
  if (!target) throw ConfigError("null target");
  const auto& spec = target->spec();
  if (spec.name.empty() || spec.num_edges < 1 || spec.max_input_len < 1) {
    throw ConfigError("invalid target spec");
  }
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.targets[spec.name] = std::move(target);
}

std::shared_ptr<const Target> find_target(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.targets.find(name);
  if (it == r.targets.end()) throw ConfigError("unknown target: " + std::string(name));
  return it->second;
}

std::vector<TargetSpec> registered_targets() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<TargetSpec> out;
  for (const auto& [name, t] : r.targets) out.push_back(t->spec());
  return out;
}

}  // namespace npsfuzz
