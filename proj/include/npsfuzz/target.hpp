#pragma once

#include <compare>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "npsfuzz/common.hpp"

namespace npsfuzz {

/// Ordered abort-site ids reported by a crashing run. Two crashes are the
/// same bug iff their frame lists are equal.
struct CrashSignature {
  std::vector<std::uint32_t> frames;

  auto operator<=>(const CrashSignature&) const = default;
};

struct ExecResult {
  EdgeSet edges_hit;
  std::optional<CrashSignature> crash;
  std::uint64_t exec_cost = 1;
};

struct TargetSpec {
  std::string name;
  std::size_t num_edges = 1;
  std::size_t max_input_len = 1;
};

/// An in-process instrumented program. Implementations must be pure
/// functions of the input and must always report edge 0 (program entry).
///
/// To plug in a custom program, derive from Target (or wrap a callable in
/// FunctionTarget) and pass it to register_target(); it then becomes
/// selectable by name from campaign configs and the CLI.
class Target {
 public:
  virtual ~Target() = default;

  virtual const TargetSpec& spec() const = 0;

  /// Runs the program on an input of at most spec().max_input_len bytes.
  /// Callers should go through execute(), which truncates and validates.
  virtual ExecResult run(ByteView input) const = 0;

  /// Seeds used when a campaign does not name any.
  virtual std::vector<Bytes> default_seeds() const { return {Bytes{0}}; }
};

/// Truncates to max_input_len, runs, and checks the result invariants.
ExecResult execute(const Target& target, ByteView input);

class FunctionTarget final : public Target {
 public:
  using Fn = std::function<ExecResult(ByteView)>;

  FunctionTarget(TargetSpec spec, Fn fn, std::vector<Bytes> seeds = {Bytes{0}})
      : spec_(std::move(spec)), fn_(std::move(fn)), seeds_(std::move(seeds)) {}

  const TargetSpec& spec() const override { return spec_; }
  ExecResult run(ByteView input) const override { return fn_(input); }
  std::vector<Bytes> default_seeds() const override { return seeds_; }

 private:
  TargetSpec spec_;
  Fn fn_;
  std::vector<Bytes> seeds_;
};

/// magic_chain: nested guards "FUZZ" / 0x42 / (b5+b6)%256==0x99, crash [3]
/// when the last guard passes and byte 7 is 0xFF.
std::shared_ptr<const Target> make_magic_chain();
/// branch_ladder: edge i+1 iff byte i == (13*i) % 256, for i in [0,16).
std::shared_ptr<const Target> make_branch_ladder();
/// checksum_guard: edge 1 iff the byte sum is 0 mod 251.
std::shared_ptr<const Target> make_checksum_guard();

std::vector<TargetSpec> builtin_targets();

/// Registers a target under spec().name, replacing any previous entry.
void register_target(std::shared_ptr<const Target> target);
/// Throws ConfigError for unknown names.
std::shared_ptr<const Target> find_target(std::string_view name);
std::vector<TargetSpec> registered_targets();

}  // namespace npsfuzz
