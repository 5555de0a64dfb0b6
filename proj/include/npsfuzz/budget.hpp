#pragma once

#include <cstdint>

namespace npsfuzz {

/// Virtual-time cost of one execution when every test case also pays a
/// fixed transmission overhead (e.g. file-based delivery instead of shared
/// memory).
constexpr std::uint64_t apply_overhead(std::uint64_t exec_cost, std::uint64_t overhead_per_exec) {
  return exec_cost + overhead_per_exec;
}

/// Virtual clock of one trial. Executions and training both advance it;
/// the trial stops once it reaches the budget.
class BudgetAccount {
 public:
  BudgetAccount(std::uint64_t budget, std::uint64_t overhead_per_exec)
      : budget_(budget), overhead_(overhead_per_exec) {}

  bool exhausted() const { return now_ >= budget_; }
  std::uint64_t now() const { return now_; }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t executions() const { return executions_; }

  void charge_execution(std::uint64_t exec_cost) {
    now_ += apply_overhead(exec_cost, overhead_);
    ++executions_;
  }
  void charge(std::uint64_t units) { now_ += units; }

 private:
  std::uint64_t budget_;
  std::uint64_t overhead_;
  std::uint64_t now_ = 0;
  std::uint64_t executions_ = 0;
};

}  // namespace npsfuzz
