#pragma once

#include <atomic>
#include <cstdint>

namespace dsearch {

// Live call counters shared by concurrent workers during one run.
struct CallCounters {
  std::atomic<std::int64_t> denoiser_calls{0};   // tree children and single advances
  std::atomic<std::int64_t> lookahead_calls{0};  // reverse steps inside rollouts
  std::atomic<std::int64_t> x0_calls{0};
  std::atomic<std::int64_t> reward_calls{0};     // value estimation
  std::atomic<std::int64_t> final_reward_calls{0};
  std::atomic<std::int64_t> budget_underflows{0};
};

struct BudgetLedger {
  int child_budget = 0;  // C
  int steps = 0;         // T
  int search_steps = 0;  // |A|
  std::int64_t denoiser_calls = 0;
  std::int64_t lookahead_calls = 0;
  std::int64_t x0_calls = 0;
  std::int64_t reward_calls = 0;
  std::int64_t final_reward_calls = 0;
  std::int64_t budget_underflows = 0;
  // (|A| C + T - |A|) / T
  double c_bar_formula = 0.0;
  // denoiser_calls / T, the realized per-step cost.
  double c_bar_realized = 0.0;
  int outputs = 0;
  // denoiser_calls / (T * outputs); the quantity matched across methods.
  double c_bar_per_output = 0.0;

  static BudgetLedger snapshot(const CallCounters& counters) {
    BudgetLedger l;
    l.denoiser_calls = counters.denoiser_calls.load();
    l.lookahead_calls = counters.lookahead_calls.load();
    l.x0_calls = counters.x0_calls.load();
    l.reward_calls = counters.reward_calls.load();
    l.final_reward_calls = counters.final_reward_calls.load();
    l.budget_underflows = counters.budget_underflows.load();
    return l;
  }
};

}  // namespace dsearch
