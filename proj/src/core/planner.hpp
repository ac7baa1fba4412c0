#pragma once

#include <cstdint>
#include <functional>

#include "core/system.hpp"
#include "core/wide_uint.hpp"

namespace minplan {

struct PlanStats {
  std::int64_t nodes_expanded = 0;   // always budget + 1
  std::int64_t nodes_created = 0;    // always num_modes * (budget + 1) + 1
  int max_depth_created = 0;         // deepest node in the final tree
  std::int64_t open_list_peak = 0;   // largest leaf-set size observed
};

struct PlanResult {
  int horizon = -1;        // d(x): certified horizon, depth of the returned leaf minus 1
  double value = 0.0;      // exact optimal discounted cost over horizon d(x)
  InputSequence sequence;  // an optimal mode sequence of length horizon + 1
  PlanStats stats;
};

// Per-expansion trace hook: (iteration index, depth of the popped leaf, its
// accumulated cost). Used for expansion traces and search diagnostics.
using ExpansionCallback = std::function<void(std::int64_t, int, double)>;

// Optimistic best-first search over mode sequences. Runs exactly budget + 1
// leaf expansions (the root counts as the first), always expanding a leaf of
// minimum accumulated cost, and returns the optimal sequence for the deepest
// horizon it fully resolved. Ties on the cost are broken deterministically:
// deeper leaf first, then smaller edge mode, then earlier insertion.
//
// For budget >= 1 the returned value is exactly the minimum of the
// finite-horizon cost over all num_modes^(horizon+1) sequences; the
// brute-force oracle reproduces it bit-for-bit.
PlanResult plan(const SwitchedSystem& sys, const State& x, double gamma, std::int64_t budget,
                const ExpansionCallback& trace = {});

// First mode of the optimal sequence: the input the receding-horizon loop applies.
int first_input(const PlanResult& result);

// Smallest budget that certifies horizon >= depth on every state:
// 1 + M + ... + M^depth. (With that budget, horizon also never exceeds budget-1.)
WideUint min_budget_for_depth(int depth, int num_modes);

// Smallest budget that certifies horizon > depth (strict): 1 + M + ... + M^(depth+1).
WideUint budget_for_stability(int depth, int num_modes);

// Largest depth certified by a given runnable budget: the inverse of
// budget_for_stability, floored at -1 when the budget certifies nothing.
int certified_depth_for_budget(std::int64_t budget, int num_modes);

}  // namespace minplan
