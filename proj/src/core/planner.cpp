#include "core/planner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <vector>

namespace minplan {

namespace {

struct Node {
  double j = 0.0;         // accumulated discounted cost of the path to this node
  double discount = 1.0;  // gamma^depth, carried so children accumulate bit-stably
  std::int64_t parent = -1;
  int depth = 0;
  int mode = 0;  // edge mode from the parent (0 for the root)
};

struct OpenEntry {
  double j;
  int depth;
  int mode;
  std::int64_t order;  // insertion counter
  std::int64_t node;
};

// Priority: smallest cost first; ties prefer the deeper leaf, then the smaller
// edge mode, then the earlier insertion. priority_queue keeps the *greatest*
// element on top, so this comparator orders by "worse than".
struct WorseThan {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.j != b.j) return a.j > b.j;
    if (a.depth != b.depth) return a.depth < b.depth;
    if (a.mode != b.mode) return a.mode > b.mode;
    return a.order > b.order;
  }
};

}  // namespace

PlanResult plan(const SwitchedSystem& sys, const State& x, double gamma, std::int64_t budget,
                const ExpansionCallback& trace) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    fail(errc::invalid_argument, "plan: gamma must lie in (0, 1]");
  }
  if (budget < 1) {
    fail(errc::invalid_argument, "plan: budget must be >= 1");
  }
  const int n = sys.state_dim;
  if (static_cast<int>(x.size()) != n) {
    fail(errc::invalid_argument, "plan: state has dimension " + std::to_string(x.size()) +
                                     ", system expects " + std::to_string(n));
  }
  for (double v : x) {
    if (!std::isfinite(v)) fail(errc::invalid_argument, "plan: initial state is not finite");
  }

  const int m = sys.num_modes;
  std::vector<Node> nodes;
  std::vector<double> states;  // flat arena, node i occupies [i*n, (i+1)*n)
  nodes.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(budget + 1) + 1);
  states.reserve(nodes.capacity() * static_cast<std::size_t>(n));

  nodes.push_back(Node{});
  states.insert(states.end(), x.begin(), x.end());

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, WorseThan> open;
  std::int64_t order = 0;
  open.push(OpenEntry{0.0, 0, 0, order++, 0});

  PlanStats stats;
  stats.nodes_created = 1;
  stats.open_list_peak = 1;

  int best_horizon = -1;
  std::int64_t best_leaf = -1;
  State xs(static_cast<std::size_t>(n));

  for (std::int64_t i = 0; i <= budget; ++i) {
    if (open.empty()) {
      fail(errc::internal, "plan: open list exhausted before the budget");
    }
    const OpenEntry top = open.top();
    open.pop();
    ++stats.nodes_expanded;
    if (trace) trace(i, top.depth, top.j);

    // The popped leaf is the cheapest in the whole open list, so once it is
    // deeper than every previously popped leaf its path is optimal for the
    // horizon depth-1; record it. The root (depth 0 vs initial -1) never does.
    if (top.depth - 1 > best_horizon) {
      assert(open.empty() || !(open.top().j < top.j));
      best_horizon = top.depth - 1;
      best_leaf = top.node;
    }

    const Node parent = nodes[static_cast<std::size_t>(top.node)];
    std::copy_n(states.begin() + top.node * n, n, xs.begin());
    for (int u = 1; u <= m; ++u) {
      double ell;
      State child_state;
      try {
        ell = stage_cost(sys, xs, u);
        child_state = step(sys, xs, u);
      } catch (const Error& e) {
        if (e.code() == errc::numeric_overflow) {
          fail(errc::numeric_overflow, "plan: " + std::string(e.what()) + " (expansion " +
                                           std::to_string(i) + ", depth " +
                                           std::to_string(top.depth) + ")");
        }
        throw;
      }
      Node child;
      child.j = parent.j + parent.discount * ell;
      child.discount = parent.discount * gamma;
      child.parent = top.node;
      child.depth = parent.depth + 1;
      child.mode = u;
      const std::int64_t idx = static_cast<std::int64_t>(nodes.size());
      nodes.push_back(child);
      states.insert(states.end(), child_state.begin(), child_state.end());
      open.push(OpenEntry{child.j, child.depth, u, order++, idx});
      ++stats.nodes_created;
      stats.max_depth_created = std::max(stats.max_depth_created, child.depth);
    }
    stats.open_list_peak =
        std::max(stats.open_list_peak, static_cast<std::int64_t>(open.size()));
  }

  if (best_leaf < 0) {
    fail(errc::internal, "plan: no horizon resolved (budget >= 1 should guarantee one)");
  }

  PlanResult out;
  out.horizon = best_horizon;
  out.value = nodes[static_cast<std::size_t>(best_leaf)].j;
  out.stats = stats;
  out.sequence.resize(static_cast<std::size_t>(best_horizon) + 1);
  for (std::int64_t at = best_leaf; at > 0; at = nodes[static_cast<std::size_t>(at)].parent) {
    out.sequence[static_cast<std::size_t>(nodes[static_cast<std::size_t>(at)].depth) - 1] =
        nodes[static_cast<std::size_t>(at)].mode;
  }
  return out;
}

int first_input(const PlanResult& result) {
  if (result.sequence.empty()) {
    fail(errc::invalid_argument, "first_input: plan result carries no sequence");
  }
  return result.sequence.front();
}

WideUint min_budget_for_depth(int depth, int num_modes) {
  if (depth < 0) fail(errc::invalid_argument, "min_budget_for_depth: depth must be >= 0");
  if (num_modes < 2) fail(errc::invalid_argument, "min_budget_for_depth: need >= 2 modes");
  return WideUint::geometric_sum(static_cast<std::uint64_t>(num_modes), depth + 1);
}

WideUint budget_for_stability(int depth, int num_modes) {
  if (depth < 0) fail(errc::invalid_argument, "budget_for_stability: depth must be >= 0");
  if (num_modes < 2) fail(errc::invalid_argument, "budget_for_stability: need >= 2 modes");
  return WideUint::geometric_sum(static_cast<std::uint64_t>(num_modes), depth + 2);
}

int certified_depth_for_budget(std::int64_t budget, int num_modes) {
  if (budget < 1) fail(errc::invalid_argument, "certified_depth_for_budget: budget must be >= 1");
  if (num_modes < 2) fail(errc::invalid_argument, "certified_depth_for_budget: need >= 2 modes");
  int depth = -1;
  while (true) {
    WideUint needed = budget_for_stability(depth + 1, num_modes);
    if (!needed.fits_int64() || needed.as_int64() > budget) break;
    ++depth;
  }
  return depth;
}

}  // namespace minplan
