#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "core/oracle.hpp"
#include "core/planner.hpp"
#include "core/rng.hpp"
#include "core/system.hpp"

using namespace minplan;

namespace {

template <typename F>
int error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  } catch (...) {
    return -2;
  }
  return -1;
}

// Independent value recursion: V(x, 0) = min_u ell_u(x),
// V(x, h) = min_u [ ell_u(x) + gamma V(f_u(x), h-1) ]. Accumulates back to
// front, the opposite order from the enumerator, so agreement is evidence the
// value is right rather than the same code run twice.
double bellman_value(const SwitchedSystem& sys, const State& x, int horizon, double gamma) {
  double best = HUGE_VAL;
  for (int u = 1; u <= sys.num_modes; ++u) {
    double c = stage_cost(sys, x, u);
    if (horizon > 0) c += gamma * bellman_value(sys, step(sys, x, u), horizon - 1, gamma);
    best = std::min(best, c);
  }
  return best;
}

}  // namespace

TEST_CASE("exhaustive minimum matches a hand enumeration at horizon 1") {
  auto sys = make_cubic_integrator();
  const State x0{1.0, 2.0};
  const double gamma = 0.9;

  double best = HUGE_VAL;
  InputSequence best_seq;
  for (int u0 = 1; u0 <= 3; ++u0) {
    for (int u1 = 1; u1 <= 3; ++u1) {
      auto r = rollout(sys, x0, {u0, u1}, gamma);
      if (r.cost < best) {
        best = r.cost;
        best_seq = {u0, u1};
      }
    }
  }

  auto o = brute_force_value(sys, x0, 1, gamma);
  CHECK(o.num_sequences == 9);
  CHECK(o.value == best);
  REQUIRE(o.argmin_sequences.size() == 1);
  CHECK(o.argmin_sequences.front() == best_seq);
  CHECK(o.first_input_set == std::vector<int>{best_seq.front()});
}

TEST_CASE("enumerator agrees with the independent value recursion") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    RandomAffineParams p;
    p.seed = rng.next();
    p.state_dim = 2;
    p.num_modes = 1 + static_cast<int>(trial % 3 == 0 ? 2 : 1);  // 2 or 3 modes
    auto inst = make_random_affine(p);
    const State x0{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    for (double gamma : {0.8, 1.0}) {
      for (int h : {0, 1, 3}) {
        auto o = brute_force_value(inst.system, x0, h, gamma);
        const double v = bellman_value(inst.system, x0, h, gamma);
        CHECK(o.value == doctest::Approx(v).epsilon(1e-13));
        // Every reported minimizer replays to the minimum, bit for bit.
        for (const auto& seq : o.argmin_sequences) {
          CHECK(rollout(inst.system, x0, seq, gamma).cost == o.value);
        }
      }
    }
  }
}

TEST_CASE("planner value is reproduced bit for bit at the resolved horizon") {
  SplitMix64 rng(4242);
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    RandomAffineParams p;
    p.seed = rng.next();
    p.state_dim = 1 + trial % 3;
    p.num_modes = 2 + trial % 2;
    p.contractive = trial % 2 == 0;
    auto inst = make_random_affine(p);
    State x0(static_cast<std::size_t>(p.state_dim));
    for (auto& v : x0) v = rng.uniform(-2.0, 2.0);
    const double gamma = (trial % 3 == 0) ? 1.0 : 0.9;
    auto r = plan(inst.system, x0, gamma, min_budget_for_depth(2, p.num_modes).as_int64());
    // Keep the enumeration small; lopsided instances may certify deep.
    if (std::pow(p.num_modes, r.horizon + 1) > 200000.0) continue;
    auto o = brute_force_value(inst.system, x0, r.horizon, gamma);
    CHECK(o.value == r.value);
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("all-ties instance reports every sequence as a minimizer") {
  auto sys = make_zero_cost_fixture(2, 2);
  auto o = brute_force_value(sys, {1.0, 1.0}, 2, 1.0);
  CHECK(o.value == 0.0);
  CHECK(o.num_sequences == 8);
  REQUIRE(o.argmin_sequences.size() == 8);
  CHECK(o.argmin_sequences.front() == InputSequence{1, 1, 1});
  CHECK(o.argmin_sequences.back() == InputSequence{2, 2, 2});
  for (std::size_t i = 0; i + 1 < o.argmin_sequences.size(); ++i) {
    CHECK(o.argmin_sequences[i] < o.argmin_sequences[i + 1]);
  }
  CHECK(o.first_input_set == std::vector<int>{1, 2});
}

TEST_CASE("enumeration size is checked before any work") {
  auto sys = make_cubic_integrator();
  bool caught = false;
  try {
    brute_force_value(sys, {1.0, 2.0}, 10, 1.0, 100);
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == errc::resource_limit);
    const std::string what = e.what();
    CHECK(what.find("177147") != std::string::npos);  // 3^11
    CHECK(what.find("100") != std::string::npos);
  }
  CHECK(caught);

  CHECK(error_code_of([&] { brute_force_value(sys, {1.0, 2.0}, -1, 1.0); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { brute_force_value(sys, {1.0, 2.0}, 1, 0.0); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { brute_force_value(sys, {1.0}, 1, 1.0); }) ==
        static_cast<int>(errc::invalid_argument));
}

TEST_CASE("finite-horizon bracket contains deeper exact values") {
  RandomAffineParams p;
  p.seed = 7;
  p.state_dim = 2;
  p.num_modes = 2;
  p.cost_kind = "sigma";
  p.contractive = true;
  auto inst = make_random_affine(p);
  LinearBoundParams lb;
  lb.a_w = 1.0;
  lb.a_v_bar = inst.a_v_bar;
  lb.a_w_bar = 0.0;

  const State x0{1.5, -0.75};
  for (double gamma : {0.9, 1.0}) {
    for (int d : {2, 3, 4}) {
      auto b = bracket_infinite_value(inst.system, x0, gamma, d, lb);
      auto deeper = brute_force_value(inst.system, x0, d + 5, gamma);
      CHECK(b.lower <= deeper.value);
      CHECK(deeper.value <= b.upper + 1e-9 * std::max(1.0, std::abs(b.upper)));
    }
  }
}
