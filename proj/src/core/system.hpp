#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace minplan {

using State = std::vector<double>;
// Mode sequence, 1-based mode indices. A sequence of length d+1 defines a
// horizon-d cost (d+1 stage costs are paid, one per input).
using InputSequence = std::vector<int>;

// Discrete-time switched system: finitely many modes u in {1..num_modes}, a
// next-state map f_u, a stage cost ell_u >= 0, and a proper indicator sigma
// measuring distance to the target set (sigma = 0 exactly on the target).
struct SwitchedSystem {
  std::string name;
  int state_dim = 0;
  int num_modes = 0;
  std::function<State(const State&, int)> next;         // f_u(x)
  std::function<double(const State&, int)> stage_cost;  // ell_u(x)
  std::function<double(const State&)> sigma;            // sigma(x)
};

struct RolloutResult {
  std::vector<State> states;  // x0 .. phi(len(seq)); one more entry than inputs
  double cost = 0.0;          // sum_{k=0}^{len-1} gamma^k ell_{u_k}(phi(k))
};

// One transition under mode `mode`; validates the mode index, the state
// dimension, and that the produced state is finite.
State step(const SwitchedSystem& sys, const State& x, int mode);
// ell_mode(x), validated finite and nonnegative.
double stage_cost(const SwitchedSystem& sys, const State& x, int mode);
double sigma(const SwitchedSystem& sys, const State& x);

// Applies the whole sequence from x0 and accumulates the discounted cost. The
// accumulation is cost += w * ell; w *= gamma, which the planner and the
// brute-force oracle reproduce operation-for-operation so their values compare
// bit-for-bit with rollout's.
RolloutResult rollout(const SwitchedSystem& sys, const State& x0, const InputSequence& seq,
                      double gamma);

// Samples random (state, mode) pairs in [-box, box]^n and rejects systems whose
// stage cost or sigma comes back negative or non-finite. Called by every
// factory below; callers assembling a SwitchedSystem by hand should run it too.
void validate_system(const SwitchedSystem& sys, std::uint64_t seed = 0x5eedU, int samples = 128,
                     double box = 5.0);

// --- Builtin systems -------------------------------------------------------

// Two-state benchmark with three feedback modes:
//   K1(x) = -x1, K2(x) = x2^(1/3), K3(x) = (-1/2 + sqrt(7/12)) x2^(1/3),
//   x1+ = x1 + u, x2+ = x2 + u^3 with u = K_mode(x) (real cube root),
//   ell_u(x) = |x1|^3 + |x2| + |u|^3, sigma(x) = |x1|^3 + |x2|.
// Mode 1 sends the cubic manifold {x2 = x1^3} to the origin in one step, and
// cycling modes 1,2,3 contracts x2 - x1^3 by a factor |rho| ~= 0.328 per cycle,
// so the target is reached geometrically from everywhere.
SwitchedSystem make_cubic_integrator();

// Identity dynamics with ell == 0 and sigma == 0: every state is a zero-cost
// fixed point. Exercises tie-breaking (all search values tie at 0).
SwitchedSystem make_zero_cost_fixture(int state_dim = 2, int num_modes = 2);

struct RandomAffineParams {
  std::uint64_t seed = 0;
  int state_dim = 2;
  int num_modes = 2;
  // "weighted": ell_u(x) = w_u |x|^2 + z_u with mode-dependent gains and a
  //             positive floor; general-purpose search/oracle instances.
  // "sigma":    ell_u(x) = sigma(x) = |x| for every mode; together with a
  //             contractive first mode this satisfies the linear decay
  //             assumptions by construction (a_w = 1, a_w_bar = 0, W == 0).
  std::string cost_kind = "weighted";
  bool contractive = true;  // force |A_1 x| <= c |x| with c < 1
};

struct RandomAffineSystem {
  SwitchedSystem system;
  double contraction = 0.0;  // Frobenius bound c on mode 1 (0 when not contractive)
  // Valid value-upper gain when cost_kind == "sigma" and contractive: always
  // picking mode 1 costs at most sum_k c^k |x| = |x| / (1 - c).
  double a_v_bar = 0.0;
};

RandomAffineSystem make_random_affine(const RandomAffineParams& params);

}  // namespace minplan
