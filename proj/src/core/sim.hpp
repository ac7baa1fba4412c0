#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "core/bounds.hpp"
#include "core/planner.hpp"
#include "core/system.hpp"

namespace minplan {

// Closed-loop record: one plan per step, first input applied. states and
// sigmas have steps+1 entries (the final state is recorded); everything else
// has one entry per step.
struct Trajectory {
  double gamma = 1.0;
  std::int64_t budget = 0;
  std::vector<State> states;
  std::vector<double> sigmas;
  std::vector<int> modes;
  std::vector<double> stage_costs;
  std::vector<int> horizons;                      // d at each visited state
  std::vector<double> plan_values;                // V at each visited state
  std::vector<InputSequence> planned_sequences;   // full plan per step, for audit
};

// Receding-horizon loop: plan, apply the first input, repeat `steps` times.
Trajectory closed_loop(const SwitchedSystem& sys, const State& x0, double gamma,
                       std::int64_t budget, int steps);

// sum_{k=0}^{steps-1} gamma^k stage_costs[k].
double running_cost(const Trajectory& t);

struct EnvelopeFit {
  double k_overshoot = 1.0;
  double lambda_decay = 0.0;
  double residual = 0.0;  // mean log-gap between the envelope and the samples
  int window_begin = 0;
  int window_end = 0;  // inclusive index of the last sample used
};

// Smallest dominating exponential envelope sigma_k <= K sigma_b e^{-lambda (k-b)}
// over the window: K(lambda) is forced by domination for each candidate lambda
// (a 400-point grid up to the largest single-sample decay rate), and the pair
// minimizing the envelope value at the window end wins, ties to smaller
// lambda. Zero sigma terminates the window; sigma(x0) = 0 or a window with no
// decay raises errc::fit_failure.
EnvelopeFit fit_exponential_envelope(const Trajectory& t, int window_begin = 0,
                                     int window_end = -1);

struct StabilityReport {
  double delta = 0.0;
  bool entered = false;
  int entry_index = -1;           // first k with sigma_k <= delta
  bool stayed = false;            // no sigma above delta after entry
  int first_violation_after_entry = -1;
  double peak_sigma = 0.0;
};

// Entry into {sigma <= delta} and whether the trajectory stays there. A report,
// not an assertion: a diverging run simply reports no entry.
StabilityReport check_practical_stability(const Trajectory& t, double delta);

struct LyapunovReport {
  std::int64_t d_bar_used = 0;
  int checks = 0;
  int sandwich_violations = 0;   // alpha_Y(sigma) <= Y <= alpha_Y_bar(sigma) failures
  int decrease_violations = 0;   // one-step decrease inequality failures
  double worst_decrease_slack = 0.0;  // most positive violation amount observed
};

// Checks the Lyapunov sandwich and the one-step decrease
//   Y_{k+1} - Y_k <= (1/gamma) (-alpha_Y(sigma_k) + Upsilon(Y_k, gamma, d_bar))
// along the run, with Y_k = plan_values[k] + W(states[k]). d_bar = -1 uses the
// smallest observed horizon (the sharpest claim the run supports); an explicit
// d_bar must not exceed any observed horizon. Tolerance 1e-8 * max(1, Y_k).
LyapunovReport lyapunov_diagnostic(const Trajectory& t, const AssumptionOneData& data,
                                   const std::function<double(const State&)>& w_fn,
                                   std::int64_t d_bar = -1);

struct ChainReport {
  double lower = 0.0;        // first plan value
  double running = 0.0;      // realized discounted running cost (finite horizon)
  double upper = 0.0;        // lower + gap * sigma(x0)
  double gap = 0.0;          // running-cost gap at (params, cert, gamma, d_bar)
  double slack_upper = 0.0;  // upper - running
  double slack_lower = 0.0;  // running - lower
  double tail_allowance = 0.0;  // gamma^T * max stage cost: truncation slop for the lower side
  bool lower_ok = false;     // running >= lower - tail_allowance
  bool upper_ok = false;     // running <= upper
  bool lower_asserted = false;  // the lower check is only advisory at gamma = 1
};

// The computable sandwich around the receding-horizon cost: first plan value
// below, first plan value plus the certificate-driven gap above. The finite-T
// running cost under-estimates the infinite sum, so the lower comparison
// allows a gamma^T-scaled slop and is advisory at gamma = 1.
ChainReport verify_running_cost_bounds(const Trajectory& t, const LinearBoundParams& params,
                                       const StabilityCertificate& cert, std::int64_t d_bar);

// Certificate fitted from a run: (K, lambda) from the dominating envelope,
// gamma_star at the decay-feasibility threshold, d_bar at the depth the budget
// certifies (floored at 0).
StabilityCertificate fit_certificate(const Trajectory& t, const LinearBoundParams& params,
                                     int num_modes);

// Per-step CSV: k, state components, mode, stage cost, sigma, horizon, plan
// value, partial running cost; one trailing row for the final state. The
// reproducibility header goes on top.
void write_trajectory_csv(const Trajectory& t, std::ostream& os,
                          const std::string& resolved_config_json);

}  // namespace minplan
