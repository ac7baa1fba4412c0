#include "core/sim.hpp"

#include <algorithm>
#include <cmath>

#include "core/csv.hpp"

namespace minplan {

Trajectory closed_loop(const SwitchedSystem& sys, const State& x0, double gamma,
                       std::int64_t budget, int steps) {
  if (steps < 1) fail(errc::invalid_argument, "closed_loop: steps must be >= 1");
  Trajectory t;
  t.gamma = gamma;
  t.budget = budget;
  t.states.reserve(static_cast<std::size_t>(steps) + 1);
  t.sigmas.reserve(static_cast<std::size_t>(steps) + 1);
  t.modes.reserve(static_cast<std::size_t>(steps));
  t.stage_costs.reserve(static_cast<std::size_t>(steps));
  t.horizons.reserve(static_cast<std::size_t>(steps));
  t.plan_values.reserve(static_cast<std::size_t>(steps));
  t.planned_sequences.reserve(static_cast<std::size_t>(steps));

  t.states.push_back(x0);
  t.sigmas.push_back(sigma(sys, x0));
  for (int k = 0; k < steps; ++k) {
    const State& xk = t.states.back();
    PlanResult plan_k;
    try {
      plan_k = plan(sys, xk, gamma, budget);
    } catch (const Error& e) {
      if (e.code() == errc::numeric_overflow) {
        fail(errc::numeric_overflow,
             "closed_loop: " + std::string(e.what()) + " (closed-loop step " +
                 std::to_string(k) + ")");
      }
      throw;
    }
    const int u = first_input(plan_k);
    t.modes.push_back(u);
    t.stage_costs.push_back(stage_cost(sys, xk, u));
    t.horizons.push_back(plan_k.horizon);
    t.plan_values.push_back(plan_k.value);
    t.planned_sequences.push_back(std::move(plan_k.sequence));
    State next = step(sys, xk, u);
    t.sigmas.push_back(sigma(sys, next));
    t.states.push_back(std::move(next));
  }
  return t;
}

double running_cost(const Trajectory& t) {
  double cost = 0.0;
  double w = 1.0;
  for (double ell : t.stage_costs) {
    cost += w * ell;
    w *= t.gamma;
  }
  return cost;
}

EnvelopeFit fit_exponential_envelope(const Trajectory& t, int window_begin, int window_end) {
  const int last = static_cast<int>(t.sigmas.size()) - 1;
  if (last < 1) fail(errc::invalid_argument, "envelope fit: trajectory too short");
  if (window_end < 0) window_end = last;
  if (window_begin < 0 || window_begin >= window_end || window_end > last) {
    fail(errc::invalid_argument, "envelope fit: bad window [" + std::to_string(window_begin) +
                                     ", " + std::to_string(window_end) + "]");
  }
  const double sigma0 = t.sigmas[static_cast<std::size_t>(window_begin)];
  if (sigma0 == 0.0) {
    fail(errc::fit_failure, "envelope fit: sigma at the window start is 0; decay is undefined");
  }

  // Zeros terminate the window: the envelope is relative decay, and an exact
  // zero has already outrun every exponential.
  int end = window_end;
  for (int k = window_begin + 1; k <= window_end; ++k) {
    if (t.sigmas[static_cast<std::size_t>(k)] == 0.0) {
      end = k - 1;
      break;
    }
  }
  if (end <= window_begin) {
    fail(errc::fit_failure, "envelope fit: window collapsed to a single sample");
  }

  bool any_decrease = false;
  for (int k = window_begin; k < end; ++k) {
    if (t.sigmas[static_cast<std::size_t>(k + 1)] < t.sigmas[static_cast<std::size_t>(k)]) {
      any_decrease = true;
      break;
    }
  }
  if (!any_decrease) {
    fail(errc::fit_failure, "envelope fit: sigma never decreases on the window");
  }

  // Largest decay rate any single sample supports; the grid's top candidate.
  double lambda_max = 0.0;
  for (int k = window_begin + 1; k <= end; ++k) {
    const double sk = t.sigmas[static_cast<std::size_t>(k)];
    if (sk < sigma0) {
      lambda_max = std::max(lambda_max, std::log(sigma0 / sk) / static_cast<double>(k - window_begin));
    }
  }
  if (!(lambda_max > 0.0)) {
    fail(errc::fit_failure, "envelope fit: no sample below the window start; no positive decay");
  }

  constexpr int kGrid = 400;
  const int horizon = end - window_begin;
  double best_lambda = 0.0;
  double best_k = 0.0;
  double best_objective = 0.0;
  bool have_best = false;
  for (int j = 1; j <= kGrid; ++j) {
    const double lambda = lambda_max * static_cast<double>(j) / static_cast<double>(kGrid);
    // Domination forces K(lambda) = max_k sigma_k e^{lambda (k-b)} / sigma_b  (>= 1 via k = b).
    double k_needed = 0.0;
    for (int k = window_begin; k <= end; ++k) {
      const double v = t.sigmas[static_cast<std::size_t>(k)] *
                       std::exp(lambda * static_cast<double>(k - window_begin)) / sigma0;
      k_needed = std::max(k_needed, v);
    }
    const double objective = k_needed * std::exp(-lambda * static_cast<double>(horizon));
    if (!have_best || objective < best_objective) {
      have_best = true;
      best_objective = objective;
      best_lambda = lambda;
      best_k = k_needed;
    }
  }

  EnvelopeFit fit;
  fit.k_overshoot = best_k;
  fit.lambda_decay = best_lambda;
  fit.window_begin = window_begin;
  fit.window_end = end;
  double gap_sum = 0.0;
  for (int k = window_begin; k <= end; ++k) {
    const double envelope = std::log(best_k * sigma0) - best_lambda * static_cast<double>(k - window_begin);
    gap_sum += envelope - std::log(t.sigmas[static_cast<std::size_t>(k)]);
  }
  fit.residual = gap_sum / static_cast<double>(end - window_begin + 1);
  return fit;
}

StabilityReport check_practical_stability(const Trajectory& t, double delta) {
  if (!(delta > 0.0)) fail(errc::invalid_argument, "practical stability: delta must be > 0");
  StabilityReport r;
  r.delta = delta;
  for (std::size_t k = 0; k < t.sigmas.size(); ++k) {
    r.peak_sigma = std::max(r.peak_sigma, t.sigmas[k]);
    if (!r.entered && t.sigmas[k] <= delta) {
      r.entered = true;
      r.entry_index = static_cast<int>(k);
    } else if (r.entered && r.first_violation_after_entry < 0 && t.sigmas[k] > delta) {
      r.first_violation_after_entry = static_cast<int>(k);
    }
  }
  r.stayed = r.entered && r.first_violation_after_entry < 0;
  return r;
}

LyapunovReport lyapunov_diagnostic(const Trajectory& t, const AssumptionOneData& data,
                                   const std::function<double(const State&)>& w_fn,
                                   std::int64_t d_bar) {
  if (t.plan_values.empty()) fail(errc::invalid_argument, "lyapunov diagnostic: empty trajectory");
  std::int64_t min_horizon = t.horizons.front();
  for (int h : t.horizons) min_horizon = std::min<std::int64_t>(min_horizon, h);
  if (d_bar < 0) {
    d_bar = min_horizon;
  } else if (d_bar > min_horizon) {
    fail(errc::invalid_argument, "lyapunov diagnostic: d_bar " + std::to_string(d_bar) +
                                     " exceeds the smallest observed horizon " +
                                     std::to_string(min_horizon));
  }

  LyapunovReport r;
  r.d_bar_used = d_bar;
  const std::size_t steps = t.plan_values.size();
  std::vector<double> y(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    y[k] = t.plan_values[k] + (w_fn ? w_fn(t.states[k]) : 0.0);
    const double tol = 1e-8 * std::max(1.0, std::abs(y[k]));
    const double lo = alpha_y(data, t.sigmas[k]);
    const double hi = alpha_y_bar(data, t.sigmas[k]);
    ++r.checks;
    if (y[k] < lo - tol || y[k] > hi + tol) ++r.sandwich_violations;
  }
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    const double tol = 1e-8 * std::max(1.0, std::abs(y[k]));
    const double allowed =
        (-alpha_y(data, t.sigmas[k]) + upsilon(data, y[k], t.gamma, d_bar)) / t.gamma;
    const double slack = (y[k + 1] - y[k]) - allowed;
    ++r.checks;
    if (slack > tol) {
      ++r.decrease_violations;
      r.worst_decrease_slack = std::max(r.worst_decrease_slack, slack);
    }
  }
  return r;
}

ChainReport verify_running_cost_bounds(const Trajectory& t, const LinearBoundParams& params,
                                       const StabilityCertificate& cert, std::int64_t d_bar) {
  if (t.plan_values.empty()) fail(errc::invalid_argument, "chain check: empty trajectory");
  ChainReport r;
  r.lower = t.plan_values.front();
  r.running = running_cost(t);
  r.gap = running_cost_gap(params, cert, t.gamma, d_bar);
  r.upper = r.lower + r.gap * t.sigmas.front();
  r.slack_upper = r.upper - r.running;
  r.slack_lower = r.running - r.lower;
  double max_ell = 0.0;
  for (double ell : t.stage_costs) max_ell = std::max(max_ell, ell);
  r.tail_allowance =
      std::pow(t.gamma, static_cast<double>(t.stage_costs.size())) * max_ell;
  r.lower_ok = r.running >= r.lower - r.tail_allowance;
  r.upper_ok = r.running <= r.upper;
  r.lower_asserted = t.gamma < 1.0;
  return r;
}

StabilityCertificate fit_certificate(const Trajectory& t, const LinearBoundParams& params,
                                     int num_modes) {
  const EnvelopeFit fit = fit_exponential_envelope(t);
  StabilityCertificate cert;
  cert.k_overshoot = std::max(1.0, fit.k_overshoot);
  cert.lambda_decay = fit.lambda_decay;
  cert.gamma_star = gamma_bar(params);
  cert.d_bar = std::max<std::int64_t>(0, certified_depth_for_budget(t.budget, num_modes));
  cert.provenance = StabilityCertificate::Provenance::fitted;
  validate_certificate(cert);
  return cert;
}

void write_trajectory_csv(const Trajectory& t, std::ostream& os,
                          const std::string& resolved_config_json) {
  write_artifact_header(os, resolved_config_json);
  const std::size_t n = t.states.empty() ? 0 : t.states.front().size();
  std::vector<std::string> cols{"k"};
  for (std::size_t i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i));
  cols.insert(cols.end(),
              {"mode", "stage_cost", "sigma", "horizon", "plan_value", "partial_running_cost"});
  os << join(cols, ',') << "\n";

  double partial = 0.0;
  double w = 1.0;
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    std::vector<std::string> row{std::to_string(k)};
    for (double v : t.states[k]) row.push_back(format_double(v));
    if (k < t.modes.size()) {
      partial += w * t.stage_costs[k];
      w *= t.gamma;
      row.push_back(std::to_string(t.modes[k]));
      row.push_back(format_double(t.stage_costs[k]));
      row.push_back(format_double(t.sigmas[k]));
      row.push_back(std::to_string(t.horizons[k]));
      row.push_back(format_double(t.plan_values[k]));
      row.push_back(format_double(partial));
    } else {
      // Final state: no step was taken from here.
      row.push_back("");
      row.push_back("");
      row.push_back(format_double(t.sigmas[k]));
      row.push_back("");
      row.push_back("");
      row.push_back(format_double(partial));
    }
    os << join(row, ',') << "\n";
  }
}

}  // namespace minplan
