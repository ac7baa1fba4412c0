#include "minplan.h"

#include <cstring>
#include <string>

#include "core/bounds.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/oracle.hpp"
#include "core/planner.hpp"
#include "core/sim.hpp"
#include "core/system.hpp"
#include "core/version.hpp"
#include "core/wide_uint.hpp"

struct minplan_system {
  minplan::SwitchedSystem sys;
};
struct minplan_plan_result {
  minplan::PlanResult result;
};
struct minplan_trajectory {
  minplan::Trajectory t;
};

namespace {

thread_local std::string g_last_error;

minplan_status fail_status(minplan_status code, const std::string& what) {
  g_last_error = what;
  return code;
}

// Runs `body`, translating the C++ error taxonomy onto status codes and
// stashing the message for minplan_last_error().
template <typename F>
minplan_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MINPLAN_OK;
  } catch (const minplan::Error& e) {
    return fail_status(static_cast<minplan_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::exception& e) {
    return fail_status(MINPLAN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail_status(MINPLAN_ERR_INTERNAL, "unknown error");
  }
}

minplan_status require_nonnull(const void* p, const char* name) {
  if (p != nullptr) return MINPLAN_OK;
  return fail_status(MINPLAN_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

#define MINPLAN_REQUIRE(p)                                             \
  do {                                                                 \
    if (require_nonnull((p), #p) != MINPLAN_OK) return MINPLAN_ERR_INVALID_ARGUMENT; \
  } while (0)

minplan::State to_state(const minplan_system* sys, const double* x) {
  return minplan::State(x, x + sys->sys.state_dim);
}

minplan_status copy_decimal(const minplan::WideUint& v, char* buf, size_t cap) {
  const std::string s = v.str();
  if (cap < s.size() + 1)
    return fail_status(MINPLAN_ERR_INVALID_ARGUMENT,
                       "buffer too small: need " + std::to_string(s.size() + 1) + " bytes");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return MINPLAN_OK;
}

template <typename Vec, typename Out>
minplan_status trajectory_entry(const Vec& v, int k, Out* out, const char* what) {
  if (k < 0 || static_cast<size_t>(k) >= v.size())
    return fail_status(MINPLAN_ERR_INVALID_ARGUMENT,
                       std::string(what) + " index out of range: " + std::to_string(k));
  *out = v[static_cast<size_t>(k)];
  return MINPLAN_OK;
}

minplan::LinearBoundParams make_params(double a_w, double a_v_bar, double a_w_bar) {
  minplan::LinearBoundParams p;
  p.a_w = a_w;
  p.a_v_bar = a_v_bar;
  p.a_w_bar = a_w_bar;
  minplan::validate_params(p);
  return p;
}

}  // namespace

extern "C" {

const char* minplan_version(void) { return minplan::kVersionLine; }

const char* minplan_status_name(minplan_status status) {
  if (status == MINPLAN_OK) return "ok";
  if (status == MINPLAN_ERR_CHECK_FAILED) return "check_failed";
  return minplan::errc_name(static_cast<minplan::errc>(static_cast<int>(status)));
}

const char* minplan_last_error(void) { return g_last_error.c_str(); }

/* --- Systems ------------------------------------------------------------ */

minplan_status minplan_system_create_cubic_integrator(minplan_system** out) {
  MINPLAN_REQUIRE(out);
  return guard([&] { *out = new minplan_system{minplan::make_cubic_integrator()}; });
}

minplan_status minplan_system_create_zero_cost(int state_dim, int num_modes,
                                               minplan_system** out) {
  MINPLAN_REQUIRE(out);
  return guard(
      [&] { *out = new minplan_system{minplan::make_zero_cost_fixture(state_dim, num_modes)}; });
}

minplan_status minplan_system_create_random_affine(uint64_t seed, int state_dim, int num_modes,
                                                   const char* cost_kind, int contractive,
                                                   minplan_system** out) {
  MINPLAN_REQUIRE(out);
  MINPLAN_REQUIRE(cost_kind);
  return guard([&] {
    minplan::RandomAffineParams p;
    p.seed = seed;
    p.state_dim = state_dim;
    p.num_modes = num_modes;
    p.cost_kind = cost_kind;
    p.contractive = contractive != 0;
    *out = new minplan_system{minplan::make_random_affine(p).system};
  });
}

void minplan_system_destroy(minplan_system* sys) { delete sys; }

minplan_status minplan_system_dims(const minplan_system* sys, int* state_dim, int* num_modes) {
  MINPLAN_REQUIRE(sys);
  if (state_dim) *state_dim = sys->sys.state_dim;
  if (num_modes) *num_modes = sys->sys.num_modes;
  return MINPLAN_OK;
}

minplan_status minplan_system_step(const minplan_system* sys, const double* x, int mode,
                                   double* x_next) {
  MINPLAN_REQUIRE(sys);
  MINPLAN_REQUIRE(x);
  MINPLAN_REQUIRE(x_next);
  return guard([&] {
    const minplan::State next = minplan::step(sys->sys, to_state(sys, x), mode);
    std::memcpy(x_next, next.data(), next.size() * sizeof(double));
  });
}

minplan_status minplan_system_stage_cost(const minplan_system* sys, const double* x, int mode,
                                         double* cost) {
  MINPLAN_REQUIRE(sys);
  MINPLAN_REQUIRE(x);
  MINPLAN_REQUIRE(cost);
  return guard([&] { *cost = minplan::stage_cost(sys->sys, to_state(sys, x), mode); });
}

minplan_status minplan_system_sigma(const minplan_system* sys, const double* x, double* value) {
  MINPLAN_REQUIRE(sys);
  MINPLAN_REQUIRE(x);
  MINPLAN_REQUIRE(value);
  return guard([&] { *value = minplan::sigma(sys->sys, to_state(sys, x)); });
}

minplan_status minplan_system_rollout_cost(const minplan_system* sys, const double* x,
                                           const int* modes, size_t len, double gamma,
                                           double* cost) {
  MINPLAN_REQUIRE(sys);
  MINPLAN_REQUIRE(x);
  MINPLAN_REQUIRE(modes);
  MINPLAN_REQUIRE(cost);
  return guard([&] {
    const minplan::InputSequence seq(modes, modes + len);
    *cost = minplan::rollout(sys->sys, to_state(sys, x), seq, gamma).cost;
  });
}

/* --- Planner ------------------------------------------------------------ */

minplan_status minplan_plan(const minplan_system* sys, const double* x, double gamma,
                            int64_t budget, minplan_plan_result** out) {
  MINPLAN_REQUIRE(sys);
  MINPLAN_REQUIRE(x);
  MINPLAN_REQUIRE(out);
  return guard([&] {
    *out = new minplan_plan_result{minplan::plan(sys->sys, to_state(sys, x), gamma, budget)};
  });
}

void minplan_plan_result_destroy(minplan_plan_result* result) { delete result; }

minplan_status minplan_plan_horizon(const minplan_plan_result* result, int* horizon) {
  MINPLAN_REQUIRE(result);
  MINPLAN_REQUIRE(horizon);
  *horizon = result->result.horizon;
  return MINPLAN_OK;
}

minplan_status minplan_plan_value(const minplan_plan_result* result, double* value) {
  MINPLAN_REQUIRE(result);
  MINPLAN_REQUIRE(value);
  *value = result->result.value;
  return MINPLAN_OK;
}

minplan_status minplan_plan_sequence_len(const minplan_plan_result* result, size_t* len) {
  MINPLAN_REQUIRE(result);
  MINPLAN_REQUIRE(len);
  *len = result->result.sequence.size();
  return MINPLAN_OK;
}

minplan_status minplan_plan_sequence(const minplan_plan_result* result, int* modes, size_t cap) {
  MINPLAN_REQUIRE(result);
  MINPLAN_REQUIRE(modes);
  const auto& seq = result->result.sequence;
  if (cap < seq.size())
    return fail_status(MINPLAN_ERR_INVALID_ARGUMENT,
                       "buffer too small: need " + std::to_string(seq.size()) + " entries");
  std::memcpy(modes, seq.data(), seq.size() * sizeof(int));
  return MINPLAN_OK;
}

minplan_status minplan_plan_first_input(const minplan_plan_result* result, int* mode) {
  MINPLAN_REQUIRE(result);
  MINPLAN_REQUIRE(mode);
  return guard([&] { *mode = minplan::first_input(result->result); });
}

minplan_status minplan_plan_stats(const minplan_plan_result* result, int64_t* nodes_expanded,
                                  int64_t* nodes_created, int* max_depth_created,
                                  int64_t* open_list_peak) {
  MINPLAN_REQUIRE(result);
  const minplan::PlanStats& s = result->result.stats;
  if (nodes_expanded) *nodes_expanded = s.nodes_expanded;
  if (nodes_created) *nodes_created = s.nodes_created;
  if (max_depth_created) *max_depth_created = s.max_depth_created;
  if (open_list_peak) *open_list_peak = s.open_list_peak;
  return MINPLAN_OK;
}

/* --- Budget certificates -------------------------------------------------- */

minplan_status minplan_min_budget_for_depth(int depth, int num_modes, char* buf, size_t cap) {
  MINPLAN_REQUIRE(buf);
  minplan::WideUint v;
  const minplan_status st = guard([&] { v = minplan::min_budget_for_depth(depth, num_modes); });
  if (st != MINPLAN_OK) return st;
  return copy_decimal(v, buf, cap);
}

minplan_status minplan_budget_for_stability(int depth, int num_modes, char* buf, size_t cap) {
  MINPLAN_REQUIRE(buf);
  minplan::WideUint v;
  const minplan_status st = guard([&] { v = minplan::budget_for_stability(depth, num_modes); });
  if (st != MINPLAN_OK) return st;
  return copy_decimal(v, buf, cap);
}

minplan_status minplan_min_budget_for_depth_i64(int depth, int num_modes, int64_t* out) {
  MINPLAN_REQUIRE(out);
  return guard([&] { *out = minplan::min_budget_for_depth(depth, num_modes).as_int64(); });
}

minplan_status minplan_budget_for_stability_i64(int depth, int num_modes, int64_t* out) {
  MINPLAN_REQUIRE(out);
  return guard([&] { *out = minplan::budget_for_stability(depth, num_modes).as_int64(); });
}

minplan_status minplan_certified_depth_for_budget(int64_t budget, int num_modes, int* out) {
  MINPLAN_REQUIRE(out);
  return guard([&] { *out = minplan::certified_depth_for_budget(budget, num_modes); });
}

/* --- Brute-force oracle --------------------------------------------------- */

minplan_status minplan_brute_force_value(const minplan_system* sys, const double* x, int horizon,
                                         double gamma, int64_t cap, double* value,
                                         int64_t* num_sequences) {
  MINPLAN_REQUIRE(sys);
  MINPLAN_REQUIRE(x);
  MINPLAN_REQUIRE(value);
  return guard([&] {
    const minplan::OracleResult r =
        minplan::brute_force_value(sys->sys, to_state(sys, x), horizon, gamma, cap);
    *value = r.value;
    if (num_sequences) *num_sequences = r.num_sequences;
  });
}

/* --- Receding-horizon simulation ----------------------------------------- */

minplan_status minplan_closed_loop(const minplan_system* sys, const double* x0, double gamma,
                                   int64_t budget, int steps, minplan_trajectory** out) {
  MINPLAN_REQUIRE(sys);
  MINPLAN_REQUIRE(x0);
  MINPLAN_REQUIRE(out);
  return guard([&] {
    *out = new minplan_trajectory{
        minplan::closed_loop(sys->sys, to_state(sys, x0), gamma, budget, steps)};
  });
}

void minplan_trajectory_destroy(minplan_trajectory* trajectory) { delete trajectory; }

minplan_status minplan_trajectory_steps(const minplan_trajectory* trajectory, int* steps) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(steps);
  *steps = static_cast<int>(trajectory->t.modes.size());
  return MINPLAN_OK;
}

minplan_status minplan_trajectory_state_dim(const minplan_trajectory* trajectory, int* state_dim) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(state_dim);
  *state_dim = trajectory->t.states.empty() ? 0 : static_cast<int>(trajectory->t.states[0].size());
  return MINPLAN_OK;
}

minplan_status minplan_trajectory_state(const minplan_trajectory* trajectory, int k, double* x) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(x);
  const auto& states = trajectory->t.states;
  if (k < 0 || static_cast<size_t>(k) >= states.size())
    return fail_status(MINPLAN_ERR_INVALID_ARGUMENT,
                       "state index out of range: " + std::to_string(k));
  const minplan::State& s = states[static_cast<size_t>(k)];
  std::memcpy(x, s.data(), s.size() * sizeof(double));
  return MINPLAN_OK;
}

minplan_status minplan_trajectory_sigma(const minplan_trajectory* trajectory, int k,
                                        double* value) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(value);
  return trajectory_entry(trajectory->t.sigmas, k, value, "sigma");
}

minplan_status minplan_trajectory_mode(const minplan_trajectory* trajectory, int k, int* mode) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(mode);
  return trajectory_entry(trajectory->t.modes, k, mode, "mode");
}

minplan_status minplan_trajectory_horizon(const minplan_trajectory* trajectory, int k,
                                          int* horizon) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(horizon);
  return trajectory_entry(trajectory->t.horizons, k, horizon, "horizon");
}

minplan_status minplan_trajectory_running_cost(const minplan_trajectory* trajectory,
                                               double* cost) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(cost);
  return guard([&] { *cost = minplan::running_cost(trajectory->t); });
}

minplan_status minplan_trajectory_fit_envelope(const minplan_trajectory* trajectory,
                                               double* k_overshoot, double* lambda_decay) {
  MINPLAN_REQUIRE(trajectory);
  MINPLAN_REQUIRE(k_overshoot);
  MINPLAN_REQUIRE(lambda_decay);
  return guard([&] {
    const minplan::EnvelopeFit fit = minplan::fit_exponential_envelope(trajectory->t);
    *k_overshoot = fit.k_overshoot;
    *lambda_decay = fit.lambda_decay;
  });
}

/* --- Linear decay bounds -------------------------------------------------- */

minplan_status minplan_error_bound_linear(double a_w, double a_v_bar, double a_w_bar,
                                          double sigma_x, int64_t horizon, double* out) {
  MINPLAN_REQUIRE(out);
  return guard([&] {
    *out = minplan::error_bound_linear(make_params(a_w, a_v_bar, a_w_bar), sigma_x, horizon);
  });
}

minplan_status minplan_gamma_bar(double a_w, double a_v_bar, double a_w_bar, double* out) {
  MINPLAN_REQUIRE(out);
  return guard([&] { *out = minplan::gamma_bar(make_params(a_w, a_v_bar, a_w_bar)); });
}

minplan_status minplan_d_tilde(double a_w, double a_v_bar, double a_w_bar, int64_t* out) {
  MINPLAN_REQUIRE(out);
  return guard([&] { *out = minplan::d_tilde(make_params(a_w, a_v_bar, a_w_bar)); });
}

minplan_status minplan_min_d_bar(double a_w, double a_v_bar, double a_w_bar, double gamma_star,
                                 int64_t* out) {
  MINPLAN_REQUIRE(out);
  return guard(
      [&] { *out = minplan::min_d_bar(make_params(a_w, a_v_bar, a_w_bar), gamma_star); });
}

minplan_status minplan_ges_margin(double a_w, double a_v_bar, double a_w_bar, double gamma_star,
                                  int64_t d_bar, double* out) {
  MINPLAN_REQUIRE(out);
  return guard(
      [&] { *out = minplan::ges_margin(make_params(a_w, a_v_bar, a_w_bar), gamma_star, d_bar); });
}

minplan_status minplan_running_cost_gap(double a_w, double a_v_bar, double a_w_bar,
                                        double k_overshoot, double lambda_decay,
                                        double gamma_star, int64_t d_bar, double gamma,
                                        double* out) {
  MINPLAN_REQUIRE(out);
  return guard([&] {
    minplan::StabilityCertificate cert;
    cert.k_overshoot = k_overshoot;
    cert.lambda_decay = lambda_decay;
    cert.gamma_star = gamma_star;
    cert.d_bar = d_bar;
    cert.provenance = minplan::StabilityCertificate::Provenance::user_supplied;
    minplan::validate_certificate(cert);
    *out = minplan::running_cost_gap(make_params(a_w, a_v_bar, a_w_bar), cert, gamma, d_bar);
  });
}

/* --- Experiments ---------------------------------------------------------- */

minplan_status minplan_run_experiment(const char* subcommand, const char* config_path,
                                      const char* out_dir, const uint64_t* seed,
                                      const int* threads, int* exit_code) {
  MINPLAN_REQUIRE(subcommand);
  MINPLAN_REQUIRE(config_path);
  MINPLAN_REQUIRE(exit_code);
  return guard([&] {
    minplan::RunOverrides ov;
    if (out_dir) ov.out_dir = std::string(out_dir);
    if (seed) ov.seed = *seed;
    if (threads) ov.threads = *threads;
    *exit_code = minplan::run_experiment(subcommand, config_path, ov);
  });
}

}  // extern "C"
