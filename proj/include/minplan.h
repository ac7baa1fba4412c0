#ifndef MINPLAN_H
#define MINPLAN_H

/* C API for the minplan library: optimistic finite-horizon planning for
 * switched discrete-time systems, a brute-force verification oracle, linear
 * decay bounds / stability certificates, and a receding-horizon simulator.
 *
 * Conventions:
 *  - Every fallible call returns minplan_status; MINPLAN_OK is 0.
 *  - On failure, minplan_last_error() returns a message for the calling
 *    thread, valid until that thread's next API call.
 *  - Objects returned through **out parameters are owned by the caller and
 *    released with the matching _destroy function (safe on NULL).
 *  - Modes are 1-based (1..num_modes); states are dense double arrays of the
 *    system's state dimension.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef MINPLAN_API
#define MINPLAN_API __attribute__((visibility("default")))
#endif

typedef enum minplan_status {
  MINPLAN_OK = 0,
  MINPLAN_ERR_INVALID_ARGUMENT = 1,
  MINPLAN_ERR_DOMAIN = 2,
  MINPLAN_ERR_NUMERIC_OVERFLOW = 3,
  MINPLAN_ERR_INTEGER_OVERFLOW = 4,
  MINPLAN_ERR_DIVERGENCE = 5,
  MINPLAN_ERR_INFEASIBLE = 6,
  MINPLAN_ERR_INVERSION_RANGE = 7,
  MINPLAN_ERR_RESOURCE_LIMIT = 8,
  MINPLAN_ERR_FIT_FAILURE = 9,
  MINPLAN_ERR_CONFIG = 10,
  MINPLAN_ERR_IO = 11,
  MINPLAN_ERR_INTERNAL = 12,
  MINPLAN_ERR_CHECK_FAILED = 13
} minplan_status;

/* "minplan <semver>" */
MINPLAN_API const char* minplan_version(void);
/* Stable lowercase name for a status code ("ok", "config", ...). */
MINPLAN_API const char* minplan_status_name(minplan_status status);
/* Message of the calling thread's most recent failure ("" if none). */
MINPLAN_API const char* minplan_last_error(void);

typedef struct minplan_system minplan_system;
typedef struct minplan_plan_result minplan_plan_result;
typedef struct minplan_trajectory minplan_trajectory;

/* --- Systems ------------------------------------------------------------ */

MINPLAN_API minplan_status minplan_system_create_cubic_integrator(minplan_system** out);
MINPLAN_API minplan_status minplan_system_create_zero_cost(int state_dim, int num_modes,
                                                           minplan_system** out);
/* cost_kind: "weighted" or "sigma"; contractive: nonzero forces a contractive
 * first mode. */
MINPLAN_API minplan_status minplan_system_create_random_affine(uint64_t seed, int state_dim,
                                                               int num_modes,
                                                               const char* cost_kind,
                                                               int contractive,
                                                               minplan_system** out);
MINPLAN_API void minplan_system_destroy(minplan_system* sys);

MINPLAN_API minplan_status minplan_system_dims(const minplan_system* sys, int* state_dim,
                                               int* num_modes);
MINPLAN_API minplan_status minplan_system_step(const minplan_system* sys, const double* x,
                                               int mode, double* x_next);
MINPLAN_API minplan_status minplan_system_stage_cost(const minplan_system* sys, const double* x,
                                                     int mode, double* cost);
MINPLAN_API minplan_status minplan_system_sigma(const minplan_system* sys, const double* x,
                                                double* value);
/* Discounted cost of applying `modes[0..len)` from x. */
MINPLAN_API minplan_status minplan_system_rollout_cost(const minplan_system* sys, const double* x,
                                                       const int* modes, size_t len, double gamma,
                                                       double* cost);

/* --- Planner ------------------------------------------------------------ */

/* Optimistic best-first search with budget+1 expansions. The result's value is
 * the exact optimum over all sequences of length horizon+1 (budget >= 1). */
MINPLAN_API minplan_status minplan_plan(const minplan_system* sys, const double* x, double gamma,
                                        int64_t budget, minplan_plan_result** out);
MINPLAN_API void minplan_plan_result_destroy(minplan_plan_result* result);
MINPLAN_API minplan_status minplan_plan_horizon(const minplan_plan_result* result, int* horizon);
MINPLAN_API minplan_status minplan_plan_value(const minplan_plan_result* result, double* value);
MINPLAN_API minplan_status minplan_plan_sequence_len(const minplan_plan_result* result,
                                                     size_t* len);
/* Copies the optimal mode sequence into `modes` (capacity `cap` entries). */
MINPLAN_API minplan_status minplan_plan_sequence(const minplan_plan_result* result, int* modes,
                                                 size_t cap);
/* First mode of the optimal sequence (what a receding-horizon loop applies). */
MINPLAN_API minplan_status minplan_plan_first_input(const minplan_plan_result* result, int* mode);
MINPLAN_API minplan_status minplan_plan_stats(const minplan_plan_result* result,
                                              int64_t* nodes_expanded, int64_t* nodes_created,
                                              int* max_depth_created, int64_t* open_list_peak);

/* --- Budget certificates -------------------------------------------------
 * The string forms render exact decimal values that may exceed 64 bits; the
 * _i64 forms fail with MINPLAN_ERR_INTEGER_OVERFLOW instead of truncating. */

MINPLAN_API minplan_status minplan_min_budget_for_depth(int depth, int num_modes, char* buf,
                                                        size_t cap);
MINPLAN_API minplan_status minplan_budget_for_stability(int depth, int num_modes, char* buf,
                                                        size_t cap);
MINPLAN_API minplan_status minplan_min_budget_for_depth_i64(int depth, int num_modes,
                                                            int64_t* out);
MINPLAN_API minplan_status minplan_budget_for_stability_i64(int depth, int num_modes,
                                                            int64_t* out);
/* Largest depth whose stability budget fits the given budget; -1 when none. */
MINPLAN_API minplan_status minplan_certified_depth_for_budget(int64_t budget, int num_modes,
                                                              int* out);

/* --- Brute-force oracle --------------------------------------------------- */

/* Exhaustive minimum over all num_modes^(horizon+1) sequences; refuses
 * enumerations larger than `cap` with MINPLAN_ERR_RESOURCE_LIMIT.
 * num_sequences may be NULL. */
MINPLAN_API minplan_status minplan_brute_force_value(const minplan_system* sys, const double* x,
                                                     int horizon, double gamma, int64_t cap,
                                                     double* value, int64_t* num_sequences);

/* --- Receding-horizon simulation ----------------------------------------- */

MINPLAN_API minplan_status minplan_closed_loop(const minplan_system* sys, const double* x0,
                                               double gamma, int64_t budget, int steps,
                                               minplan_trajectory** out);
MINPLAN_API void minplan_trajectory_destroy(minplan_trajectory* trajectory);
MINPLAN_API minplan_status minplan_trajectory_steps(const minplan_trajectory* trajectory,
                                                    int* steps);
MINPLAN_API minplan_status minplan_trajectory_state_dim(const minplan_trajectory* trajectory,
                                                        int* state_dim);
/* k in [0, steps] for states/sigmas, [0, steps) for modes/horizons. */
MINPLAN_API minplan_status minplan_trajectory_state(const minplan_trajectory* trajectory, int k,
                                                    double* x);
MINPLAN_API minplan_status minplan_trajectory_sigma(const minplan_trajectory* trajectory, int k,
                                                    double* value);
MINPLAN_API minplan_status minplan_trajectory_mode(const minplan_trajectory* trajectory, int k,
                                                   int* mode);
MINPLAN_API minplan_status minplan_trajectory_horizon(const minplan_trajectory* trajectory, int k,
                                                      int* horizon);
MINPLAN_API minplan_status minplan_trajectory_running_cost(const minplan_trajectory* trajectory,
                                                           double* cost);
/* Smallest dominating exponential envelope of sigma along the run. */
MINPLAN_API minplan_status minplan_trajectory_fit_envelope(const minplan_trajectory* trajectory,
                                                           double* k_overshoot,
                                                           double* lambda_decay);

/* --- Linear decay bounds -------------------------------------------------- */

/* Gap between the horizon-d value and the infinite-horizon value (independent
 * of the discount). */
MINPLAN_API minplan_status minplan_error_bound_linear(double a_w, double a_v_bar, double a_w_bar,
                                                      double sigma_x, int64_t horizon,
                                                      double* out);
/* Discount threshold above which some horizon satisfies the decay condition. */
MINPLAN_API minplan_status minplan_gamma_bar(double a_w, double a_v_bar, double a_w_bar,
                                             double* out);
/* Closed-form horizon threshold (guarded floor). */
MINPLAN_API minplan_status minplan_d_tilde(double a_w, double a_v_bar, double a_w_bar,
                                           int64_t* out);
/* Smallest horizon satisfying the decay condition at gamma_star;
 * MINPLAN_ERR_INFEASIBLE when none exists. */
MINPLAN_API minplan_status minplan_min_d_bar(double a_w, double a_v_bar, double a_w_bar,
                                             double gamma_star, int64_t* out);
/* Signed margin of the strict decay condition (positive = holds). */
MINPLAN_API minplan_status minplan_ges_margin(double a_w, double a_v_bar, double a_w_bar,
                                              double gamma_star, int64_t d_bar, double* out);
/* Additive running-cost gap per unit sigma(x0); requires gamma in
 * (gamma_star, 1] and exp(lambda) > gamma. */
MINPLAN_API minplan_status minplan_running_cost_gap(double a_w, double a_v_bar, double a_w_bar,
                                                    double k_overshoot, double lambda_decay,
                                                    double gamma_star, int64_t d_bar, double gamma,
                                                    double* out);

/* --- Experiments ---------------------------------------------------------- */

/* Runs a config-driven experiment (subcommand: "plan", "simulate", "sweep",
 * "bounds", "oracle-check") and writes its artifacts. out_dir, seed, and
 * threads override the config when non-NULL. On MINPLAN_OK, *exit_code is 0
 * (all checks passed) or 1 (a verification subcommand found mismatches). */
MINPLAN_API minplan_status minplan_run_experiment(const char* subcommand, const char* config_path,
                                                  const char* out_dir, const uint64_t* seed,
                                                  const int* threads, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* MINPLAN_H */
