#include "core/experiments.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/oracle.hpp"
#include "core/planner.hpp"
#include "core/rng.hpp"
#include "core/sim.hpp"

namespace minplan {

namespace {

namespace fs = std::filesystem;

std::ofstream open_artifact(const ExperimentConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) fail(errc::io, "cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  const fs::path path = fs::path(cfg.out_dir) / name;
  std::ofstream os(path);
  if (!os) fail(errc::io, "cannot open '" + path.string() + "' for writing");
  return os;
}

void require(bool cond, const std::string& msg) {
  if (!cond) fail(errc::config, msg);
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::string sequence_cell(const InputSequence& seq) {
  std::vector<std::string> parts;
  parts.reserve(seq.size());
  for (int m : seq) parts.push_back(std::to_string(m));
  return join(parts, ';');
}

std::string state_cell(const State& x) {
  std::vector<std::string> parts;
  parts.reserve(x.size());
  for (double v : x) parts.push_back(format_double(v));
  return join(parts, ';');
}

}  // namespace

int run_plan(const ExperimentConfig& cfg) {
  require(cfg.budgets.size() == 1, "plan needs exactly one budget");
  require(cfg.initial_states.size() == 1, "plan needs exactly one initial_state");
  const SwitchedSystem sys = make_system_from_config(cfg);
  const std::int64_t budget = cfg.budgets[0];
  const State& x0 = cfg.initial_states[0];

  std::ofstream trace_os;
  ExpansionCallback trace;
  if (cfg.trace) {
    trace_os = open_artifact(cfg, "expansion_trace.csv");
    write_artifact_header(trace_os, cfg.resolved_json());
    trace_os << "iteration,depth,value\n";
    trace = [&trace_os](std::int64_t iter, int depth, double j) {
      trace_os << iter << ',' << depth << ',' << format_double(j) << '\n';
    };
  }

  const PlanResult r = plan(sys, x0, cfg.gamma, budget, trace);

  std::ofstream os = open_artifact(cfg, "plan_result.csv");
  write_artifact_header(os, cfg.resolved_json());
  os << "budget,horizon,value,sequence,nodes_expanded,nodes_created,max_depth_created,"
        "open_list_peak\n";
  os << budget << ',' << r.horizon << ',' << format_double(r.value) << ','
     << sequence_cell(r.sequence) << ',' << r.stats.nodes_expanded << ',' << r.stats.nodes_created
     << ',' << r.stats.max_depth_created << ',' << r.stats.open_list_peak << '\n';
  if (!os) fail(errc::io, "failed writing plan_result.csv");
  return 0;
}

int run_simulate(const ExperimentConfig& cfg) {
  require(cfg.budgets.size() == 1, "simulate needs exactly one budget");
  require(cfg.initial_states.size() == 1, "simulate needs exactly one initial_state");
  require(cfg.steps >= 1, "simulate needs steps >= 1");
  const SwitchedSystem sys = make_system_from_config(cfg);
  const State& x0 = cfg.initial_states[0];

  const Trajectory t = closed_loop(sys, x0, cfg.gamma, cfg.budgets[0], cfg.steps);

  {
    std::ofstream os = open_artifact(cfg, "trajectory.csv");
    write_trajectory_csv(t, os, cfg.resolved_json());
    if (!os) fail(errc::io, "failed writing trajectory.csv");
  }

  std::ofstream os = open_artifact(cfg, "reports.txt");
  write_artifact_header(os, cfg.resolved_json());

  const double cost = running_cost(t);
  os << "[run]\n";
  os << "system = " << sys.name << '\n';
  os << "steps = " << cfg.steps << '\n';
  os << "gamma = " << format_double(cfg.gamma) << '\n';
  os << "budget = " << cfg.budgets[0] << '\n';
  os << "running_cost = " << format_double(cost) << '\n';
  os << "final_sigma = " << format_double(t.sigmas.back()) << '\n';

  const StabilityReport stab = check_practical_stability(t, cfg.delta);
  os << "\n[practical_stability]\n";
  os << "delta = " << format_double(stab.delta) << '\n';
  os << "peak_sigma = " << format_double(stab.peak_sigma) << '\n';
  os << "entered = " << yes_no(stab.entered) << '\n';
  os << "entry_index = " << stab.entry_index << '\n';
  os << "stayed = " << yes_no(stab.stayed) << '\n';
  os << "first_violation_after_entry = " << stab.first_violation_after_entry << '\n';

  os << "\n[envelope]\n";
  bool have_fit = false;
  EnvelopeFit fit;
  try {
    fit = fit_exponential_envelope(t);
    have_fit = true;
    os << "k_overshoot = " << format_double(fit.k_overshoot) << '\n';
    os << "lambda_decay = " << format_double(fit.lambda_decay) << '\n';
    os << "residual = " << format_double(fit.residual) << '\n';
    os << "window = [" << fit.window_begin << ", " << fit.window_end << "]\n";
  } catch (const Error& e) {
    os << "fit = failed (" << errc_name(e.code()) << ": " << e.what() << ")\n";
  }

  // Certificate: fitted from this run (needs linear decay data) or user-given.
  bool have_cert = false;
  StabilityCertificate cert;
  if (cfg.certificate.present) {
    if (cfg.certificate.fit) {
      require(cfg.bounds.present && cfg.bounds.linear,
              "certificate.fit requires linear bounds (a_w, a_v_bar, a_w_bar)");
      os << "\n[certificate]\n";
      if (have_fit) {
        cert = fit_certificate(t, cfg.bounds.linear_params, sys.num_modes);
        have_cert = true;
        os << "source = fitted\n";
      } else {
        os << "source = fitted (unavailable: envelope fit failed)\n";
      }
    } else {
      cert = cfg.certificate.user;
      have_cert = true;
      os << "\n[certificate]\n";
      os << "source = user\n";
    }
    if (have_cert) {
      os << "k = " << format_double(cert.k_overshoot) << '\n';
      os << "lambda = " << format_double(cert.lambda_decay) << '\n';
      os << "gamma_star = " << format_double(cert.gamma_star) << '\n';
      os << "d_bar = " << cert.d_bar << '\n';
      if (cfg.bounds.present && cfg.bounds.linear) {
        const CertificateCheck chk = check_certificate(cert, cfg.bounds.linear_params);
        os << "decay_condition_margin = " << format_double(chk.margin) << '\n';
        os << "decay_condition_holds = " << yes_no(chk.ges_holds) << '\n';
      }
    }
  }

  if (cfg.bounds.present) {
    const AssumptionOneData data = cfg.bounds.to_assumption_data();
    const auto w_zero = [](const State&) { return 0.0; };  // builtin systems carry no terminal cost
    os << "\n[lyapunov]\n";
    try {
      const LyapunovReport ly = lyapunov_diagnostic(t, data, w_zero);
      os << "d_bar_used = " << ly.d_bar_used << '\n';
      os << "checks = " << ly.checks << '\n';
      os << "sandwich_violations = " << ly.sandwich_violations << '\n';
      os << "decrease_violations = " << ly.decrease_violations << '\n';
      os << "worst_decrease_slack = " << format_double(ly.worst_decrease_slack) << '\n';
    } catch (const Error& e) {
      os << "diagnostic = failed (" << errc_name(e.code()) << ": " << e.what() << ")\n";
    }
  }

  if (cfg.bounds.present && cfg.bounds.linear && have_cert) {
    os << "\n[running_cost_bounds]\n";
    try {
      const ChainReport chain =
          verify_running_cost_bounds(t, cfg.bounds.linear_params, cert, cert.d_bar);
      os << "lower = " << format_double(chain.lower) << '\n';
      os << "running = " << format_double(chain.running) << '\n';
      os << "upper = " << format_double(chain.upper) << '\n';
      os << "gap = " << format_double(chain.gap) << '\n';
      os << "slack_lower = " << format_double(chain.slack_lower) << '\n';
      os << "slack_upper = " << format_double(chain.slack_upper) << '\n';
      os << "tail_allowance = " << format_double(chain.tail_allowance) << '\n';
      os << "lower_ok = " << yes_no(chain.lower_ok) << '\n';
      os << "upper_ok = " << yes_no(chain.upper_ok) << '\n';
      os << "lower_asserted = " << yes_no(chain.lower_asserted) << '\n';
    } catch (const Error& e) {
      os << "bounds = not applicable (" << errc_name(e.code()) << ": " << e.what() << ")\n";
    }
  }
  if (!os) fail(errc::io, "failed writing reports.txt");
  return 0;
}

int run_sweep(const ExperimentConfig& cfg) {
  require(!cfg.budgets.empty(), "sweep needs budget or budgets");
  require(!cfg.initial_states.empty(), "sweep needs initial_state or initial_states");
  require(cfg.steps >= 1, "sweep needs steps >= 1");
  const SwitchedSystem sys = make_system_from_config(cfg);

  const std::size_t rows = cfg.initial_states.size();
  const std::size_t cols = cfg.budgets.size();
  std::vector<double> costs(rows * cols, 0.0);

  // Cells are independent closed-loop runs; threads pull cells off a shared
  // counter. The system's callables are stateless, so concurrent reads are safe.
  std::atomic<std::size_t> next_cell{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const std::size_t cell = next_cell.fetch_add(1);
      if (cell >= rows * cols) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        const State& x0 = cfg.initial_states[cell / cols];
        const std::int64_t budget = cfg.budgets[cell % cols];
        const Trajectory t = closed_loop(sys, x0, cfg.gamma, budget, cfg.steps);
        costs[cell] = running_cost(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int num_workers =
      static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), rows * cols));
  if (num_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(num_workers));
    for (int i = 0; i < num_workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::ofstream os = open_artifact(cfg, "sweep.csv");
  write_artifact_header(os, cfg.resolved_json());
  os << "initial_state";
  for (std::int64_t b : cfg.budgets) os << ",budget_" << b;
  os << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    os << state_cell(cfg.initial_states[r]);
    for (std::size_t c = 0; c < cols; ++c) os << ',' << format_double(costs[r * cols + c]);
    os << '\n';
  }
  if (!os) fail(errc::io, "failed writing sweep.csv");
  return 0;
}

int run_bounds(const ExperimentConfig& cfg) {
  require(cfg.bounds.present && cfg.bounds.linear,
          "bounds needs linear decay parameters (a_w, a_v_bar, a_w_bar)");
  const SwitchedSystem sys = make_system_from_config(cfg);
  const LinearBoundParams& p = cfg.bounds.linear_params;
  const int num_modes = sys.num_modes;

  const double ratio = p.a_w / (p.a_v_bar + p.a_w_bar);
  const double gbar = gamma_bar(p);
  const std::int64_t dt = d_tilde(p);
  bool feasible = true;
  std::int64_t dmin = -1;
  try {
    dmin = min_d_bar(p, cfg.gamma_star);
  } catch (const Error& e) {
    if (e.code() != errc::infeasible) throw;
    feasible = false;
  }

  {
    std::ofstream os = open_artifact(cfg, "certificate_report.txt");
    write_artifact_header(os, cfg.resolved_json());
    os << "[decay_data]\n";
    os << "a_w = " << format_double(p.a_w) << '\n';
    os << "a_v_bar = " << format_double(p.a_v_bar) << '\n';
    os << "a_w_bar = " << format_double(p.a_w_bar) << '\n';
    os << "contraction_ratio = " << format_double(ratio) << '\n';
    os << "gamma_bar = " << format_double(gbar) << '\n';
    os << "\n[horizon]\n";
    os << "gamma_star = " << format_double(cfg.gamma_star) << '\n';
    os << "d_tilde = " << dt << '\n';
    if (feasible) {
      os << "min_d_bar = " << dmin << '\n';
      if (dmin >= 1)
        os << "margin_at_min_d_bar_minus_1 = " << format_double(ges_margin(p, cfg.gamma_star, dmin - 1))
           << '\n';
      os << "margin_at_min_d_bar = " << format_double(ges_margin(p, cfg.gamma_star, dmin)) << '\n';
    } else {
      os << "min_d_bar = infeasible (1 - gamma_star >= a_w / (a_v_bar + a_w_bar))\n";
    }
    os << "\n[budgets]\n";
    os << "num_modes = " << num_modes << '\n';
    os << "budget_to_exceed_d_tilde = " << budget_for_stability(static_cast<int>(dt), num_modes).str()
       << '\n';
    if (feasible) {
      os << "budget_to_exceed_min_d_bar = "
         << budget_for_stability(static_cast<int>(dmin), num_modes).str() << '\n';
    }
    if (!os) fail(errc::io, "failed writing certificate_report.txt");
  }

  {
    std::ofstream os = open_artifact(cfg, "bound_curves.csv");
    write_artifact_header(os, cfg.resolved_json());
    os << "d,error_bound_sigma1,decay_margin\n";
    const std::int64_t top =
        std::min<std::int64_t>(std::max(dt, feasible ? dmin : dt + 20) + 10, 500);
    for (std::int64_t d = 0; d <= top; ++d) {
      os << d << ',' << format_double(error_bound_linear(p, 1.0, d)) << ','
         << format_double(ges_margin(p, cfg.gamma_star, d)) << '\n';
    }
    if (!os) fail(errc::io, "failed writing bound_curves.csv");
  }
  return 0;
}

int run_oracle_check(const ExperimentConfig& cfg) {
  const OracleCheckConfig& oc = cfg.oracle;
  SplitMix64 master(oc.seed);

  std::ofstream os = open_artifact(cfg, "oracle_check.csv");
  write_artifact_header(os, cfg.resolved_json());
  os << "instance,seed,state_dim,num_modes,gamma,budget,horizon,plan_value,oracle_value,"
        "abs_err,seq_cost_exact,pass\n";

  int failures = 0;
  for (int i = 0; i < oc.instances; ++i) {
    const std::uint64_t instance_seed = master.next();
    RandomAffineParams rp;
    rp.seed = instance_seed;
    rp.state_dim = 1 + (i % oc.max_dim);
    rp.num_modes = oc.modes[static_cast<std::size_t>(i) % oc.modes.size()];
    rp.cost_kind = (i % 3 == 2) ? "sigma" : "weighted";
    rp.contractive = (i % 2 == 0);
    const SwitchedSystem sys = make_random_affine(rp).system;
    const double gamma = oc.gammas[static_cast<std::size_t>(i) % oc.gammas.size()];

    SplitMix64 xr(instance_seed ^ 0x9e3779b97f4a7c15ULL);
    State x0(static_cast<std::size_t>(rp.state_dim));
    for (double& v : x0) v = xr.uniform(-2.0, 2.0);

    // Enough budget to certify horizon >= 2 and keep the full enumeration of
    // the certified horizon within the oracle cap.
    const std::int64_t budget = min_budget_for_depth(2, rp.num_modes).as_int64();
    const PlanResult pr = plan(sys, x0, gamma, budget);
    const OracleResult best = brute_force_value(sys, x0, pr.horizon, gamma, oc.cap);

    const double abs_err = std::abs(pr.value - best.value);
    const bool value_ok = abs_err <= 1e-9 * std::max(1.0, std::abs(best.value));
    const bool seq_cost_exact = rollout(sys, x0, pr.sequence, gamma).cost == pr.value;
    const bool pass = value_ok && seq_cost_exact && pr.horizon >= 2;
    if (!pass) ++failures;

    os << i << ',' << instance_seed << ',' << rp.state_dim << ',' << rp.num_modes << ','
       << format_double(gamma) << ',' << budget << ',' << pr.horizon << ','
       << format_double(pr.value) << ',' << format_double(best.value) << ','
       << format_double(abs_err) << ',' << (seq_cost_exact ? 1 : 0) << ',' << (pass ? 1 : 0)
       << '\n';
  }
  if (!os) fail(errc::io, "failed writing oracle_check.csv");
  return failures == 0 ? 0 : 1;
}

int run_experiment(const std::string& subcommand, const std::string& config_path,
                   const RunOverrides& overrides) {
  ExperimentConfig cfg = load_config(config_path);
  apply_overrides(cfg, overrides);
  if (subcommand == "plan") return run_plan(cfg);
  if (subcommand == "simulate") return run_simulate(cfg);
  if (subcommand == "sweep") return run_sweep(cfg);
  if (subcommand == "bounds") return run_bounds(cfg);
  if (subcommand == "oracle-check") return run_oracle_check(cfg);
  fail(errc::invalid_argument, "unknown subcommand '" + subcommand + "'");
}

}  // namespace minplan
