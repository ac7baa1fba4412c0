#pragma once

#include <string>

#include "core/config.hpp"

namespace minplan {

// Artifact-producing entry points behind the CLI subcommands. Each writes its
// files into cfg.out_dir (created if missing) and returns a process exit code:
// 0 on success, 1 when a verification subcommand found a mismatch. Everything
// else is reported by throwing Error.

int run_plan(const ExperimentConfig& cfg);          // plan_result.csv [+ expansion_trace.csv]
int run_simulate(const ExperimentConfig& cfg);      // trajectory.csv + reports.txt
int run_sweep(const ExperimentConfig& cfg);         // sweep.csv
int run_bounds(const ExperimentConfig& cfg);        // certificate_report.txt + bound_curves.csv
int run_oracle_check(const ExperimentConfig& cfg);  // oracle_check.csv

// Loads the config, applies overrides, and dispatches on the subcommand name
// (plan | simulate | sweep | bounds | oracle-check).
int run_experiment(const std::string& subcommand, const std::string& config_path,
                   const RunOverrides& overrides);

}  // namespace minplan
