#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bounds.hpp"
#include "core/system.hpp"

namespace minplan {

// Piecewise-linear comparison function from a strictly increasing table of
// (s, f(s)) points starting at (0, 0); extrapolates with the last segment's
// slope, and carries the exact piecewise inverse.
ComparisonFunction table_comparison(const std::vector<std::pair<double, double>>& points);

struct BoundsConfig {
  bool present = false;
  bool linear = false;
  LinearBoundParams linear_params;
  // Table form (general comparison functions); empty when linear.
  std::vector<std::pair<double, double>> alpha_w_table;
  std::vector<std::pair<double, double>> alpha_v_bar_table;
  std::vector<std::pair<double, double>> alpha_w_bar_table;

  AssumptionOneData to_assumption_data() const;
};

struct CertificateConfig {
  bool present = false;
  bool fit = false;  // fit (K, lambda) from the simulated run
  StabilityCertificate user;
};

struct OracleCheckConfig {
  int instances = 100;
  std::uint64_t seed = 7;
  std::int64_t cap = 10'000'000;
  std::vector<int> modes{2, 3};
  int max_dim = 3;
  std::vector<double> gammas{0.8, 0.95, 1.0};
};

// One experiment = one config file. Fields cover the union of the subcommands;
// per-subcommand requirements are validated by the runners.
struct ExperimentConfig {
  std::string system_name;
  nlohmann::json system_params;  // normalized object ({} when absent)
  double gamma = 1.0;
  std::vector<std::int64_t> budgets;
  std::vector<State> initial_states;
  int steps = 0;
  double delta = 1e-3;
  double gamma_star = 1.0;
  bool trace = false;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = "out";
  BoundsConfig bounds;
  CertificateConfig certificate;
  OracleCheckConfig oracle;

  // Canonical one-line echo of everything above; embedded in artifact headers.
  std::string resolved_json() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
};

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& ov);

// Instantiates the configured system (name + params; random seeds default to
// the experiment seed).
SwitchedSystem make_system_from_config(const ExperimentConfig& cfg);

}  // namespace minplan
