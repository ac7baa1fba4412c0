// Command-line front end. Deliberately a pure consumer of the C API in
// include/minplan.h: it exercises the same surface external callers get.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "minplan.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimistic finite-horizon planning for switched discrete-time systems"};
  app.set_version_flag("--version", std::string(minplan_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;

  const struct {
    const char* name;
    const char* desc;
  } subcommands[] = {
      {"plan", "run one search and write plan_result.csv (+ expansion_trace.csv with trace)"},
      {"simulate", "closed-loop receding-horizon run: trajectory.csv + reports.txt"},
      {"sweep", "running-cost grid over initial states x budgets: sweep.csv"},
      {"bounds", "certificate arithmetic for linear decay data: report + curves"},
      {"oracle-check", "cross-check the planner against exhaustive enumeration"},
  };
  for (const auto& sc : subcommands) {
    CLI::App* sub = app.add_subcommand(sc.name, sc.desc);
    sub->add_option("--config", config_path, "experiment config file (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config out_dir)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--threads", threads, "worker thread override (sweep)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const bool have_out = sub->count("--out") > 0;
  const bool have_seed = sub->count("--seed") > 0;
  const bool have_threads = sub->count("--threads") > 0;

  int exit_code = 0;
  const minplan_status st = minplan_run_experiment(
      sub->get_name().c_str(), config_path.c_str(), have_out ? out_dir.c_str() : nullptr,
      have_seed ? &seed : nullptr, have_threads ? &threads : nullptr, &exit_code);
  if (st != MINPLAN_OK) {
    std::fprintf(stderr, "minplan: error: %s: %s\n", minplan_status_name(st),
                 minplan_last_error());
    return (st == MINPLAN_ERR_CONFIG || st == MINPLAN_ERR_INVALID_ARGUMENT) ? kExitUsage
                                                                            : kExitRuntime;
  }
  if (exit_code != 0) {
    std::fprintf(stderr, "minplan: %s: verification found mismatches (see artifacts)\n",
                 sub->get_name().c_str());
    return kExitCheckFailed;
  }
  return kExitOk;
}
