#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsearch/config.hpp"
#include "dsearch/error.hpp"
#include "dsearch/harness.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 1;
  bool trace = false;

  dsearch::CommandOptions options() const { return {seed, out, jobs, trace}; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Run config (JSON)")->required();
  cmd->add_option("--seed", c.seed, "Run a single seed instead of the config's seed list");
  cmd->add_option("--out", c.out, "Output directory (overrides output_dir)");
  cmd->add_option("--jobs", c.jobs, "Worker threads, capped by DSEARCH_MAX_JOBS")->check(CLI::PositiveNumber);
  cmd->add_flag("--trace", c.trace, "Write per-step lineage and value traces");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree search for inference-time alignment of toy diffusion models"};
  app.require_subcommand(1);
  Common common;

  auto* run = app.add_subcommand("run", "Run the configured plan for each seed");
  add_common(run, common);

  auto* sweep = app.add_subcommand("sweep", "Sweep one plan parameter");
  add_common(sweep, common);
  std::string axis;
  std::string values;
  sweep->add_option("--axis", axis, "C_bar | K | M | schedule-kind | r_r")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  auto* compare = app.add_subcommand("compare", "Compare algorithms at a matched budget");
  add_common(compare, common);
  std::string algorithms = "best-of-n,svdd,smc,dsearch";
  std::optional<double> c_bar;
  bool no_pretrained = false;
  compare->add_option("--algorithms", algorithms, "Comma-separated algorithm names")->capture_default_str();
  compare->add_option("--c-bar", c_bar, "Per-output denoiser budget (overrides c_bar)");
  compare->add_flag("--no-pretrained", no_pretrained, "Omit the unguided baseline row");

  auto* diagnose = app.add_subcommand("diagnose", "Value/final-reward correlation at checkpoints");
  add_common(diagnose, common);
  std::string checkpoints;
  std::string estimator = "plan";
  diagnose->add_option("--checkpoints", checkpoints, "Comma-separated diffusion times");
  diagnose->add_option("--estimator", estimator, "plan | perfect")->capture_default_str();

  auto* table = app.add_subcommand("schedule-table", "Print the predicted per-step schedule");
  add_common(table, common);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = dsearch::load_config(common.config);
    const auto opts = common.options();
    if (*run) {
      const auto out = dsearch::cmd_run(config, opts);
      for (const auto& f : out.result_files) std::cout << f.string() << "\n";
      std::cout << out.summary_file.string() << "\n";
    } else if (*sweep) {
      std::cout << dsearch::cmd_sweep(config, dsearch::parse_sweep_axis(axis), split_list(values), opts).csv();
    } else if (*compare) {
      std::vector<dsearch::Algorithm> algs;
      for (const auto& a : split_list(algorithms)) algs.push_back(dsearch::parse_algorithm(a));
      const auto result = dsearch::cmd_compare(config, algs, c_bar, opts, !no_pretrained);
      std::cout << result.csv();
      if (!result.budgets_matched()) {
        std::cerr << "warning: denoiser-call totals differ by " << result.max_call_ratio
                  << "x across methods\n";
      }
    } else if (*diagnose) {
      std::vector<int> ts;
      for (const auto& s : split_list(checkpoints)) ts.push_back(std::stoi(s));
      dsearch::DiagnoseEstimator kind;
      if (estimator == "plan") {
        kind = dsearch::DiagnoseEstimator::kPlan;
      } else if (estimator == "perfect") {
        kind = dsearch::DiagnoseEstimator::kPerfect;
      } else {
        dsearch::fail(dsearch::ErrorKind::kInvalidConfiguration, "unknown estimator '" + estimator + "'",
                      "estimator");
      }
      std::cout << dsearch::cmd_diagnose(config, ts, opts, kind).csv();
    } else if (*table) {
      std::cout << dsearch::cmd_schedule_table(config, opts);
    }
  } catch (const std::exception& e) {
    std::cerr << dsearch::error_record(e) << std::endl;
    return 2;
  }
  return 0;
}
