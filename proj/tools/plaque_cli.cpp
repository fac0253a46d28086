// Command-line front end: run a scenario, sweep over process counts, or
// print/write the shipped presets.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "plaque/errors.hpp"
#include "plaque/runner.hpp"
#include "plaque/scenario.hpp"

namespace {

using plaque::scenario::Scenario;

struct Common {
  std::string scenario_path;
  std::string preset_name;
  std::string mode;
  std::string stopping;
  std::string out;
  int processes = 0;
  int threads = -1;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* file = cmd->add_option("--scenario", c.scenario_path, "scenario JSON file");
  auto* pre = cmd->add_option("--preset", c.preset_name, "built-in scenario (ode_paper, pde_paper)");
  file->excludes(pre);
  cmd->add_option("--mode", c.mode, "serial | parareal | reusage | heuristic");
  cmd->add_option("--stopping", c.stopping, "fine | coarse");
  cmd->add_option("--threads", c.threads, "concurrent fine sweeps (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "output directory");
}

Scenario load(const Common& c) {
  Scenario s;
  if (!c.scenario_path.empty()) {
    s = plaque::scenario::load(c.scenario_path);
  } else if (!c.preset_name.empty()) {
    s = plaque::scenario::preset(c.preset_name);
  } else {
    throw plaque::ConfigError("give --scenario FILE or --preset NAME");
  }
  if (!c.mode.empty()) s.mode = plaque::scenario::parse_mode(c.mode);
  if (!c.stopping.empty()) s.stopping = plaque::scenario::parse_stopping(c.stopping);
  if (c.processes > 0) s.schedule.processes = c.processes;
  if (c.threads >= 0) s.threads = c.threads;
  if (!c.out.empty()) s.out_dir = c.out;
  s.validate();
  return s;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream f(file);
  if (!f) throw plaque::Error("cannot write " + file.string());
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-in-time two-scale plaque growth"};
  app.require_subcommand(1);

  Common run_args;
  auto* run = app.add_subcommand("run", "run one scenario");
  add_common(run, run_args);
  run->add_option("--P", run_args.processes, "number of coarse intervals / processes")->check(CLI::PositiveNumber);

  Common sweep_args;
  std::vector<int> sweep_p;
  std::vector<int> sweep_k;
  bool formula = false;
  int formula_steps = 1000;
  std::string variant = "parareal";
  auto* sweep = app.add_subcommand("sweep", "one run per process count, aggregated into a table");
  add_common(sweep, sweep_args);
  sweep->add_option("--P", sweep_p, "process counts")->required()->delimiter(',');
  sweep->add_flag("--formula", formula, "closed-form counts only, iteration counts from --k");
  sweep->add_option("--k", sweep_k, "iteration count per process count (with --formula)")->delimiter(',');
  sweep->add_option("--N_l", formula_steps, "fine steps (with --formula)")->check(CLI::PositiveNumber);
  sweep->add_option("--variant", variant, "parareal | reusage | heuristic (with --formula)");

  std::string preset_dir;
  auto* presets = app.add_subcommand("presets", "list the built-in scenarios");
  presets->add_option("--write", preset_dir, "write each preset as NAME.json into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const Scenario s = load(run_args);
      const auto outcome = plaque::runner::execute(s);
      plaque::runner::write_outputs(s, outcome, s.out_dir);
      const auto& r = outcome.report;
      std::printf("%s/%s P=%d N_l=%d k_par=%d micro=%lld speedup=%.2f value=%.8f -> %s\n",
                  r["model"].get<std::string>().c_str(), r["mode"].get<std::string>().c_str(), r["P"].get<int>(),
                  r["N_l"].get<int>(), r["k_par"].get<int>(), r["micro_problems"].get<long long>(),
                  r["speedup"].get<double>(), r["final_value"].get<double>(), s.out_dir.c_str());
      return 0;
    }
    if (*sweep) {
      plaque::costs::CostTable table;
      std::string out_dir = sweep_args.out.empty() ? "out" : sweep_args.out;
      if (formula) {
        const auto mode = plaque::scenario::parse_mode(variant);
        const auto v = mode == plaque::scenario::RunMode::reusage     ? plaque::costs::Variant::reusage
                       : mode == plaque::scenario::RunMode::heuristic ? plaque::costs::Variant::heuristic
                                                                      : plaque::costs::Variant::standard;
        table = plaque::runner::formula_table(v, formula_steps, sweep_p, sweep_k);
      } else {
        const Scenario s = load(sweep_args);
        out_dir = s.out_dir;
        table = plaque::runner::sweep(s, sweep_p);
      }
      std::filesystem::create_directories(out_dir);
      const std::string text = plaque::costs::render_text(table);
      write_text(std::filesystem::path(out_dir) / "table.txt", text);
      write_text(std::filesystem::path(out_dir) / "table.csv", plaque::costs::render_csv(table));
      std::cout << text;
      bool any_failed = false;
      for (const auto& col : table.columns) any_failed = any_failed || !col.failure.empty();
      return any_failed ? 3 : 0;
    }
    if (*presets) {
      for (const auto& name : plaque::scenario::preset_names()) {
        const auto doc = plaque::scenario::to_json(plaque::scenario::preset(name));
        if (preset_dir.empty()) {
          std::cout << name << "\n";
        } else {
          std::filesystem::create_directories(preset_dir);
          write_text(std::filesystem::path(preset_dir) / (name + ".json"), doc.dump(2) + "\n");
        }
      }
      return 0;
    }
  } catch (const plaque::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
