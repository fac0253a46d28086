#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "plaque/costs.hpp"
#include "plaque/scenario.hpp"
#include "plaque/twoscale.hpp"

namespace plaque::runner {

std::unique_ptr<growth::GrowthModel> make_model(const scenario::Scenario& s);
microflow::MicroState initial_micro(const scenario::Scenario& s);
parareal::Mode to_parareal_mode(scenario::RunMode mode);

struct Outcome {
  nlohmann::json report;  // wall-clock data only under "metadata"
  twoscale::TrajectoryRecord trajectory;
  costs::TableColumn column;
};

/// Serial reference trajectory of a scenario (not booked anywhere).
twoscale::TrajectoryRecord reference_trajectory(const scenario::Scenario& s);

/// Run the scenario's mode. Errors of the numerical modules propagate.
Outcome execute(const scenario::Scenario& s, const twoscale::TrajectoryRecord* reference = nullptr);

/// trajectory.csv, report.json, table.txt/table.csv and, for the field model,
/// field.csv and interface.csv.
void write_outputs(const scenario::Scenario& s, const Outcome& outcome, const std::filesystem::path& dir);

/// One live run per process count; failed runs become failure columns.
costs::CostTable sweep(const scenario::Scenario& s, const std::vector<int>& processes);

/// Footer-only table from the closed-form counts, with iteration counts supplied.
costs::CostTable formula_table(costs::Variant variant, int fine_steps, const std::vector<int>& processes,
                               const std::vector<int>& iterations);

}  // namespace plaque::runner
