#pragma once

#include <cstddef>
#include <string>

#include "attrition/boundary.hpp"
#include "attrition/config.hpp"
#include "attrition/equilibrium.hpp"

#include <json.hpp>

namespace attrition {

struct RunOptions {
  int workers = 0;        // 0 = hardware concurrency
  std::size_t dump_paths = 0;  // showcase trace files under <out>/paths/
};

nlohmann::json report_to_json(const SimulationReport& rep);
nlohmann::json calibration_to_json(const CalibrationResult& cal);
nlohmann::json constants_to_json(const DerivedConstants& k);

void write_scatter_csv(const SimulationReport& rep, const std::string& file);
void write_boundary_csv(const BoundarySpec& b, double x_max, double dx,
                        const std::string& file);
void write_regions_csv(const BoundarySpec& b, const ModelParams& p,
                       const DerivedConstants& k, double x_max, double dx,
                       const std::string& file);
void write_trace_csv(const std::vector<StepRecord>& trace,
                     const std::string& file);

// Executes the configured experiment and writes report.json plus the
// per-mode CSV outputs into out_dir. Returns 0 on success; on failure a
// single-line "error: <category>: <message>" goes to stderr and the return
// value is nonzero.
int run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                   const RunOptions& opts);

}  // namespace attrition
