#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/paths.hpp"

#include <json.hpp>

namespace attrition {

enum class RunMode { Stochastic, Deterministic, CalibrateOnly, ValueOnly };

const char* run_mode_name(RunMode m);

struct BoundaryChoice {
  enum class Kind { Calibrate, FixedGamma, Auto };
  Kind kind = Kind::Calibrate;
  double gamma = 0.0;                      // FixedGamma only
  std::vector<double> x_grid = {2.0, 6.0, 10.0, 20.0};
};

struct ExperimentConfig {
  ModelParams params;
  State s0{6.0, 8.0};
  std::size_t n_paths = 3000;
  double dt = 0.01;
  double horizon = 100.0;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::Stochastic;
  BoundaryChoice boundary;
  std::size_t calib_paths = 3000;  // paths per calibration anchor
};

bool operator==(const BoundaryChoice& a, const BoundaryChoice& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// empty == ok; one entry per violated constraint
std::vector<std::string> validate_config(const ExperimentConfig& c);

// Flat key = value lines ('#' comments) or a JSON object; the format is
// auto-detected from the first non-space character.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string serialize_config(const ExperimentConfig& c);  // flat format
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace attrition
