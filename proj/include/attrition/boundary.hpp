#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/paths.hpp"
#include "attrition/rng.hpp"
#include "attrition/stats.hpp"

namespace attrition {

// Stopping boundary b(x) separating continuation from attrition.
//
//   Exponential    b(x) = y* - (y* - y_bar) * exp(-gamma (x - x_bar)),
//                  the one-parameter family fitted by calibrate_gamma;
//                  requires y_p < y* and y_bar > y_p (x_bar defined).
//   ConstantYStar  b == y*; the constraint never binds (y* <= y_p), or the
//                  exponential anchor x_bar does not exist.
//   Empty          y* <= 0: no continuation region at all, b == y*.
struct BoundarySpec {
  enum class Kind { Exponential, ConstantYStar, Empty };
  Kind kind = Kind::ConstantYStar;
  double gamma = 0.0;
  DerivedConstants consts;
};

// Selects the boundary family for the given constants. gamma is required
// (and only used) in the Exponential regime.
BoundarySpec make_boundary(const DerivedConstants& k,
                           std::optional<double> gamma);

double eval_boundary(const BoundarySpec& b, double x);

// Preemption if strictly above the preemption line, else Attrition on or
// above b(x), else Continuation.
Region classify_region(double x, double y, const ModelParams& p,
                       const DerivedConstants& k, const BoundarySpec& b);

// Proposition-style pointwise bounds the fitted family must respect:
// min(y_p, y*) <= b(x) <= y* and b(x) >= min(y_bar, preemption line).
bool boundary_bounds_ok(const BoundarySpec& b, const ModelParams& p,
                        double x_max, double dx = 0.25);

struct ResidualEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
};

// Monte Carlo estimate of the discounted waiting-cost integral accumulated
// below the candidate boundary, started on the boundary point (x0, b(x0))
// and stopped on first entry of the closed preemption set or first time
// Y >= y*. Zero (within noise) characterizes a correctly placed boundary;
// locally too high gives a positive value, too low a negative one.
// Throws std::invalid_argument if the starting point lies strictly inside
// the preemption set.
ResidualEstimate residual(const BoundarySpec& b, double x0,
                          std::size_t n_paths, double dt, double horizon,
                          const RngStream& stream, const ModelParams& p,
                          const DerivedConstants& k);

struct AnchorReport {
  double x0 = 0.0;
  double y0 = 0.0;
  // false when the ansatz point (x0, b(x0)) sits on/above the preemption
  // line, where the stopping problem resolves immediately and the residual
  // carries no information about gamma
  bool active = true;
  double residual = 0.0;
  double stderr_ = 0.0;
};

struct CalibrationResult {
  bool applicable = true;  // false when the regime calls for ConstantYStar
  bool feasible = false;   // all active anchors within 2*stderr of zero
  double gamma = 0.0;
  double objective = 0.0;
  bool bounds_ok = false;
  std::vector<AnchorReport> anchors;
  std::string message;
};

struct CalibrationSettings {
  std::size_t n_paths = 3000;  // per anchor
  double dt = 0.01;
  double horizon = 100.0;
  std::uint64_t seed = 1;
  double gamma_lo = 1e-4;
  double gamma_hi = 10.0;
  double tol = 1e-4;  // golden-section interval tolerance on gamma
};

// Fits gamma by minimizing the inverse-variance weighted sum of squared
// anchor residuals with a golden-section search. All residual evaluations
// reuse the same per-(anchor, path) streams, so the objective is a
// deterministic function of gamma (common random numbers).
CalibrationResult calibrate_gamma(const std::vector<double>& x_grid,
                                  const ModelParams& p,
                                  const DerivedConstants& k,
                                  const CalibrationSettings& settings);

// Value of stopping optimally before the preemption set, estimated by
// stopping each simulated path at the first grid state on/above b or inside
// the closed preemption set. Horizon truncation pays the never-stopping
// value -c0/r. Throws if s0 lies strictly inside the preemption set.
MeanStderr constrained_value_mc(const State& s0, const BoundarySpec& b,
                                std::size_t n_paths, double dt, double horizon,
                                const RngStream& stream, const ModelParams& p,
                                const DerivedConstants& k);

}  // namespace attrition
