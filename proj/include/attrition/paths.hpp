#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/rng.hpp"

namespace attrition {

struct State {
  double x = 0.0;
  double y = 0.0;
};

// one exact lognormal step; zero levels are absorbing
State step(const State& s, double dt, double z1, double z2,
           const ModelParams& p);

// Discretized trajectory on the uniform grid t = 0, dt, ..., with
// length = floor(horizon/dt) + 1.
struct Path {
  double dt = 0.0;
  double horizon = 0.0;
  std::vector<State> states;
};

// Incremental generator behind simulate_path. Consumers that stop early
// (hitting-time estimators, game playouts) advance it step by step instead
// of materializing a full horizon-length Path.
class PathStepper {
 public:
  PathStepper(const State& s0, double dt, const ModelParams& p,
              const RngStream& stream);

  void advance();

  const State& state() const { return cur_; }
  const State& prev() const { return prev_; }
  std::size_t index() const { return idx_; }
  double time() const { return static_cast<double>(idx_) * dt_; }

 private:
  State cur_;
  State prev_;
  std::size_t idx_ = 0;
  double dt_;
  double drift_x_;
  double drift_y_;
  double vol_x_;
  double vol_y_;
  double rho_;
  double rho_comp_;
  StreamRng rng_;
};

Path simulate_path(const State& s0, double horizon, double dt,
                   const RngStream& stream, const ModelParams& p);

// Smallest index whose state lies in the *closed* preemption set (leader and
// follower payoffs cross on the line itself); nullopt if never.
std::optional<std::size_t> first_hit_preemption(const Path& path,
                                                const ModelParams& p,
                                                const DerivedConstants& k);

void write_path_csv(const Path& path, const char* file);

}  // namespace attrition
