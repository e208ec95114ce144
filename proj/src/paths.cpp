#include "attrition/paths.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace attrition {

State step(const State& s, double dt, double z1, double z2,
           const ModelParams& p) {
  const double sdt = std::sqrt(dt);
  const double gx = (p.mu_x - 0.5 * p.sigma_x * p.sigma_x) * dt +
                    p.sigma_x * sdt * z1;
  const double zy = p.rho * z1 + std::sqrt(1.0 - p.rho * p.rho) * z2;
  const double gy = (p.mu_y - 0.5 * p.sigma_y * p.sigma_y) * dt +
                    p.sigma_y * sdt * zy;
  return State{s.x * std::exp(gx), s.y * std::exp(gy)};
}

PathStepper::PathStepper(const State& s0, double dt, const ModelParams& p,
                         const RngStream& stream)
    : cur_(s0),
      prev_(s0),
      dt_(dt),
      drift_x_((p.mu_x - 0.5 * p.sigma_x * p.sigma_x) * dt),
      drift_y_((p.mu_y - 0.5 * p.sigma_y * p.sigma_y) * dt),
      vol_x_(p.sigma_x * std::sqrt(dt)),
      vol_y_(p.sigma_y * std::sqrt(dt)),
      rho_(p.rho),
      rho_comp_(std::sqrt(1.0 - p.rho * p.rho)),
      rng_(stream) {
  if (!(dt > 0.0)) throw std::invalid_argument("PathStepper: dt must be > 0");
}

void PathStepper::advance() {
  const auto [z1, z2] = rng_.normal_pair();
  prev_ = cur_;
  cur_.x = cur_.x * std::exp(drift_x_ + vol_x_ * z1);
  cur_.y = cur_.y * std::exp(drift_y_ + vol_y_ * (rho_ * z1 + rho_comp_ * z2));
  ++idx_;
}

Path simulate_path(const State& s0, double horizon, double dt,
                   const RngStream& stream, const ModelParams& p) {
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("simulate_path: horizon and dt must be > 0");
  }
  const auto n_steps = static_cast<std::size_t>(horizon / dt + 1e-9);
  Path path;
  path.dt = dt;
  path.horizon = horizon;
  path.states.reserve(n_steps + 1);
  PathStepper stepper(s0, dt, p, stream);
  path.states.push_back(stepper.state());
  for (std::size_t i = 0; i < n_steps; ++i) {
    stepper.advance();
    path.states.push_back(stepper.state());
  }
  return path;
}

std::optional<std::size_t> first_hit_preemption(const Path& path,
                                                const ModelParams& p,
                                                const DerivedConstants& k) {
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const auto& s = path.states[i];
    if (in_closed_preemption(s.x, s.y, p, k)) return i;
  }
  return std::nullopt;
}

void write_path_csv(const Path& path, const char* file) {
  std::FILE* f = std::fopen(file, "w");
  if (!f) throw std::runtime_error(std::string("cannot open ") + file);
  std::fprintf(f, "t,x,y\n");
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    std::fprintf(f, "%.10g,%.10g,%.10g\n", static_cast<double>(i) * path.dt,
                 path.states[i].x, path.states[i].y);
  }
  std::fclose(f);
}

}  // namespace attrition
