#pragma once

#include <vector>

#include "attrition/equilibrium.hpp"
#include "attrition/model.hpp"
#include "attrition/paths.hpp"
#include "attrition/rng.hpp"

namespace attrition {

// Zero-volatility version of the game: sigma_x = sigma_y = 0, mu_y >= mu_x
// (market B is the one that can overtake), mu_y > 0, Y0 > 0. The state moves
// on the deterministic ray (X0 e^{mu_x t}, Y0 e^{mu_y t}), so the whole game
// reduces to two dates: the attrition start t_bar and the preemption start
// t_p.

// deterministic state at time t
State det_state(const State& s0, double t, const ModelParams& p);

// First time the ray reaches the closed preemption set; +infinity when it
// never does (equal drifts with the NPV gap below the preemption threshold).
double det_preemption_time(const State& s0, const ModelParams& p,
                           const DerivedConstants& k);

// max(0, ln(y_bar/Y0)/mu_y): the unconstrained optimum of the leader payoff.
double det_attrition_start(const State& s0, const ModelParams& p,
                           const DerivedConstants& k);

// Whether the leader payoff peak is reached strictly before preemption, so
// an attrition phase with positive hazard opens up.
bool det_attrition_occurs(const State& s0, const ModelParams& p,
                          const DerivedConstants& k);

// equilibrium hazard rate along the ray: zero before t_bar and after t_p
double det_hazard_rate(const State& s0, double t, const ModelParams& p,
                       const DerivedConstants& k);

struct DetHazardPoint {
  double t = 0.0;
  double rate = 0.0;
  double cum_hazard = 0.0;
  double leader_val = 0.0;
  double follower_val = 0.0;
};

struct DetTimeline {
  double t_bar = 0.0;
  double t_p = 0.0;  // +infinity when preemption never starts
  bool attrition_occurs = false;
  std::vector<DetHazardPoint> hazard_curve;
};

// Piecewise-linear table of the integrated hazard on [t_bar, t_p), built on
// the dt grid with geometric refinement toward the t_p singularity, where
// the integral diverges.
class DetHazardTable {
 public:
  DetHazardTable(const State& s0, const ModelParams& p,
                 const DerivedConstants& k, double dt);

  // cumulative hazard at time t (clamped to the table end)
  double cumulative(double t) const;
  // firing time with unit-exponential threshold e; stops that would need
  // more hazard than the table holds land at the table end, which sits
  // against t_p where the integral diverges
  double invert(double e) const;

  const std::vector<double>& times() const { return ts_; }
  const std::vector<double>& hazards() const { return lams_; }

 private:
  std::vector<double> ts_;
  std::vector<double> lams_;
};

struct DetPlayoutResult {
  GameOutcome outcome;
  DetTimeline timeline;
};

// One playout of the deterministic equilibrium: exponential clocks against
// the integrated hazard when an attrition phase exists (the divergent
// integral makes the stop land before t_p with probability one), otherwise
// the boundary coin flip at t_p. Throws on regime violations
// (mu_x > mu_y, mu_y <= 0, Y0 <= 0).
DetPlayoutResult det_playout(const State& s0, const ModelParams& p,
                             const DerivedConstants& k, double dt,
                             const RngStream& game_stream);

void write_timeline_csv(const DetTimeline& tl, const char* file);

}  // namespace attrition
