#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "attrition/boundary.hpp"
#include "attrition/model.hpp"
#include "attrition/paths.hpp"
#include "attrition/rng.hpp"

namespace attrition {

// Markovian hazard that keeps both firms indifferent inside the attrition
// region: |drift of L| / (F - L), zero below the boundary. Throws when
// called on/inside the closed preemption set, where F - L <= 0.
double attrition_rate(double x, double y, const ModelParams& p,
                      const DerivedConstants& k, const BoundarySpec& b);

// Instantaneous grab intensity (L-F)/(L-M) on {L > F}, zero elsewhere. The
// discount factors cancel, so only the state matters.
double preemption_intensity(double x, double y, const ModelParams& p);

// Probability that the firm playing stage probability a stops first against
// an opponent playing stage probability b, in the repeated grab game.
double mu_leader(double a, double b);
// Probability both stop at once.
double mu_both(double a, double b);

struct OutcomeProbs {
  double lambda_L_i = 0.0;
  double lambda_L_j = 0.0;
  double lambda_M = 0.0;
};

enum class PreemptionRole { LeaderI, LeaderJ, Simultaneous };

struct PreemptionDraw {
  OutcomeProbs probs;      // unconditional masses, summing to the survival
                           // product (1-G_i^-)(1-G_j^-)
  PreemptionRole role;     // sampled conditional on reaching unstopped
};

// Resolves the stopping race at the preemption set. alpha_i = alpha_j = 0
// (a boundary hit) splits the surviving mass into a fair coin with no
// simultaneous stopping.
PreemptionDraw preemption_outcome(double alpha_i, double alpha_j,
                                  double g_i_minus, double g_j_minus,
                                  StreamRng& rng);

// Per-firm attrition bookkeeping along a playout.
struct HazardState {
  double cum_hazard_i = 0.0;
  double cum_hazard_j = 0.0;
  double threshold_i = 0.0;  // unit-exponential firing levels
  double threshold_j = 0.0;

  double g_i() const { return -std::expm1(-cum_hazard_i); }
  double g_j() const { return -std::expm1(-cum_hazard_j); }
};

enum class OutcomeMode {
  AttritionStop,
  PreemptionLeaderFollower,
  PreemptionSimultaneous,
  NoStopByHorizon
};
const char* outcome_mode_name(OutcomeMode m);

struct GameOutcome {
  OutcomeMode mode = OutcomeMode::NoStopByHorizon;
  double stop_time = 0.0;
  State stop_state;
  int leader_id = 0;  // 1 or 2, 0 when no leader (simultaneous / no stop)
  double payoff_1 = 0.0;  // time-0 discounted
  double payoff_2 = 0.0;
  double residual_mass = 1.0;    // per-firm 1 - G(tau_P-), preemption modes
  double cum_hazard = 0.0;       // per-firm hazard accumulated by the stop
  double attrition_time = 0.0;   // time spent in the attrition region
  std::size_t capped_steps = 0;  // hazard increments clipped at the cap
};

struct GameSettings {
  double dt = 0.01;
  double horizon = 100.0;
  // Per-step hazard increments are clipped here; the preemption hit on the
  // next grid point resolves such paths anyway, the cap only stops a single
  // near-boundary sample from overflowing.
  double hazard_cap = 50.0;
  // Quadrature points for the within-step hazard integral, taken along the
  // log-linear interpolant between grid states. One point is the plain
  // midpoint rule; more points keep the hazard of steps that cross the
  // attrition band in one jump, which the midpoint alone drops whenever both
  // evaluation states land outside the band.
  int hazard_substeps = 8;
};

struct StepRecord {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double rate = 0.0;
  double cum_hazard = 0.0;
  Region region = Region::Continuation;
};

// Plays one equilibrium path: hazard accumulation in the attrition region
// with exact within-step firing times, immediate resolution on the first
// grid state in the closed preemption set, horizon truncation at the
// never-stopping value. Rejects starts on the axes.
GameOutcome simulate_game(const State& s0, const BoundarySpec& b,
                          const ModelParams& p, const DerivedConstants& k,
                          const GameSettings& gs,
                          const RngStream& path_stream,
                          const RngStream& game_stream,
                          std::vector<StepRecord>* trace = nullptr);

struct CampaignSettings {
  std::size_t n_paths = 3000;
  double dt = 0.01;
  double horizon = 100.0;
  double hazard_cap = 50.0;
  int hazard_substeps = 8;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
};

// Embarrassingly parallel playouts; path i uses streams (seed, 2i) and
// (seed, 2i+1), so the result is independent of the worker count.
std::vector<GameOutcome> run_campaign(const State& s0, const BoundarySpec& b,
                                      const ModelParams& p,
                                      const DerivedConstants& k,
                                      const CampaignSettings& cs);

struct SimulationReport {
  std::size_t n_paths = 0;
  double share_preemption = 0.0;
  double share_preemption_simultaneous = 0.0;
  double share_attrition = 0.0;
  double share_nostop = 0.0;
  double mean_time_in_attrition_fraction = 0.0;
  double mean_equilibrium_value = 0.0;
  double value_stderr = 0.0;
  double immediate_investment_value = 0.0;
  double mean_residual_mass = 0.0;  // over preemption paths
  std::size_t hazard_cap_hits = 0;
  std::vector<State> scatter;  // stop states, no-stop paths excluded
  std::vector<OutcomeMode> scatter_modes;
};

SimulationReport aggregate(const std::vector<GameOutcome>& outcomes,
                           const ModelParams& p, const DerivedConstants& k,
                           const State& s0);

}  // namespace attrition
