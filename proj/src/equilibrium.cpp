#include "attrition/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace attrition {

double attrition_rate(double x, double y, const ModelParams& p,
                      const DerivedConstants& k, const BoundarySpec& b) {
  if (in_closed_preemption(x, y, p, k)) {
    throw std::invalid_argument(
        "attrition_rate: state on/inside the closed preemption set");
  }
  if (y < eval_boundary(b, x)) return 0.0;
  const double den =
      x / (p.r - p.mu_x) - (y - k.y_p) / (p.r - p.mu_y);
  return (y - k.y_bar) / den;
}

double preemption_intensity(double x, double y, const ModelParams& p) {
  // e^{-rt} cancels between L-F and L-M
  const double num = y / (p.r - p.mu_y) - x / (p.r - p.mu_x) -
                     (p.cB - p.cA) / p.r - p.inv;
  if (num <= 0.0) return 0.0;
  const double den = y / (p.r - p.mu_y) - (p.cB - p.c0) / p.r;
  if (den <= 0.0) {
    throw std::invalid_argument(
        "preemption_intensity: L - M <= 0 while L > F (parameters violate "
        "the F >= M assumption)");
  }
  return num / den;
}

double mu_leader(double a, double b) {
  const double den = a + b - a * b;
  return a * (1.0 - b) / den;
}

double mu_both(double a, double b) {
  const double den = a + b - a * b;
  return a * b / den;
}

PreemptionDraw preemption_outcome(double alpha_i, double alpha_j,
                                  double g_i_minus, double g_j_minus,
                                  StreamRng& rng) {
  PreemptionDraw out;
  const double m = (1.0 - g_i_minus) * (1.0 - g_j_minus);
  double c_li, c_lj, c_m;
  if (alpha_i + alpha_j > 0.0) {
    c_li = mu_leader(alpha_i, alpha_j);
    c_lj = mu_leader(alpha_j, alpha_i);
    c_m = mu_both(alpha_i, alpha_j);
  } else {
    // boundary hit: equal right limits, fair coin, no simultaneous stop
    c_li = 0.5;
    c_lj = 0.5;
    c_m = 0.0;
  }
  out.probs.lambda_L_i = m * c_li;
  out.probs.lambda_L_j = m * c_lj;
  out.probs.lambda_M = m * c_m;
  const double u = rng.uniform();
  if (u < c_li) {
    out.role = PreemptionRole::LeaderI;
  } else if (u < c_li + c_lj) {
    out.role = PreemptionRole::LeaderJ;
  } else {
    out.role = PreemptionRole::Simultaneous;
  }
  return out;
}

const char* outcome_mode_name(OutcomeMode m) {
  switch (m) {
    case OutcomeMode::AttritionStop: return "attrition_stop";
    case OutcomeMode::PreemptionLeaderFollower:
      return "preemption_leader_follower";
    case OutcomeMode::PreemptionSimultaneous: return "preemption_simultaneous";
    case OutcomeMode::NoStopByHorizon: return "no_stop_by_horizon";
  }
  return "?";
}

namespace {

double interp_level(double a, double b, double frac) {
  if (a <= 0.0 || b <= 0.0) return a;  // absorbing zero / degenerate
  return a * std::pow(b / a, frac);
}

State interp_state(const State& a, const State& b, double frac) {
  return State{interp_level(a.x, b.x, frac), interp_level(a.y, b.y, frac)};
}

GameOutcome resolve_preemption(double t, const State& s, double cum_hazard,
                               const ModelParams& p, StreamRng& game_rng) {
  GameOutcome out;
  out.stop_time = t;
  out.stop_state = s;
  out.cum_hazard = cum_hazard;
  out.residual_mass = std::exp(-cum_hazard);
  const double alpha = preemption_intensity(s.x, s.y, p);
  const double g_minus = -std::expm1(-cum_hazard);
  const auto draw = preemption_outcome(alpha, alpha, g_minus, g_minus,
                                       game_rng);
  switch (draw.role) {
    case PreemptionRole::LeaderI:
      out.mode = OutcomeMode::PreemptionLeaderFollower;
      out.leader_id = 1;
      out.payoff_1 = leader_value(t, s.y, p);
      out.payoff_2 = follower_value(t, s.x, p);
      break;
    case PreemptionRole::LeaderJ:
      out.mode = OutcomeMode::PreemptionLeaderFollower;
      out.leader_id = 2;
      out.payoff_1 = follower_value(t, s.x, p);
      out.payoff_2 = leader_value(t, s.y, p);
      break;
    case PreemptionRole::Simultaneous:
      out.mode = OutcomeMode::PreemptionSimultaneous;
      out.leader_id = 0;
      out.payoff_1 = simultaneous_value(t, p);
      out.payoff_2 = out.payoff_1;
      break;
  }
  return out;
}

}  // namespace

GameOutcome simulate_game(const State& s0, const BoundarySpec& b,
                          const ModelParams& p, const DerivedConstants& k,
                          const GameSettings& gs,
                          const RngStream& path_stream,
                          const RngStream& game_stream,
                          std::vector<StepRecord>* trace) {
  if (!(s0.x > 0.0) || !(s0.y > 0.0)) {
    throw std::invalid_argument(
        "simulate_game: degenerate start on an axis (x0 = 0 or y0 = 0) has "
        "a bespoke equilibrium and is not simulated");
  }

  StreamRng game_rng(game_stream);
  HazardState hz;
  hz.threshold_i = game_rng.exponential();
  hz.threshold_j = game_rng.exponential();

  if (in_closed_preemption(s0.x, s0.y, p, k)) {
    return resolve_preemption(0.0, s0, 0.0, p, game_rng);
  }

  PathStepper stepper(s0, gs.dt, p, path_stream);
  const auto n_steps = static_cast<std::size_t>(gs.horizon / gs.dt + 1e-9);
  const double dt = gs.dt;
  const int n_sub = std::clamp(gs.hazard_substeps, 1, 16);
  const double h = dt / n_sub;

  double attrition_time = 0.0;
  std::size_t capped = 0;
  // symmetric equilibrium: both firms accumulate the same hazard
  double lam = 0.0;

  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t0 = stepper.time();
    const State left = stepper.state();
    stepper.advance();
    const State right = stepper.state();

    // hazard quadrature along the within-step interpolant
    double sub_rate[16];
    int sub_in_a = 0;
    double d_lam = 0.0;
    for (int j = 0; j < n_sub; ++j) {
      const State s =
          interp_state(left, right, (static_cast<double>(j) + 0.5) / n_sub);
      double rate = 0.0;
      if (!in_closed_preemption(s.x, s.y, p, k) &&
          s.y >= eval_boundary(b, s.x)) {
        ++sub_in_a;
        const double den =
            s.x / (p.r - p.mu_x) - (s.y - k.y_p) / (p.r - p.mu_y);
        rate = den > 0.0 ? (s.y - k.y_bar) / den
                         : std::numeric_limits<double>::infinity();
      }
      sub_rate[j] = rate;
      d_lam += rate * h;
    }
    if (d_lam > gs.hazard_cap) {
      d_lam = gs.hazard_cap;
      ++capped;
    }

    if (trace) {
      trace->push_back(StepRecord{t0, left.x, left.y, d_lam / dt, lam,
                                  classify_region(left.x, left.y, p, k, b)});
    }

    const double e_min = std::min(hz.threshold_i, hz.threshold_j);
    if (lam + d_lam >= e_min) {
      // invert the piecewise-constant hazard profile for the firing time
      const auto fire_offset = [&](double threshold) {
        double acc = lam;
        for (int j = 0; j < n_sub; ++j) {
          const double inc = sub_rate[j] * h;
          if (acc + inc >= threshold) {
            return static_cast<double>(j) * h +
                   (sub_rate[j] > 0.0 ? (threshold - acc) / sub_rate[j] : 0.0);
          }
          acc += inc;
        }
        return dt;
      };
      const bool fire_i = lam + d_lam >= hz.threshold_i;
      const bool fire_j = lam + d_lam >= hz.threshold_j;
      const double tf_i = fire_i ? fire_offset(hz.threshold_i)
                                 : std::numeric_limits<double>::infinity();
      const double tf_j = fire_j ? fire_offset(hz.threshold_j)
                                 : std::numeric_limits<double>::infinity();
      int leader;
      double offset;
      if (tf_i < tf_j) {
        leader = 1;
        offset = tf_i;
      } else if (tf_j < tf_i) {
        leader = 2;
        offset = tf_j;
      } else {  // exact tie has probability zero; break uniformly
        leader = game_rng.uniform() < 0.5 ? 1 : 2;
        offset = tf_i;
      }
      const double tau = t0 + offset;
      const State stop = interp_state(left, right, offset / dt);

      GameOutcome out;
      out.mode = OutcomeMode::AttritionStop;
      out.stop_time = tau;
      out.stop_state = stop;
      out.leader_id = leader;
      const double lv = leader_value(tau, stop.y, p);
      const double fv = follower_value(tau, stop.x, p);
      out.payoff_1 = leader == 1 ? lv : fv;
      out.payoff_2 = leader == 2 ? lv : fv;
      out.cum_hazard = std::min(e_min, lam + d_lam);
      out.residual_mass = std::exp(-out.cum_hazard);
      for (int j = 0; j < n_sub && j * h < offset; ++j) {
        if (sub_rate[j] > 0.0) attrition_time += std::min(h, offset - j * h);
      }
      out.attrition_time = attrition_time;
      out.capped_steps = capped;
      if (trace) {
        trace->push_back(StepRecord{tau, stop.x, stop.y, d_lam / dt,
                                    out.cum_hazard, Region::Attrition});
      }
      return out;
    }

    lam += d_lam;
    hz.cum_hazard_i = lam;
    hz.cum_hazard_j = lam;
    attrition_time += sub_in_a * h;

    if (in_closed_preemption(right.x, right.y, p, k)) {
      GameOutcome out =
          resolve_preemption(stepper.time(), right, lam, p, game_rng);
      out.attrition_time = attrition_time;
      out.capped_steps = capped;
      if (trace) {
        trace->push_back(StepRecord{stepper.time(), right.x, right.y, 0.0,
                                    lam, Region::Preemption});
      }
      return out;
    }
  }

  GameOutcome out;
  out.mode = OutcomeMode::NoStopByHorizon;
  out.stop_time = static_cast<double>(n_steps) * dt;
  out.stop_state = stepper.state();
  out.leader_id = 0;
  out.payoff_1 = -p.c0 / p.r;  // never-stopping value
  out.payoff_2 = out.payoff_1;
  out.cum_hazard = lam;
  out.residual_mass = std::exp(-lam);
  out.attrition_time = attrition_time;
  out.capped_steps = capped;
  return out;
}

std::vector<GameOutcome> run_campaign(const State& s0, const BoundarySpec& b,
                                      const ModelParams& p,
                                      const DerivedConstants& k,
                                      const CampaignSettings& cs) {
  std::vector<GameOutcome> outcomes(cs.n_paths);
  GameSettings gs;
  gs.dt = cs.dt;
  gs.horizon = cs.horizon;
  gs.hazard_cap = cs.hazard_cap;
  gs.hazard_substeps = cs.hazard_substeps;

  unsigned workers = cs.workers > 0
                         ? static_cast<unsigned>(cs.workers)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::size_t>(workers, std::max<std::size_t>(cs.n_paths, 1));

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      outcomes[i] = simulate_game(s0, b, p, k, gs,
                                  RngStream{cs.seed, 2 * i},
                                  RngStream{cs.seed, 2 * i + 1});
    }
  };

  if (workers <= 1) {
    run_range(0, cs.n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (cs.n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(cs.n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return outcomes;
}

SimulationReport aggregate(const std::vector<GameOutcome>& outcomes,
                           const ModelParams& p, const DerivedConstants& k,
                           const State& s0) {
  if (outcomes.empty()) {
    throw std::invalid_argument("aggregate: empty outcome list");
  }
  SimulationReport rep;
  rep.n_paths = outcomes.size();
  const double n = static_cast<double>(outcomes.size());

  std::size_t n_pre = 0, n_sim = 0, n_attr = 0, n_nostop = 0;
  double frac_sum = 0.0;
  double residual_sum = 0.0;
  std::size_t n_residual = 0;
  std::vector<double> values;
  values.reserve(outcomes.size());

  for (const auto& o : outcomes) {
    switch (o.mode) {
      case OutcomeMode::AttritionStop: ++n_attr; break;
      case OutcomeMode::PreemptionLeaderFollower: ++n_pre; break;
      case OutcomeMode::PreemptionSimultaneous:
        ++n_pre;
        ++n_sim;
        break;
      case OutcomeMode::NoStopByHorizon: ++n_nostop; break;
    }
    if (o.mode == OutcomeMode::PreemptionLeaderFollower ||
        o.mode == OutcomeMode::PreemptionSimultaneous) {
      residual_sum += o.residual_mass;
      ++n_residual;
    }
    if (o.stop_time > 0.0) frac_sum += o.attrition_time / o.stop_time;
    values.push_back(0.5 * (o.payoff_1 + o.payoff_2));
    rep.hazard_cap_hits += o.capped_steps;
    if (o.mode != OutcomeMode::NoStopByHorizon) {
      rep.scatter.push_back(o.stop_state);
      rep.scatter_modes.push_back(o.mode);
    }
  }

  rep.share_preemption = static_cast<double>(n_pre) / n;
  rep.share_preemption_simultaneous = static_cast<double>(n_sim) / n;
  rep.share_attrition = static_cast<double>(n_attr) / n;
  rep.share_nostop = static_cast<double>(n_nostop) / n;
  rep.mean_time_in_attrition_fraction = frac_sum / n;
  const auto ms = mean_stderr(values);
  rep.mean_equilibrium_value = ms.mean;
  rep.value_stderr = ms.stderr_;
  rep.immediate_investment_value = leader_value(0.0, s0.y, p);
  rep.mean_residual_mass =
      n_residual > 0 ? residual_sum / static_cast<double>(n_residual) : 0.0;
  (void)k;
  return rep;
}

}  // namespace attrition
