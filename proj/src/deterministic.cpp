#include "attrition/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace attrition {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_regime(const State& s0, const ModelParams& p) {
  if (p.mu_x > p.mu_y) {
    throw std::domain_error(
        "deterministic model: mu_x > mu_y (market A outgrowing market B, "
        "bounded preemption window) is not supported");
  }
  if (!(p.mu_y > 0.0)) {
    throw std::domain_error("deterministic model: requires mu_y > 0");
  }
  if (!(s0.y > 0.0)) {
    throw std::domain_error("deterministic model: requires Y0 > 0");
  }
}

// NPV gap between leading and following at time t, minus the preemption
// threshold; >= 0 exactly on/inside the closed preemption set
double preemption_gap(const State& s0, double t, const ModelParams& p) {
  return s0.y * std::exp(p.mu_y * t) / (p.r - p.mu_y) -
         s0.x * std::exp(p.mu_x * t) / (p.r - p.mu_x) -
         ((p.cB - p.cA) / p.r + p.inv);
}

}  // namespace

State det_state(const State& s0, double t, const ModelParams& p) {
  return State{s0.x * std::exp(p.mu_x * t), s0.y * std::exp(p.mu_y * t)};
}

double det_preemption_time(const State& s0, const ModelParams& p,
                           const DerivedConstants& k) {
  (void)k;
  check_regime(s0, p);
  if (preemption_gap(s0, 0.0, p) >= 0.0) return 0.0;

  if (p.mu_y == p.mu_x) {
    const double c = s0.y / (p.r - p.mu_y) - s0.x / (p.r - p.mu_x);
    if (c <= 0.0) return kInf;
    const double rhs = (p.cB - p.cA) / p.r + p.inv;
    return std::log(rhs / c) / p.mu_y;
  }

  // mu_y > mu_x: the gap is eventually increasing and tends to +infinity,
  // so a unique first crossing from below exists
  double hi = 1.0;
  int guard = 0;
  while (preemption_gap(s0, hi, p) < 0.0) {
    hi *= 2.0;
    if (++guard > 200) return kInf;
  }
  double lo = hi * 0.5 >= 1.0 ? hi * 0.5 : 0.0;
  if (preemption_gap(s0, lo, p) >= 0.0) lo = 0.0;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (preemption_gap(s0, mid, p) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

double det_attrition_start(const State& s0, const ModelParams& p,
                           const DerivedConstants& k) {
  check_regime(s0, p);
  if (s0.y >= k.y_bar) return 0.0;
  return std::log(k.y_bar / s0.y) / p.mu_y;
}

bool det_attrition_occurs(const State& s0, const ModelParams& p,
                          const DerivedConstants& k) {
  check_regime(s0, p);
  if (s0.y >= k.y_bar) {
    return !in_closed_preemption(s0.x, s0.y, p, k);
  }
  const double lhs = k.y_bar / (p.r - p.mu_y) - (p.cB - p.cA) / p.r - p.inv;
  const double rhs = s0.x / (p.r - p.mu_x) *
                     std::pow(k.y_bar / s0.y, p.mu_x / p.mu_y);
  return lhs < rhs;
}

double det_hazard_rate(const State& s0, double t, const ModelParams& p,
                       const DerivedConstants& k) {
  const State s = det_state(s0, t, p);
  if (s.y < k.y_bar) return 0.0;
  const double den = s.x / (p.r - p.mu_x) - (s.y - k.y_p) / (p.r - p.mu_y);
  if (den <= 0.0) return kInf;
  return (s.y - k.y_bar) / den;
}

DetHazardTable::DetHazardTable(const State& s0, const ModelParams& p,
                               const DerivedConstants& k, double dt) {
  const double t_bar = det_attrition_start(s0, p, k);
  const double t_p = det_preemption_time(s0, p, k);

  ts_.push_back(t_bar);
  lams_.push_back(0.0);
  double t = t_bar;
  double lam = 0.0;
  // 37.5 exceeds any unit-exponential draw representable from a 53-bit
  // uniform, so the table always covers the sampled thresholds
  const double lam_target = 37.5;
  const double t_cap = std::isfinite(t_p) ? t_p : t_bar + 1e7;

  while (lam < lam_target) {
    double h = dt;
    if (std::isfinite(t_p)) {
      h = std::min(h, (t_p - t) / 8.0);
      if (t_p - t <= 1e-10 * std::max(1.0, t_p)) break;
    } else if (t >= t_cap) {
      break;
    }
    const double rate_mid = det_hazard_rate(s0, t + 0.5 * h, p, k);
    lam += rate_mid * h;
    t += h;
    ts_.push_back(t);
    lams_.push_back(lam);
  }
}

double DetHazardTable::cumulative(double t) const {
  if (t <= ts_.front()) return 0.0;
  if (t >= ts_.back()) return lams_.back();
  const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  const auto i = static_cast<std::size_t>(it - ts_.begin()) - 1;
  const double w = (t - ts_[i]) / (ts_[i + 1] - ts_[i]);
  return lams_[i] + w * (lams_[i + 1] - lams_[i]);
}

double DetHazardTable::invert(double e) const {
  if (e <= 0.0) return ts_.front();
  if (e >= lams_.back()) return ts_.back();
  const auto it = std::upper_bound(lams_.begin(), lams_.end(), e);
  const auto i = static_cast<std::size_t>(it - lams_.begin()) - 1;
  const double dl = lams_[i + 1] - lams_[i];
  const double w = dl > 0.0 ? (e - lams_[i]) / dl : 0.0;
  return ts_[i] + w * (ts_[i + 1] - ts_[i]);
}

namespace {

DetTimeline build_timeline(const State& s0, const ModelParams& p,
                           const DerivedConstants& k, double dt,
                           const DetHazardTable* table) {
  DetTimeline tl;
  tl.t_bar = det_attrition_start(s0, p, k);
  tl.t_p = det_preemption_time(s0, p, k);
  tl.attrition_occurs =
      det_attrition_occurs(s0, p, k) && tl.t_bar < tl.t_p;

  const double t_end =
      std::isfinite(tl.t_p) ? tl.t_p
                            : (table ? table->times().back() : tl.t_bar);
  for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
    DetHazardPoint pt;
    pt.t = t;
    pt.rate = t >= tl.t_bar && t < tl.t_p ? det_hazard_rate(s0, t, p, k) : 0.0;
    pt.cum_hazard = table ? table->cumulative(t) : 0.0;
    const State s = det_state(s0, t, p);
    pt.leader_val = leader_value(t, s.y, p);
    pt.follower_val = follower_value(t, s.x, p);
    tl.hazard_curve.push_back(pt);
  }
  return tl;
}

}  // namespace

DetPlayoutResult det_playout(const State& s0, const ModelParams& p,
                             const DerivedConstants& k, double dt,
                             const RngStream& game_stream) {
  check_regime(s0, p);
  DetPlayoutResult res;
  StreamRng game_rng(game_stream);
  const double e_i = game_rng.exponential();
  const double e_j = game_rng.exponential();

  const double t_p = det_preemption_time(s0, p, k);
  const double t_bar = det_attrition_start(s0, p, k);
  const bool attrition = det_attrition_occurs(s0, p, k) && t_bar < t_p;

  if (attrition) {
    DetHazardTable table(s0, p, k, dt);
    res.timeline = build_timeline(s0, p, k, dt, &table);

    const double e_min = std::min(e_i, e_j);
    const double tau = table.invert(e_min);
    const State stop = det_state(s0, tau, p);

    GameOutcome& out = res.outcome;
    out.mode = OutcomeMode::AttritionStop;
    out.stop_time = tau;
    out.stop_state = stop;
    out.leader_id = e_i < e_j ? 1 : 2;
    const double lv = leader_value(tau, stop.y, p);
    const double fv = follower_value(tau, stop.x, p);
    out.payoff_1 = out.leader_id == 1 ? lv : fv;
    out.payoff_2 = out.leader_id == 2 ? lv : fv;
    out.cum_hazard = e_min;
    out.residual_mass = std::exp(-e_min);
    out.attrition_time = std::max(0.0, tau - t_bar);
    return res;
  }

  // no attrition phase: the ray runs straight to the preemption start,
  // where it touches the line and the boundary coin flip decides the roles
  res.timeline = build_timeline(s0, p, k, dt, nullptr);
  if (!std::isfinite(t_p)) {
    throw std::logic_error(
        "det_playout: no attrition and no preemption; unreachable under the "
        "supported regime");
  }
  State hit = det_state(s0, t_p, p);
  // a positive-time crossing touches the line exactly; a start already
  // inside the closed set resolves where it stands
  if (t_p > 0.0) hit.y = preemption_line(hit.x, p, k);
  GameOutcome out;
  out.stop_time = t_p;
  out.stop_state = hit;
  out.cum_hazard = 0.0;
  out.residual_mass = 1.0;
  const double alpha = preemption_intensity(hit.x, hit.y, p);
  const auto draw = preemption_outcome(alpha, alpha, 0.0, 0.0, game_rng);
  switch (draw.role) {
    case PreemptionRole::LeaderI:
      out.mode = OutcomeMode::PreemptionLeaderFollower;
      out.leader_id = 1;
      out.payoff_1 = leader_value(t_p, hit.y, p);
      out.payoff_2 = follower_value(t_p, hit.x, p);
      break;
    case PreemptionRole::LeaderJ:
      out.mode = OutcomeMode::PreemptionLeaderFollower;
      out.leader_id = 2;
      out.payoff_1 = follower_value(t_p, hit.x, p);
      out.payoff_2 = leader_value(t_p, hit.y, p);
      break;
    case PreemptionRole::Simultaneous:
      out.mode = OutcomeMode::PreemptionSimultaneous;
      out.leader_id = 0;
      out.payoff_1 = simultaneous_value(t_p, p);
      out.payoff_2 = out.payoff_1;
      break;
  }
  res.outcome = out;
  return res;
}

void write_timeline_csv(const DetTimeline& tl, const char* file) {
  std::FILE* f = std::fopen(file, "w");
  if (!f) throw std::runtime_error(std::string("cannot open ") + file);
  std::fprintf(f, "t,hazard,cumulative_hazard,L_t,F_t\n");
  for (const auto& pt : tl.hazard_curve) {
    std::fprintf(f, "%.10g,%.10g,%.10g,%.10g,%.10g\n", pt.t, pt.rate,
                 pt.cum_hazard, pt.leader_val, pt.follower_val);
  }
  std::fclose(f);
}

}  // namespace attrition
