#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace attrition {

// The ten economic/stochastic primitives. Monetary quantities are raw
// currency units, time is in years.
struct ModelParams {
  double mu_x = 0.0;     // drift of X (1/time)
  double mu_y = 0.0;     // drift of Y (1/time)
  double sigma_x = 0.0;  // volatility of X (1/sqrt(time))
  double sigma_y = 0.0;  // volatility of Y (1/sqrt(time))
  double rho = 0.0;      // instantaneous correlation
  double r = 0.0;        // discount rate (1/time)
  double c0 = 0.0;       // duopoly running cost (currency/time)
  double cA = 0.0;       // market-A monopoly running cost (currency/time)
  double cB = 0.0;       // market-B monopoly running cost (currency/time)
  double inv = 0.0;      // sunk switching cost (currency)
};

enum class Dynamics { Stochastic, Deterministic };

// Returns every violated invariant with the offending values; empty == ok.
std::vector<std::string> validate_params(const ModelParams& p,
                                         Dynamics dyn = Dynamics::Stochastic);

// Closed-form thresholds computed once per parameter set.
struct DerivedConstants {
  double beta1 = 0.0;   // positive root (>1) of the fundamental quadratic
  double y_star = 0.0;  // unconstrained stopping threshold for Y
  double y_p = 0.0;     // preemption-line intercept
  double y_bar = 0.0;   // level where the drift of the leader payoff flips
  std::optional<double> x_bar;  // x with (x_bar, y_bar) on the preemption line
};

// fundamental quadratic Q(beta) = sigma_y^2/2 * beta(beta-1) + mu_y*beta - r
double fundamental_quadratic(double beta, const ModelParams& p);

// Throws std::invalid_argument when validate_params reports violations.
DerivedConstants derive_constants(const ModelParams& p,
                                  Dynamics dyn = Dynamics::Stochastic);

// time-0 discounted payoff of the firm switching alone at time t, state y
inline double leader_value(double t, double y, const ModelParams& p) {
  return -p.c0 / p.r +
         std::exp(-p.r * t) *
             (y / (p.r - p.mu_y) - (p.cB - p.c0) / p.r - p.inv);
}

// payoff of the firm that stays after the opponent switched at time t
inline double follower_value(double t, double x, const ModelParams& p) {
  return -p.c0 / p.r +
         std::exp(-p.r * t) * (x / (p.r - p.mu_x) - (p.cA - p.c0) / p.r);
}

// payoff when both switch at time t
inline double simultaneous_value(double t, const ModelParams& p) {
  return -p.c0 / p.r - std::exp(-p.r * t) * p.inv;
}

// y-level of the preemption line at x; above it the leader payoff exceeds
// the follower payoff
inline double preemption_line(double x, const ModelParams& p,
                              const DerivedConstants& k) {
  return k.y_p + x * (p.r - p.mu_y) / (p.r - p.mu_x);
}

// strict: the open preemption set
inline bool in_preemption(double x, double y, const ModelParams& p,
                          const DerivedConstants& k) {
  return y > preemption_line(x, p, k);
}

// closed: includes the line itself (where leader and follower values agree)
inline bool in_closed_preemption(double x, double y, const ModelParams& p,
                                 const DerivedConstants& k) {
  return y >= preemption_line(x, p, k);
}

enum class Region { Preemption, Attrition, Continuation };
const char* region_name(Region r);

}  // namespace attrition
