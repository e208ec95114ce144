#include "attrition/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace attrition {

BoundarySpec make_boundary(const DerivedConstants& k,
                           std::optional<double> gamma) {
  BoundarySpec b;
  b.consts = k;
  if (k.y_star <= 0.0) {
    b.kind = BoundarySpec::Kind::Empty;
    return b;
  }
  if (k.y_star <= k.y_p || !k.x_bar.has_value()) {
    b.kind = BoundarySpec::Kind::ConstantYStar;
    return b;
  }
  if (!gamma.has_value()) {
    throw std::invalid_argument(
        "make_boundary: exponential regime requires gamma (calibrate first)");
  }
  if (!(*gamma > 0.0)) {
    throw std::invalid_argument("make_boundary: gamma must be > 0");
  }
  b.kind = BoundarySpec::Kind::Exponential;
  b.gamma = *gamma;
  return b;
}

double eval_boundary(const BoundarySpec& b, double x) {
  const auto& k = b.consts;
  switch (b.kind) {
    case BoundarySpec::Kind::Exponential:
      return k.y_star -
             (k.y_star - k.y_bar) * std::exp(-b.gamma * (x - *k.x_bar));
    case BoundarySpec::Kind::ConstantYStar:
    case BoundarySpec::Kind::Empty:
      return k.y_star;
  }
  return k.y_star;
}

Region classify_region(double x, double y, const ModelParams& p,
                       const DerivedConstants& k, const BoundarySpec& b) {
  if (in_preemption(x, y, p, k)) return Region::Preemption;
  if (y >= eval_boundary(b, x)) return Region::Attrition;
  return Region::Continuation;
}

bool boundary_bounds_ok(const BoundarySpec& b, const ModelParams& p,
                        double x_max, double dx) {
  const auto& k = b.consts;
  const double floor_band = std::min(k.y_p, k.y_star);
  for (double x = 0.0; x <= x_max + 1e-12; x += dx) {
    const double bx = eval_boundary(b, x);
    if (bx < floor_band - 1e-9 || bx > k.y_star + 1e-9) return false;
    const double lower = std::min(k.y_bar, preemption_line(x, p, k));
    if (bx < lower - 1e-9) return false;
  }
  return true;
}

namespace {

// Integrates 1{Y < b(X)} e^{-rt} (Y - y_bar) dt along one path until the
// closed preemption set or {Y >= y*} is reached (left-endpoint rule).
double residual_one_path(const BoundarySpec& b, const State& s0, double dt,
                         std::size_t max_steps, const RngStream& stream,
                         const ModelParams& p, const DerivedConstants& k) {
  PathStepper stepper(s0, dt, p, stream);
  double acc = 0.0;
  for (std::size_t i = 0; i < max_steps; ++i) {
    const State& s = stepper.state();
    if (in_closed_preemption(s.x, s.y, p, k)) break;
    if (s.y >= b.consts.y_star) break;
    if (s.y < eval_boundary(b, s.x)) {
      acc += std::exp(-p.r * stepper.time()) * (s.y - k.y_bar) * dt;
    }
    stepper.advance();
  }
  return acc;
}

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
};

// Golden-section minimizer; f assumed unimodal-ish on [lo, hi].
template <typename F>
GoldenResult golden_section(F&& f, double lo, double hi, double tol) {
  const double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

}  // namespace

ResidualEstimate residual(const BoundarySpec& b, double x0,
                          std::size_t n_paths, double dt, double horizon,
                          const RngStream& stream, const ModelParams& p,
                          const DerivedConstants& k) {
  if (n_paths < 1) throw std::invalid_argument("residual: n_paths >= 1");
  const double y0 = eval_boundary(b, x0);
  if (in_preemption(x0, y0, p, k)) {
    std::ostringstream os;
    os << "residual: starting point (" << x0 << ", " << y0
       << ") lies inside the preemption set";
    throw std::invalid_argument(os.str());
  }
  const auto max_steps = static_cast<std::size_t>(horizon / dt + 1e-9);
  std::vector<double> vals(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    vals[i] = residual_one_path(b, State{x0, y0}, dt, max_steps,
                                stream.substream(i), p, k);
  }
  const auto ms = mean_stderr(vals);
  return ResidualEstimate{ms.mean, ms.stderr_, n_paths};
}

CalibrationResult calibrate_gamma(const std::vector<double>& x_grid,
                                  const ModelParams& p,
                                  const DerivedConstants& k,
                                  const CalibrationSettings& settings) {
  CalibrationResult out;
  if (x_grid.empty()) {
    throw std::invalid_argument("calibrate_gamma: x_grid must be non-empty");
  }
  if (!(k.y_p < k.y_star) || !k.x_bar.has_value()) {
    out.applicable = false;
    out.message =
        "exponential boundary not applicable (y* <= y_p or x_bar undefined); "
        "use the constant-y* boundary";
    return out;
  }

  const double x_max =
      1.5 * *std::max_element(x_grid.begin(), x_grid.end());

  const auto bound_ok = [&](double gamma) {
    BoundarySpec b = make_boundary(k, gamma);
    return boundary_bounds_ok(b, p, x_max);
  };

  // The lower-bound check fails for large gamma (the ansatz dips under the
  // preemption line near x = 0); shrink the bracket to the feasible part.
  double lo = settings.gamma_lo;
  double hi = settings.gamma_hi;
  if (!bound_ok(lo)) {
    out.message = "no gamma in the bracket satisfies the boundary bounds";
    return out;
  }
  if (!bound_ok(hi)) {
    double good = lo, bad = hi;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (good + bad);
      (bound_ok(mid) ? good : bad) = mid;
    }
    hi = good;
  }

  const auto per_anchor = [&](double gamma, std::size_t ai) {
    BoundarySpec b = make_boundary(k, gamma);
    const double x0 = x_grid[ai];
    AnchorReport rep;
    rep.x0 = x0;
    rep.y0 = eval_boundary(b, x0);
    if (rep.y0 >= preemption_line(x0, p, k)) {
      // boundary point on/above the line: the game there resolves at once,
      // the integral is empty
      rep.active = false;
      return rep;
    }
    const RngStream anchor_stream{settings.seed, ai * 1000003ULL};
    const auto est = residual(b, x0, settings.n_paths, settings.dt,
                              settings.horizon, anchor_stream, p, k);
    rep.residual = est.value;
    rep.stderr_ = est.stderr_;
    return rep;
  };

  const auto objective = [&](double gamma) {
    double obj = 0.0;
    for (std::size_t ai = 0; ai < x_grid.size(); ++ai) {
      const AnchorReport rep = per_anchor(gamma, ai);
      if (!rep.active) continue;
      const double w = 1.0 / std::max(rep.stderr_ * rep.stderr_, 1e-12);
      obj += w * rep.residual * rep.residual;
    }
    return obj;
  };

  const auto best = golden_section(objective, lo, hi, settings.tol);
  out.gamma = best.x;
  out.objective = best.fx;
  out.bounds_ok = bound_ok(best.x);

  out.feasible = out.bounds_ok;
  for (std::size_t ai = 0; ai < x_grid.size(); ++ai) {
    AnchorReport rep = per_anchor(best.x, ai);
    if (rep.active && std::abs(rep.residual) > 2.0 * rep.stderr_) {
      out.feasible = false;
    }
    out.anchors.push_back(rep);
  }
  if (!out.feasible && out.message.empty()) {
    out.message =
        "no gamma in the bracket brings all anchor residuals within "
        "2*stderr of zero";
  }
  return out;
}

MeanStderr constrained_value_mc(const State& s0, const BoundarySpec& b,
                                std::size_t n_paths, double dt, double horizon,
                                const RngStream& stream, const ModelParams& p,
                                const DerivedConstants& k) {
  if (in_preemption(s0.x, s0.y, p, k)) {
    throw std::invalid_argument(
        "constrained_value_mc: start lies inside the preemption set");
  }
  const auto max_steps = static_cast<std::size_t>(horizon / dt + 1e-9);
  std::vector<double> vals(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    PathStepper stepper(s0, dt, p, stream.substream(i));
    double v = -p.c0 / p.r;  // never-stopping value if the loop runs out
    for (std::size_t j = 0; j <= max_steps; ++j) {
      const State& s = stepper.state();
      const bool stop = in_closed_preemption(s.x, s.y, p, k) ||
                        s.y >= eval_boundary(b, s.x);
      if (stop) {
        v = leader_value(stepper.time(), s.y, p);
        break;
      }
      if (j == max_steps) break;
      stepper.advance();
    }
    vals[i] = v;
  }
  return mean_stderr(vals);
}

}  // namespace attrition
