#include "attrition/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace attrition {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<std::string> validate_params(const ModelParams& p, Dynamics dyn) {
  std::vector<std::string> out;
  for (double v : {p.mu_x, p.mu_y, p.sigma_x, p.sigma_y, p.rho, p.r, p.c0,
                   p.cA, p.cB, p.inv}) {
    if (!std::isfinite(v)) {
      out.push_back("all parameters must be finite");
      break;
    }
  }
  if (!(p.r > 0.0 && p.r > p.mu_x && p.r > p.mu_y)) {
    out.push_back("r > max(0, mu_x, mu_y) violated: r=" + fmt(p.r) +
                  ", mu_x=" + fmt(p.mu_x) + ", mu_y=" + fmt(p.mu_y));
  }
  if (dyn == Dynamics::Stochastic) {
    if (!(p.sigma_x > 0.0)) {
      out.push_back("sigma_x > 0 violated: sigma_x=" + fmt(p.sigma_x));
    }
    if (!(p.sigma_y > 0.0)) {
      out.push_back("sigma_y > 0 violated: sigma_y=" + fmt(p.sigma_y));
    }
    if (!(std::abs(p.rho) < 1.0)) {
      out.push_back("|rho| < 1 violated: rho=" + fmt(p.rho));
    }
  } else {
    if (p.sigma_x != 0.0 || p.sigma_y != 0.0) {
      out.push_back("deterministic dynamics require sigma_x = sigma_y = 0: "
                    "sigma_x=" +
                    fmt(p.sigma_x) + ", sigma_y=" + fmt(p.sigma_y));
    }
  }
  if (p.r > 0.0) {
    const double fm = (p.c0 - p.cA) / p.r + p.inv;
    if (!(fm >= 0.0)) {
      out.push_back("(c0 - cA)/r + I >= 0 violated: value=" + fmt(fm));
    }
    const double sw = (p.cB - p.cA) / p.r + p.inv;
    if (!(sw >= 0.0)) {
      out.push_back("(cB - cA)/r + I >= 0 violated: value=" + fmt(sw));
    }
  }
  return out;
}

double fundamental_quadratic(double beta, const ModelParams& p) {
  return 0.5 * p.sigma_y * p.sigma_y * beta * (beta - 1.0) + p.mu_y * beta -
         p.r;
}

DerivedConstants derive_constants(const ModelParams& p, Dynamics dyn) {
  const auto violations = validate_params(p, dyn);
  if (!violations.empty()) {
    std::string msg = "invalid parameters:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }

  DerivedConstants k;
  if (p.sigma_y > 0.0) {
    // Q(beta) = a*beta^2 + b*beta + c with a = sigma^2/2, b = mu - sigma^2/2,
    // c = -r. Stable form: compute q = -(b + sign(b)*sqrt(disc))/2 and take
    // whichever of q/a, c/q exceeds 1, avoiding cancellation when mu_y ~ 0.
    const double a = 0.5 * p.sigma_y * p.sigma_y;
    const double b = p.mu_y - a;
    const double c = -p.r;
    const double disc = b * b - 4.0 * a * c;  // > 0 since c < 0
    const double sd = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sd : -sd));
    const double r1 = q / a;
    const double r2 = c / q;
    k.beta1 = std::max(r1, r2);
  } else {
    // sigma_y = 0 collapses the quadratic to mu_y*beta - r
    if (!(p.mu_y > 0.0)) {
      throw std::invalid_argument(
          "derive_constants: sigma_y = 0 requires mu_y > 0 for a positive "
          "quadratic root");
    }
    k.beta1 = p.r / p.mu_y;
  }

  const double capitalized_cost = p.inv + (p.cB - p.c0) / p.r;
  k.y_star =
      k.beta1 / (k.beta1 - 1.0) * (p.r - p.mu_y) * capitalized_cost;
  k.y_p = (p.r - p.mu_y) * ((p.cB - p.cA) / p.r + p.inv);
  k.y_bar = p.cB - p.c0 + p.r * p.inv;
  if (k.y_bar > k.y_p) {
    k.x_bar = (k.y_bar - k.y_p) * (p.r - p.mu_x) / (p.r - p.mu_y);
  }
  return k;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::Preemption: return "preemption";
    case Region::Attrition: return "attrition";
    case Region::Continuation: return "continuation";
  }
  return "?";
}

}  // namespace attrition
