#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attrition/boundary.hpp"
#include "attrition/model.hpp"
#include "attrition/rng.hpp"

using namespace attrition;

namespace {

ModelParams table1() {
  ModelParams p;
  p.mu_x = 0.04;
  p.mu_y = 0.04;
  p.sigma_x = 0.25;
  p.sigma_y = 0.25;
  p.rho = 0.4;
  p.r = 0.1;
  p.c0 = 3.5;
  p.cA = 4.5;
  p.cB = 5.0;
  p.inv = 100.0;
  return p;
}

bool any_violation_mentions(const std::vector<std::string>& v,
                            const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validate_params accepts the base parameter set") {
  CHECK(validate_params(table1()).empty());
}

TEST_CASE("validate_params flags r at the drift boundary") {
  auto p = table1();
  p.r = 0.04;  // equals mu_y
  const auto v = validate_params(p);
  REQUIRE(!v.empty());
  CHECK(any_violation_mentions(v, "r > max(0, mu_x, mu_y)"));
}

TEST_CASE("validate_params flags perfect correlation") {
  auto p = table1();
  p.rho = 1.0;
  const auto v = validate_params(p);
  REQUIRE(!v.empty());
  CHECK(any_violation_mentions(v, "|rho| < 1"));
}

TEST_CASE("validate_params flags negative capitalized switching cost") {
  auto p = table1();
  p.cA = 50.0;  // (cB - cA)/r + I = -350
  const auto v = validate_params(p);
  CHECK(any_violation_mentions(v, "(cB - cA)/r + I >= 0"));
}

TEST_CASE("derived constants at the base parameters") {
  const auto p = table1();
  const auto k = derive_constants(p);

  // positive quadratic root and the closed-form thresholds, all checked
  // against hand evaluation
  CHECK(k.beta1 == doctest::Approx(1.6543).epsilon(1e-4));
  CHECK(k.beta1 > 1.0);
  CHECK(std::abs(fundamental_quadratic(k.beta1, p)) < 1e-12);
  CHECK(k.y_star == doctest::Approx(17.45).epsilon(0.001));
  CHECK(k.y_p == doctest::Approx(6.3).epsilon(1e-12));
  CHECK(k.y_bar == doctest::Approx(11.5).epsilon(1e-12));
  REQUIRE(k.x_bar.has_value());
  CHECK(*k.x_bar == doctest::Approx(5.2).epsilon(1e-12));

  // the other root of the quadratic is rejected
  const double a = 0.5 * p.sigma_y * p.sigma_y;
  const double b = p.mu_y - a;
  const double other = -b / a - k.beta1;  // roots sum to -b/a
  CHECK(other < 1.0);

  // constraint-binding regime of the base case
  CHECK(k.y_star > k.y_p);
  // beta1 * mu_y < r forces y_bar < y_star whenever y_star > 0
  CHECK(k.beta1 * p.mu_y < p.r);
  CHECK(k.y_bar < k.y_star);
}

TEST_CASE("derive_constants rejects invalid parameters") {
  auto p = table1();
  p.r = 0.02;
  CHECK_THROWS_AS(derive_constants(p), std::invalid_argument);
}

TEST_CASE("zero capitalized project value collapses both thresholds") {
  auto p = table1();
  p.cA = 2.0;                      // keep (cB - cA)/r + I >= 0
  p.cB = p.c0 - p.r * p.inv;       // I + (cB - c0)/r = 0
  REQUIRE(validate_params(p).empty());
  const auto k = derive_constants(p);
  CHECK(k.y_star == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(k.y_bar == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(!k.x_bar.has_value());  // y_bar <= y_p here
}

TEST_CASE("payoff functions at hand-evaluated points") {
  const auto p = table1();

  CHECK(leader_value(0.0, 8.0, p) == doctest::Approx(-16.67).epsilon(6e-4));
  CHECK(leader_value(0.0, 11.5, p) ==
        doctest::Approx(41.6666666667).epsilon(1e-9));
  CHECK(leader_value(1e9, 123.0, p) == doctest::Approx(-35.0).epsilon(1e-12));

  CHECK(follower_value(0.0, 6.0, p) == doctest::Approx(55.0).epsilon(1e-12));
  CHECK(follower_value(0.0, 0.0, p) == doctest::Approx(-45.0).epsilon(1e-12));
  CHECK(follower_value(1e9, 7.0, p) == doctest::Approx(-35.0).epsilon(1e-12));

  CHECK(simultaneous_value(0.0, p) == doctest::Approx(-135.0).epsilon(1e-12));
  CHECK(simultaneous_value(1e9, p) == doctest::Approx(-35.0).epsilon(1e-12));

  // the follower never prefers joint switching under the base costs
  CHECK(follower_value(0.0, 0.0, p) - simultaneous_value(0.0, p) ==
        doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("preemption membership at hand-evaluated points") {
  const auto p = table1();
  const auto k = derive_constants(p);

  CHECK(preemption_line(6.0, p, k) == doctest::Approx(12.3).epsilon(1e-12));
  CHECK(!in_preemption(6.0, 8.0, p, k));
  CHECK(in_preemption(6.0, 14.0, p, k));
  // the line itself is not in the open set
  CHECK(!in_preemption(0.0, k.y_p, p, k));
  CHECK(in_closed_preemption(0.0, k.y_p, p, k));
}

TEST_CASE("leader and follower values agree exactly on the preemption line") {
  const auto p = table1();
  const auto k = derive_constants(p);
  for (double x : {0.0, 0.5, 2.0, 6.0, 11.0, 40.0, 250.0}) {
    const double y = preemption_line(x, p, k);
    const double lv = leader_value(0.0, y, p);
    const double fv = follower_value(0.0, x, p);
    CHECK(std::abs(lv - fv) <=
          1e-10 * std::max({std::abs(lv), std::abs(fv), 1.0}));
  }
}

TEST_CASE("region classification against the fitted boundary") {
  const auto p = table1();
  const auto k = derive_constants(p);
  const auto b = make_boundary(k, 0.0984);

  CHECK(eval_boundary(b, 6.0) == doctest::Approx(11.95).epsilon(5e-4));
  CHECK(classify_region(6.0, 8.0, p, k, b) == Region::Continuation);
  CHECK(classify_region(6.0, 12.0, p, k, b) == Region::Attrition);
  CHECK(classify_region(6.0, 14.0, p, k, b) == Region::Preemption);
}

TEST_CASE("classification partitions the quadrant") {
  const auto p = table1();
  const auto k = derive_constants(p);
  const auto b = make_boundary(k, 0.0984);

  StreamRng rng(RngStream{20240811, 0});
  for (int i = 0; i < 2000; ++i) {
    const double x = 40.0 * rng.uniform();
    const double y = 40.0 * rng.uniform();
    const auto region = classify_region(x, y, p, k, b);
    const bool in_p = in_preemption(x, y, p, k);
    const bool above_b = y >= eval_boundary(b, x);
    if (in_p) {
      CHECK(region == Region::Preemption);
    } else if (above_b) {
      CHECK(region == Region::Attrition);
    } else {
      CHECK(region == Region::Continuation);
    }
  }

  // just below the boundary, and outside the preemption set, waiting rules
  for (double x = *k.x_bar; x < 30.0; x += 0.7) {
    const double eps = 1e-7;
    const double y = eval_boundary(b, x) - eps;
    CHECK(classify_region(x, y, p, k, b) == Region::Continuation);
    CHECK(classify_region(x, y + eps, p, k, b) != Region::Continuation);
  }
}

TEST_CASE("payoff monotonicity") {
  const auto p = table1();
  double prev = leader_value(0.0, 0.0, p);
  for (double y = 0.5; y < 30.0; y += 0.5) {
    const double cur = leader_value(0.0, y, p);
    CHECK(cur > prev);
    prev = cur;
  }
  prev = follower_value(0.0, 0.0, p);
  for (double x = 0.5; x < 30.0; x += 0.5) {
    const double cur = follower_value(0.0, x, p);
    CHECK(cur > prev);
    prev = cur;
  }
  // decreasing in t while the bracket term is positive
  CHECK(leader_value(1.0, 14.0, p) < leader_value(0.0, 14.0, p));
  CHECK(follower_value(1.0, 6.0, p) < follower_value(0.0, 6.0, p));
}

TEST_CASE("quadratic root and threshold ordering on random valid parameters") {
  StreamRng rng(RngStream{7, 7});
  int tested = 0;
  while (tested < 300) {
    ModelParams p;
    p.r = 0.02 + 0.18 * rng.uniform();
    p.mu_x = -0.05 + (p.r + 0.04) * rng.uniform();
    p.mu_y = -0.05 + (p.r + 0.04) * rng.uniform();
    if (p.mu_x >= p.r || p.mu_y >= p.r) continue;
    p.sigma_x = 0.05 + 0.5 * rng.uniform();
    p.sigma_y = 0.05 + 0.5 * rng.uniform();
    p.rho = -0.95 + 1.9 * rng.uniform();
    p.c0 = 5.0 * rng.uniform();
    p.cA = p.c0 * rng.uniform();  // keeps (c0-cA)/r + I >= 0
    p.cB = 10.0 * rng.uniform();
    p.inv = 1.0 + 150.0 * rng.uniform();
    if (!validate_params(p).empty()) continue;
    ++tested;

    const auto k = derive_constants(p);
    CHECK(k.beta1 > 1.0);
    CHECK(std::abs(fundamental_quadratic(k.beta1, p)) < 1e-12);
    CHECK(k.y_p >= 0.0);
    if (k.y_star > 0.0) CHECK(k.y_bar < k.y_star);
    if (k.x_bar.has_value()) CHECK(k.y_bar > k.y_p);
  }
}
