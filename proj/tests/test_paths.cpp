#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "attrition/model.hpp"
#include "attrition/paths.hpp"
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

}  // namespace

TEST_CASE("zero is absorbing for the exact step") {
  const auto p = table1();
  const auto s = step(State{0.0, 0.0}, 0.01, 1.3, -0.7, p);
  CHECK(s.x == 0.0);
  CHECK(s.y == 0.0);

  const auto s2 = step(State{0.0, 8.0}, 0.01, 1.3, -0.7, p);
  CHECK(s2.x == 0.0);
  CHECK(s2.y > 0.0);
}

TEST_CASE("drift-only step matches the lognormal exponent") {
  const auto p = table1();
  const double dt = 0.25;
  const auto s = step(State{6.0, 8.0}, dt, 0.0, 0.0, p);
  const double gx = (p.mu_x - 0.5 * p.sigma_x * p.sigma_x) * dt;
  const double gy = (p.mu_y - 0.5 * p.sigma_y * p.sigma_y) * dt;
  CHECK(s.x == doctest::Approx(6.0 * std::exp(gx)).epsilon(1e-14));
  CHECK(s.y == doctest::Approx(8.0 * std::exp(gy)).epsilon(1e-14));
}

TEST_CASE("single-step mean matches the GBM moment identity") {
  const auto p = table1();
  const double dt = 0.01;
  const int n = 100000;
  StreamRng rng(RngStream{11, 0});
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [z1, z2] = rng.normal_pair();
    const double x1 = step(State{6.0, 8.0}, dt, z1, z2, p).x;
    sum += x1;
    sumsq += x1 * x1;
  }
  const double mean = sum / n;
  const double var = (sumsq - n * mean * mean) / (n - 1);
  const double se = std::sqrt(var / n);
  CHECK(std::abs(mean - 6.0 * std::exp(p.mu_x * dt)) < 3.0 * se);
}

TEST_CASE("identical stream reproduces the identical path") {
  const auto p = table1();
  const RngStream rs{42, 7};
  const auto a = simulate_path(State{6.0, 8.0}, 1.0, 0.01, rs, p);
  const auto b = simulate_path(State{6.0, 8.0}, 1.0, 0.01, rs, p);
  REQUIRE(a.states.size() == b.states.size());
  CHECK(a.states.size() == 101);  // floor(horizon/dt) + 1
  CHECK(std::memcmp(a.states.data(), b.states.data(),
                    a.states.size() * sizeof(State)) == 0);

  // different stream ids decouple
  const auto c = simulate_path(State{6.0, 8.0}, 1.0, 0.01, RngStream{42, 8}, p);
  CHECK(c.states.back().x != a.states.back().x);
}

TEST_CASE("log-increment correlation matches the driving correlation") {
  const auto p = table1();
  const int n = 100000;
  const double dt = 0.01;
  const auto path =
      simulate_path(State{6.0, 8.0}, n * dt, dt, RngStream{123, 0}, p);
  REQUIRE(path.states.size() == static_cast<std::size_t>(n) + 1);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(path.states[i + 1].x / path.states[i].x);
    const double dy = std::log(path.states[i + 1].y / path.states[i].y);
    sx += dx;
    sy += dy;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double mx = sx / n, my = sy / n;
  const double vx = sxx / n - mx * mx;
  const double vy = syy / n - my * my;
  const double cxy = sxy / n - mx * my;
  const double corr = cxy / std::sqrt(vx * vy);
  CHECK(corr == doctest::Approx(p.rho).epsilon(0.05));  // 0.4 +- 0.02

  // covariance entries against sigma^2 dt within 3 standard errors
  const double se_vx = vx * std::sqrt(2.0 / n);
  CHECK(std::abs(vx - p.sigma_x * p.sigma_x * dt) < 3.0 * se_vx);
  const double se_vy = vy * std::sqrt(2.0 / n);
  CHECK(std::abs(vy - p.sigma_y * p.sigma_y * dt) < 3.0 * se_vy);
  const double target_cxy = p.rho * p.sigma_x * p.sigma_y * dt;
  const double se_cxy = std::sqrt((vx * vy + cxy * cxy) / n);
  CHECK(std::abs(cxy - target_cxy) < 3.0 * se_cxy);
}

TEST_CASE("axis start stays on the axis") {
  const auto p = table1();
  const auto path =
      simulate_path(State{0.0, 8.0}, 1.0, 0.01, RngStream{5, 0}, p);
  for (const auto& s : path.states) {
    CHECK(s.x == 0.0);
    CHECK(s.y > 0.0);
  }
}

TEST_CASE("terminal moments over many paths") {
  const auto p = table1();
  const double horizon = 1.0, dt = 0.01;
  const int n = 100000;
  double sx = 0, sxx = 0, sy = 0, syy = 0, sdx = 0, sdxx = 0;
  for (int i = 0; i < n; ++i) {
    const auto path = simulate_path(
        State{6.0, 8.0}, horizon, dt,
        RngStream{99, static_cast<std::uint64_t>(i)}, p);
    const auto& last = path.states.back();
    const double gx = last.x / 6.0;
    const double gy = last.y / 8.0;
    sx += gx;
    sxx += gx * gx;
    sy += gy;
    syy += gy * gy;
    const double disc = std::exp(-p.r * horizon) * last.x;
    sdx += disc;
    sdxx += disc * disc;
  }
  const auto check_mean = [&](double s, double ss, double target) {
    const double mean = s / n;
    const double var = (ss - n * mean * mean) / (n - 1);
    const double se = std::sqrt(var / n);
    CHECK(std::abs(mean - target) < 3.0 * se);
  };
  check_mean(sx, sxx, std::exp(p.mu_x * horizon));
  check_mean(sy, syy, std::exp(p.mu_y * horizon));

  // discounted level is a supermartingale under r > mu_x
  const double mean_disc = sdx / n;
  const double var_disc = (sdxx - n * mean_disc * mean_disc) / (n - 1);
  const double se_disc = std::sqrt(var_disc / n);
  CHECK(mean_disc <= 6.0 + 3.0 * se_disc);
}

TEST_CASE("first preemption hit uses the closed boundary") {
  const auto p = table1();
  const auto k = derive_constants(p);

  Path flat;
  flat.dt = 0.01;
  flat.horizon = 0.02;
  flat.states = {State{6.0, 8.0}, State{6.0, 8.0}, State{6.0, 8.0}};
  CHECK(!first_hit_preemption(flat, p, k).has_value());

  Path crossing;
  crossing.dt = 0.01;
  crossing.horizon = 0.02;
  crossing.states = {State{6.0, 8.0}, State{6.0, 12.3}, State{6.0, 13.0}};
  auto hit = first_hit_preemption(crossing, p, k);
  REQUIRE(hit.has_value());
  CHECK(*hit == 1);  // the line itself counts

  Path above;
  above.dt = 0.01;
  above.horizon = 0.01;
  above.states = {State{6.0, 14.0}, State{6.0, 15.0}};
  hit = first_hit_preemption(above, p, k);
  REQUIRE(hit.has_value());
  CHECK(*hit == 0);
}
