#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "twnet/scalar_wave.hpp"

using namespace twnet;
using namespace twnet::test;

TEST_CASE("wave speed is the secant slope") {
  CHECK(wave_speed(FluxSpec::quadratic(1), 0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  for (double a : {0.05, 0.2, 0.45}) CHECK(std::abs(wave_speed(FluxSpec::quadratic(2.3), a, 1 - a)) < 1e-15);
  const FluxSpec log = FluxSpec::logarithmic(1);
  const double hi = std::exp(-1.0);
  const double secant = (log.value(hi) - log.value(0.0)) / hi;
  CHECK(std::abs(wave_speed(log, 0.0, hi) - secant) < 1e-15);
  CHECK(std::abs(wave_speed(log, 0.0, hi) - 1.0) < 1e-15);
  CHECK_THROWS_AS(wave_speed(log, 0.4, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(wave_speed(log, 0.6, 0.4), std::invalid_argument);
}

TEST_CASE("reduced flux takes equal values at both end states") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    double a = u(rng);
    double b = u(rng);
    if (std::abs(a - b) < 1e-3) continue;
    if (a > b) std::swap(a, b);
    for (const Road& road : {quad_road(0.5 + u(rng), 1), log_road(0.5 + u(rng), 1)}) {
      const EndStates e = make_end_states(road, a, b);
      const ReducedFlux g(road, e);
      CHECK(std::abs(g.g(a) - g.g(b)) < 1e-12);
      for (double s : grid(a, b, 11)) CHECK(g.excess(s) >= -1e-15);
    }
  }
}

TEST_CASE("gamma vanishes where the diffusivity does") {
  const Road road = quad_road(1, 1, true);
  const ReducedFlux g(road, make_end_states(road, 0.0, 0.8));
  CHECK(g.gamma(0.0) == 0.0);
  CHECK(g.gamma(0.4) == doctest::Approx(g.excess(0.4) / 0.4));
}

TEST_CASE("logistic profile for the full density range") {
  const Road road = quad_road(1, 1);
  const Profile p = build_profile(road, make_end_states(road, 0.0, 1.0));
  CHECK(p(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double xi : grid(-10, 10, 41)) CHECK(std::abs(p(xi) - 1.0 / (1.0 + std::exp(-xi))) < 1e-14);
}

TEST_CASE("linear diffusivity profile is flat left of its degeneracy point") {
  const Road road = quad_road(1, 1, true);
  const Profile p = build_profile(road, make_end_states(road, 0.0, 0.8));
  CHECK(std::abs(p.nu_minus() + std::log(2.0)) < 1e-14);
  CHECK(std::isinf(p.nu_plus()));
  for (double xi : grid(-5, -std::log(2.0) - 1e-9, 20)) CHECK(p(xi) == 0.0);
  CHECK(p(-std::log(2.0) + 1e-3) > 0.0);
}

TEST_CASE("quadrature profile satisfies the profile equation") {
  const Road road = quad_road(1, 1);
  const EndStates e = make_end_states(road, 0.2, 0.6);
  const Profile p(quadrature_shape(road, e), e);
  CHECK(ode_residual(road, p, 20.0, 1000) <= 1e-8);
  CHECK(std::abs(p(0.0) - 0.4) < 1e-12);
}

TEST_CASE("profile equation holds across flux and diffusivity kinds") {
  const DiffusivitySpec square = DiffusivitySpec::tabulated([](double r) { return 2 * r * r; },
                                                            [](double r) { return 4 * r; });
  const Road tab{1, Orientation::Incoming, FluxSpec::quadratic(1), square};
  struct Case {
    Road road;
    double lo, hi;
  };
  const Case cases[] = {{quad_road(1, 1), 0.1, 0.7},         {quad_road(2, 0.5, true), 0.0, 0.9},
                        {quad_road(1, 2, true), 0.3, 0.6},   {log_road(1, 1), 0.0, 0.5},
                        {log_road(1, 4), 0.1575, 0.63},      {log_road(2, 1), 0.63, 1.0},
                        {tab, 0.0, 0.7}};
  for (const Case& c : cases) {
    const Profile p = build_profile(c.road, make_end_states(c.road, c.lo, c.hi));
    CHECK(ode_residual(c.road, p, 20.0, 1000) <= 1e-8);
  }
}

TEST_CASE("profiles are monotone and reach their end states") {
  const Road road = log_road(1, 1);
  const EndStates e = make_end_states(road, 0.1, 0.8);
  const Profile p = build_profile(road, e);
  double prev = -1.0;
  for (double xi : grid(-60, 60, 2001)) {
    const double v = p(xi);
    CHECK(v >= prev);
    CHECK(v >= e.lo);
    CHECK(v <= e.hi);
    prev = v;
  }
  for (double xi : grid(-5, 5, 101)) CHECK(p.slope(xi) > 0.0);
  CHECK(std::abs(p(-1e4) - e.lo) < 1e-12);
  CHECK(std::abs(p(1e4) - e.hi) < 1e-12);
}

TEST_CASE("normalization anchor shifts the profile") {
  for (const Road& road : {quad_road(1, 1), log_road(1, 2)}) {
    const EndStates e = make_end_states(road, 0.2, 0.7);
    const Profile base = build_profile(road, e);
    ProfileOptions opts;
    opts.anchor = 1.5;
    const Profile moved = build_profile(road, e, opts);
    for (double xi : grid(-10, 10, 81)) CHECK(std::abs(moved(xi + 1.5) - base(xi)) < 1e-10);
    CHECK(std::abs(base.locate(base(0.8)) - 0.8) < 1e-9);
  }
}

TEST_CASE("finite degeneracy points appear exactly when the diffusivity vanishes at a reached end") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DiffusivitySpec bump = DiffusivitySpec::tabulated([](double r) { return r * (1 - r); },
                                                          [](double r) { return 1 - 2 * r; });
  for (int k = 0; k < 60; ++k) {
    const int pick = k % 3;
    Road road = pick == 0 ? quad_road(0.5 + u(rng), 0.5 + u(rng), true)
                          : (pick == 1 ? quad_road(0.5 + u(rng), 0.5 + u(rng)) : quad_road(1, 1));
    if (pick == 2) road.diffusivity = bump;
    const double lo = u(rng) < 0.4 ? 0.0 : 0.3 * u(rng);
    const double hi = u(rng) < 0.4 ? 1.0 : 0.5 + 0.45 * u(rng);
    const EndStates e = make_end_states(road, lo, hi);
    const Profile p = build_profile(road, e);
    const bool left = road.diffusivity.vanishes_at_zero() && lo == 0.0;
    const bool right = road.diffusivity.vanishes_at_one() && hi == 1.0;
    CHECK(std::isfinite(p.nu_minus()) == left);
    CHECK(std::isfinite(p.nu_plus()) == right);
    CHECK(finite_nu_minus(road, e) == left);
    CHECK(finite_nu_plus(road, e) == right);
  }
}

TEST_CASE("boundary slope at the left degeneracy point") {
  const Road road = quad_road(1, 1, true);
  const BoundarySlopes b = boundary_slopes(road, make_end_states(road, 0.0, 0.8));
  REQUIRE(b.left);
  CHECK(std::abs(*b.left - 0.8) < 1e-14);
  CHECK_FALSE(b.right);

  const Road scaled = quad_road(2, 0.5, true);
  const BoundarySlopes s = boundary_slopes(scaled, make_end_states(scaled, 0.0, 0.6));
  REQUIRE(s.left);
  CHECK(std::abs(*s.left - 2 * 0.6 / 0.5) < 1e-13);

  const DiffusivitySpec square = DiffusivitySpec::tabulated([](double r) { return r * r; },
                                                            [](double r) { return 2 * r; });
  const Road flat{1, Orientation::Incoming, FluxSpec::quadratic(1), square};
  const BoundarySlopes f = boundary_slopes(flat, make_end_states(flat, 0.0, 0.5));
  REQUIRE(f.left);
  CHECK(*f.left == std::numeric_limits<double>::infinity());

  const Road constant = quad_road(1, 1);
  CHECK_THROWS_AS(boundary_slopes(constant, make_end_states(constant, 0.2, 0.6)), std::logic_error);
}

TEST_CASE("classification of single-road waves") {
  const Road lin = quad_road(1, 1, true);
  const Classification full = classify(lin, make_end_states(lin, 0.0, 1.0));
  CHECK(full.stationary);
  CHECK(full.degenerate);
  CHECK(std::isfinite(full.nu_minus));
  // D(1) = delta > 0, so the upper state is only reached asymptotically.
  CHECK(std::isinf(full.nu_plus));
  CHECK_FALSE(full.omega);

  const Road con = quad_road(1, 1);
  const Classification smooth = classify(con, make_end_states(con, 0.2, 0.6));
  CHECK_FALSE(smooth.stationary);
  CHECK_FALSE(smooth.degenerate);
  CHECK(std::isinf(smooth.nu_minus));
  CHECK(std::isinf(smooth.nu_plus));

  const Classification kink = classify(lin, make_end_states(lin, 0.0, 0.8));
  CHECK_FALSE(kink.stationary);
  CHECK(kink.degenerate);
  REQUIRE(kink.omega);
  CHECK(std::abs(*kink.omega - (-std::log(2.0) / 0.2)) < 1e-12);
}
