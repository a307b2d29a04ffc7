#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "twnet/graph_model.hpp"
#include "twnet/numerics.hpp"

using namespace twnet;
using namespace twnet::test;

TEST_CASE("single quadratic road pair is a valid network") {
  const StarNetwork net = one_to_one(quad_road(1, 1), quad_road(1, 1));
  CHECK(validate(net).ok());
}

TEST_CASE("row sum below one is reported") {
  StarNetwork net{{quad_road(1, 1)},
                  {as_outgoing(quad_road(1, 1), 2), as_outgoing(quad_road(1, 1), 3)},
                  {{0.5, 0.4}}};
  const ValidationReport r = validate(net);
  REQUIRE_FALSE(r.ok());
  bool found = false;
  for (const auto& v : r.violations) found = found || v.find("row sum") != std::string::npos;
  CHECK(found);
}

TEST_CASE("non-positive alpha and shape mismatch are reported") {
  StarNetwork zero{{quad_road(1, 1)},
                   {as_outgoing(quad_road(1, 1), 2), as_outgoing(quad_road(1, 1), 3)},
                   {{1.0, 0.0}}};
  CHECK_FALSE(validate(zero).ok());
  StarNetwork shape{{quad_road(1, 1)}, {as_outgoing(quad_road(1, 1))}, {{0.5, 0.5}}};
  CHECK_FALSE(validate(shape).ok());
  StarNetwork empty{{}, {as_outgoing(quad_road(1, 1))}, {}};
  CHECK_FALSE(validate(empty).ok());
}

TEST_CASE("convex bump in a tabulated flux fails the concavity test") {
  // rho (1 - rho)(1 + 10 rho) has f'' = 18 - 60 rho > 0 near 0.
  const FluxSpec f = FluxSpec::tabulated([](double r) { return r * (1 - r) * (1 + 10 * r); },
                                         [](double r) { return 1 + 18 * r - 30 * r * r; });
  CHECK_FALSE(passes_concavity_test(f));
  Road road{1, Orientation::Incoming, f, DiffusivitySpec::constant(1)};
  const StarNetwork net = one_to_one(road, quad_road(1, 1));
  const ValidationReport r = validate(net);
  REQUIRE_FALSE(r.ok());
  bool found = false;
  for (const auto& v : r.violations) found = found || v.find("concave") != std::string::npos;
  CHECK(found);
}

TEST_CASE("flux evaluation") {
  CHECK(FluxSpec::quadratic(2).value(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(FluxSpec::logarithmic(1).value(0.0) == 0.0);
  CHECK(FluxSpec::logarithmic(1).value(std::exp(-1.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(FluxSpec::quadratic(1).value(1.5), std::out_of_range);
  CHECK_THROWS_AS(FluxSpec::logarithmic(1).value(-0.1), std::out_of_range);
  CHECK(std::isinf(FluxSpec::logarithmic(1).derivative(0.0)));
  CHECK(FluxSpec::quadratic(3).derivative(0.25) == doctest::Approx(1.5));
}

TEST_CASE("flux vanishes at both ends for every analytic kind") {
  for (double v : {0.3, 1.0, 2.5}) {
    for (const FluxSpec& f : {FluxSpec::quadratic(v), FluxSpec::logarithmic(v)}) {
      CHECK(f.value(0.0) == 0.0);
      CHECK(f.value(1.0) == 0.0);
      CHECK(passes_concavity_test(f));
    }
  }
}

TEST_CASE("argmax matches golden-section search") {
  for (const FluxSpec& f : {FluxSpec::quadratic(1.7), FluxSpec::logarithmic(0.6)}) {
    // |f'| vanishes linearly at the maximizer, so the search resolves it to roundoff.
    const double found = golden_section_min([&](double r) { return std::abs(f.derivative(r)); }, 1e-6, 1.0, 1e-14);
    CHECK(std::abs(found - f.argmax()) < 1e-10);
  }
  CHECK(FluxSpec::quadratic(1).argmax() == 0.5);
  CHECK(std::abs(FluxSpec::logarithmic(1).argmax() - std::exp(-1.0)) < 1e-15);
}

TEST_CASE("flux inverses land on the requested branch") {
  for (const FluxSpec& f : {FluxSpec::quadratic(1.3), FluxSpec::logarithmic(0.8)}) {
    for (double frac : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      const double y = frac * f.max_value();
      const double l = f.inverse_left(y);
      const double r = f.inverse_right(y);
      CHECK(l <= f.argmax() + 1e-12);
      CHECK(r >= f.argmax() - 1e-12);
      CHECK(std::abs(f.value(l) - y) < 1e-12);
      CHECK(std::abs(f.value(r) - y) < 1e-12);
    }
  }
}

TEST_CASE("diffusivity kinds and degeneracy flags") {
  const DiffusivitySpec c = DiffusivitySpec::constant(2);
  const DiffusivitySpec l = DiffusivitySpec::linear(3);
  CHECK(c.value(0.4) == 2.0);
  CHECK(l.value(0.5) == 1.5);
  CHECK_FALSE(c.vanishes_at_zero());
  CHECK(l.vanishes_at_zero());
  CHECK_FALSE(l.vanishes_at_one());
  CHECK(l.max_value() == 3.0);
  const DiffusivitySpec bump = DiffusivitySpec::tabulated([](double r) { return r * (1 - r); },
                                                          [](double r) { return 1 - 2 * r; });
  CHECK(bump.vanishes_at_zero());
  CHECK(bump.vanishes_at_one());
}
