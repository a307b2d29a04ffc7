#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "twnet/coupling.hpp"
#include "twnet/special_cases.hpp"

using namespace twnet;
using namespace twnet::test;

namespace {

FamilyParams family(FluxKind flux, DiffusivityKind diff, double v_ratio, double delta_ratio,
                    std::vector<double> alpha = {1.0}) {
  FamilyParams p;
  p.flux = flux;
  p.diffusivity = diff;
  p.v1 = 1.0;
  p.delta1 = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    p.v.push_back(1.0 / v_ratio);
    p.delta.push_back(1.0 / delta_ratio);
  }
  p.alpha = std::move(alpha);
  return p;
}

FamilyParams quad_const(double v_ratio, double delta_ratio, std::vector<double> alpha = {1.0}) {
  return family(FluxKind::Quadratic, DiffusivityKind::Constant, v_ratio, delta_ratio, std::move(alpha));
}

}  // namespace

TEST_CASE("family parameters round-trip through a network") {
  FamilyParams p = quad_const(2.0, 3.0, {0.25, 0.75});
  p.v = {0.5, 0.8};
  p.delta = {2.0, 0.4};
  p.v1 = 1.6;
  const auto back = family_params(make_family_network(p));
  REQUIRE(back);
  CHECK(back->n() == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(back->v_ratio(j) * back->v[j] - back->v1) < 1e-14);
    CHECK(back->alpha[j] == p.alpha[j]);
  }
  StarNetwork mixed = make_family_network(p);
  mixed.outgoing[1].flux = FluxSpec::logarithmic(1);
  CHECK_FALSE(family_params(mixed));
}

TEST_CASE("quadratic constant-diffusivity criterion") {
  CHECK(quad_const_D_criterion(quad_const(2, 2)).exists);
  const QuadConstCriterion unit = quad_const_D_criterion(quad_const(1, 1));
  CHECK(unit.exists);
  CHECK(unit.continuity_exists);
  const QuadConstCriterion split = quad_const_D_criterion(quad_const(2, 4, {0.5, 0.5}));
  CHECK(split.exists_per_j == std::vector<bool>{true, true});
  CHECK(split.exists);
  // v^2 = delta and alpha_{1,j} v_{1,j} = 1 on each outgoing road.
  CHECK(split.continuity_exists);
  CHECK_FALSE(quad_const_D_criterion(quad_const(2, 4, {0.25, 0.75})).continuity_exists);
  CHECK_FALSE(quad_const_D_criterion(quad_const(1, 2)).exists);
}

TEST_CASE("logistic closed form") {
  const Profile p = quad_const_D_profile(1, 1, make_end_states(FluxSpec::quadratic(1), 0.0, 1.0));
  CHECK(p(0.0) == 0.5);
  const EndStates e = make_end_states(FluxSpec::quadratic(2), 0.2, 0.6);
  const Profile q = quad_const_D_profile(2, 0.5, e, 0.7);
  CHECK(std::abs(q(1e3) - 0.6) < 1e-15);
  CHECK(std::abs(q(-1e3) - 0.2) < 1e-15);
  CHECK(std::abs(q(-0.7) - 0.4) < 1e-15);
  CHECK(ode_residual(quad_road(2, 0.5), q, 20.0, 1000) <= 1e-10);
}

TEST_CASE("quadratic linear-diffusivity analysis") {
  const FamilyParams unique_p = family(FluxKind::Quadratic, DiffusivityKind::Linear, 1.0, 4.0);
  const DegenerateAnalysis a = quad_linear_D_analyze(unique_p);
  CHECK(a.verdict == FamilyVerdict::Unique);
  // v (delta - v^2) / (alpha delta^2 - v^3) = 3/15 and alpha delta (delta - v^2) / (...) = 12/15.
  CHECK(std::abs(a.incoming_hi - 3.0 / 15.0) < 1e-15);
  REQUIRE(a.outgoing_hi.size() == 1);
  CHECK(std::abs(a.outgoing_hi[0] - 12.0 / 15.0) < 1e-15);
  REQUIRE(a.window.size() == 1);
  CHECK(a.window[0]);
  const IntervalTables t = interval_tables(unique_p);
  REQUIRE(t.thresholds.size() == 1);
  std::vector<double> expected{4.0, 2.0, std::pow(4.0, 2.0 / 3.0)};
  std::vector<double> got = t.thresholds[0];
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  REQUIRE(got.size() == expected.size());
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - expected[k]) < 1e-14);

  const DegenerateAnalysis fam = quad_linear_D_analyze(family(FluxKind::Quadratic, DiffusivityKind::Linear, 1, 1));
  CHECK(fam.verdict == FamilyVerdict::Families);
  CHECK(fam.continuity_relations == std::vector<bool>{true});

  const DegenerateAnalysis none = quad_linear_D_analyze(family(FluxKind::Quadratic, DiffusivityKind::Linear, 3, 4));
  CHECK(none.verdict == FamilyVerdict::None);
  CHECK(none.window == std::vector<bool>{false});
}

TEST_CASE("explicit linear-diffusivity end states match the flux values and give k = 0") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  int checked = 0;
  for (int k = 0; k < 400 && checked < 40; ++k) {
    const double v = 0.2 + 2.0 * u(rng);
    const double d = 0.2 + 5.0 * u(rng);
    FamilyParams p = family(FluxKind::Quadratic, DiffusivityKind::Linear, v, d);
    const DegenerateAnalysis a = quad_linear_D_analyze(p);
    if (a.verdict != FamilyVerdict::Unique) continue;
    ++checked;
    const double l1 = a.incoming_hi;
    const double lj = a.outgoing_hi[0];
    // f_j(l_j) = alpha f_1(l_1) with f_h = v_h rho (1 - rho).
    CHECK(std::abs(p.v[0] * lj * (1 - lj) - p.alpha[0] * p.v1 * l1 * (1 - l1)) < 1e-12);
    const StarNetwork net = make_family_network(p);
    const CouplingConstants c = coupling_constants(net, {make_end_states(net.incoming[0], 0.0, l1)},
                                                   {make_end_states(net.outgoing[0], 0.0, lj)});
    CHECK(std::abs(c.k[0]) < 1e-12);
    CHECK(std::abs(c.kappa[0]) < 1e-12);
  }
  CHECK(checked >= 10);
}

TEST_CASE("linear-diffusivity closed form") {
  const EndStates e = make_end_states(FluxSpec::quadratic(1), 0.0, 0.8);
  const Profile p = quad_linear_D_profile(1, 1, e);
  CHECK(std::abs(p(0.0) - 0.4) < 1e-15);
  const double kink = -std::log(2.0);
  CHECK(p(kink) == 0.0);
  CHECK(p(kink + 1e-9) < 1e-8);
  CHECK(ode_residual(quad_road(1, 1, true), p, 20.0, 1000) <= 1e-10);

  const EndStates inner = make_end_states(FluxSpec::quadratic(1), 0.2, 0.6);
  const Profile q = quad_linear_D_profile(1, 1, inner);
  CHECK(std::abs(q(0.0) - 0.4) < 1e-12);
  // [2 e^{xi} (psi - lo) / w]^lo = [2 e^{xi} (hi - psi) / w]^hi in log form.  The
  // window keeps psi away from the ends, where the logarithms amplify roundoff.
  for (double xi : grid(-5, 5, 61)) {
    const double psi = q(xi);
    const double w = inner.width();
    const double lhs = inner.lo * (std::log(2.0) + xi + std::log((psi - inner.lo) / w));
    const double rhs = inner.hi * (std::log(2.0) + xi + std::log((inner.hi - psi) / w));
    CHECK(std::abs(lhs - rhs) <= 1e-10);
    CHECK(std::abs(linear_diffusion_implicit_residual(1, 1, inner, xi, psi)) <= 1e-10);
  }
  CHECK(ode_residual(quad_road(1, 1, true), q, 20.0, 1000) <= 1e-10);
}

TEST_CASE("logarithmic analysis gives the power-law end states") {
  const FamilyParams p = family(FluxKind::Logarithmic, DiffusivityKind::Constant, 1.0, 4.0);
  const DegenerateAnalysis a = log_analyze(p);
  REQUIRE(a.verdict == FamilyVerdict::Unique);
  const double l1 = std::pow(4.0, -4.0 / 3.0);
  const double l2 = std::pow(4.0, -1.0 / 3.0);
  CHECK(std::abs(a.incoming_hi - l1) < 1e-12);
  CHECK(std::abs(a.outgoing_hi[0] - l2) < 1e-12);
  CHECK(std::abs(a.outgoing_hi[0] * std::log(a.outgoing_hi[0]) - a.incoming_hi * std::log(a.incoming_hi)) <
        1e-12);
  const IntervalTables t = interval_tables(p);
  std::vector<double> got = t.thresholds[0];
  std::sort(got.begin(), got.end());
  REQUIRE(got.size() == 2);
  CHECK(std::abs(got[0] - 2.0) < 1e-14);
  CHECK(std::abs(got[1] - 4.0) < 1e-14);

  const DegenerateAnalysis fam = log_analyze(family(FluxKind::Logarithmic, DiffusivityKind::Constant, 1, 1));
  CHECK(fam.verdict == FamilyVerdict::Families);
}

TEST_CASE("logarithmic inverses") {
  const double m = std::exp(-1.0);
  CHECK(std::abs(log_inverse_left(m) - m) < 1e-12);
  CHECK(std::abs(log_inverse_right(m) - m) < 1e-12);
  CHECK(log_inverse_left(0.0) == 0.0);
  CHECK(log_inverse_right(0.0) == 1.0);
  CHECK_THROWS_AS(log_inverse_left(0.5), std::domain_error);
  CHECK_THROWS_AS(log_inverse_right(-0.1), std::domain_error);
  for (double y : grid(0.01, 0.36, 15)) {
    CHECK(std::abs(-log_inverse_left(y) * std::log(log_inverse_left(y)) - y) < 1e-13);
    CHECK(std::abs(-log_inverse_right(y) * std::log(log_inverse_right(y)) - y) < 1e-13);
  }
}

TEST_CASE("logarithmic stationary end states") {
  const FamilyParams p = family(FluxKind::Logarithmic, DiffusivityKind::Constant, 1.0, 1.0);
  const auto s = stationary_end_states(p, 0.1);
  REQUIRE(s);
  const double y = 0.1 * std::log(10.0);
  // Bisection oracle on the decreasing branch.
  double a = std::exp(-1.0);
  double b = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (a + b);
    (-mid * std::log(mid) > y ? a : b) = mid;
  }
  CHECK(std::abs(s->incoming.hi - 0.5 * (a + b)) < 1e-12);
  CHECK(std::abs(s->outgoing[0].lo - log_inverse_left(y)) < 1e-12);
  CHECK(std::abs(s->outgoing[0].hi - log_inverse_right(y)) < 1e-12);
}

TEST_CASE("quadratic stationary end states follow the square-root formula") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 500; ++k) {
    const double v = 0.3 + 2.0 * u(rng);
    const double alpha = 0.2 + 0.8 * u(rng);
    FamilyParams p = quad_const(v, 1.0, {alpha, 1.0 - alpha});
    const double lo = 0.5 * u(rng);
    const IntervalTables t = interval_tables(p);
    const auto s = stationary_end_states(p, lo);
    CHECK(bool(s) == t.stationary_admissible(lo));
    if (!s) continue;
    ++checked;
    const double l1p = s->incoming.hi;
    CHECK(std::abs(l1p - (1.0 - lo)) < 1e-15);
    for (std::size_t j = 0; j < 2; ++j) {
      const double root = std::sqrt(1.0 - 4.0 * p.alpha[j] * v * l1p * lo);
      CHECK(std::abs(s->outgoing[j].lo - 0.5 * (1.0 - root)) < 1e-12);
      CHECK(std::abs(s->outgoing[j].hi - 0.5 * (1.0 + root)) < 1e-12);
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("interval tables") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double v = 0.2 + 2.0 * u(rng);
    const FamilyParams p = quad_const(v, 1.0, {1.0});
    const IntervalTables t = interval_tables(p);
    CHECK(t.stationary[0].lo >= 0.0);
    CHECK(t.stationary[0].hi <= 0.5);
    if (p.alpha[0] * v <= 1.0) {
      REQUIRE(t.nonstationary[0].size() == 1);
      CHECK(t.nonstationary[0][0].lo == 0.0);
      CHECK(t.nonstationary[0][0].hi == 1.0);
    }
  }
}
