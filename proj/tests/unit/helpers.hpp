#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "twnet/graph_model.hpp"
#include "twnet/scalar_wave.hpp"

namespace twnet::test {

inline Road quad_road(double v, double delta, bool linear = false, Orientation o = Orientation::Incoming,
                      std::size_t id = 1) {
  return Road{id, o, FluxSpec::quadratic(v),
              linear ? DiffusivitySpec::linear(delta) : DiffusivitySpec::constant(delta)};
}

inline Road log_road(double v, double delta, Orientation o = Orientation::Incoming, std::size_t id = 1) {
  return Road{id, o, FluxSpec::logarithmic(v), DiffusivitySpec::constant(delta)};
}

inline Road as_outgoing(Road r, std::size_t id = 2) {
  r.orientation = Orientation::Outgoing;
  r.id = id;
  return r;
}

inline StarNetwork one_to_one(const Road& in, const Road& out, double alpha = 1.0) {
  return StarNetwork{{in}, {as_outgoing(out)}, {{alpha}}};
}

inline std::vector<double> grid(double a, double b, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return g;
}

/// max |D(phi) phi' - (g(phi) - g(lo))| over a grid, from the flux directly.
inline double ode_residual(const Road& road, const Profile& p, double span = 20.0, std::size_t points = 1000) {
  const EndStates& e = p.ends();
  const double c = e.stationary() ? 0.0 : e.speed;
  const double g_lo = road.flux.value(e.lo) - c * e.lo;
  double worst = 0.0;
  for (double xi : grid(-span, span, points)) {
    const double phi = p(xi);
    const double lhs = road.diffusivity.value(phi) * p.slope(xi);
    const double rhs = road.flux.value(phi) - c * phi - g_lo;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace twnet::test
