#include "twnet/pde_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twnet/numerics.hpp"

namespace twnet {

namespace {

double godunov(const FluxSpec& f, double left, double right) {
  if (left <= right) return std::min(f.value(left), f.value(right));
  const double peak = f.argmax();
  if (right <= peak && peak <= left) return f.max_value();
  return std::max(f.value(left), f.value(right));
}

double face_diffusivity(const DiffusivitySpec& d, double left, double right) {
  const double a = d.value(left);
  const double b = d.value(right);
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

double face_flux(const Road& road, double left, double right, double dx) {
  return godunov(road.flux, left, right) - face_diffusivity(road.diffusivity, left, right) * (right - left) / dx;
}

double max_slope(const FluxSpec& f) {
  if (f.kind() == FluxKind::Quadratic) return f.v();
  double s = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double rho = std::max(1e-8, k / 1000.0);
    s = std::max(s, std::abs(f.derivative(rho)));
  }
  return std::max(s, std::abs(f.derivative(1e-8)));
}

double clip(double value, double tolerance, double& clipped) {
  double out = value;
  if (value < 0.0) out = 0.0;
  if (value > 1.0) out = 1.0;
  const double amount = std::abs(out - value);
  if (amount > tolerance) {
    throw ClippingError("density left [0, 1] by " + std::to_string(amount));
  }
  clipped = std::max(clipped, amount);
  return out;
}

}  // namespace

double DiscreteNetworkState::mass() const {
  double total = 0.0;
  for (const auto* group : {&incoming, &outgoing}) {
    for (const RoadGrid& g : *group) {
      for (double r : g.rho) total += r;
    }
  }
  return total * dx;
}

FarField wave_far_field(const NetworkWave& wave) {
  return [wave](bool incoming, std::size_t road, double x, double t) {
    const Profile& p = incoming ? wave.incoming[road] : wave.outgoing[road];
    const double c = p.ends().stationary() ? 0.0 : p.ends().speed;
    return p(x - c * t);
  };
}

FarField constant_far_field(std::vector<double> incoming, std::vector<double> outgoing) {
  return [incoming = std::move(incoming), outgoing = std::move(outgoing)](bool in, std::size_t road, double,
                                                                          double) {
    return in ? incoming[road] : outgoing[road];
  };
}

DiscreteNetworkState make_state(const StarNetwork& net, const FarField& initial, double length, double dx) {
  if (!(dx > 0.0) || !(length > 2.0 * dx)) throw std::invalid_argument("grid needs dx > 0 and length > 2 dx");
  const auto cells = static_cast<std::size_t>(std::llround(length / dx));
  DiscreteNetworkState state;
  state.dx = dx;
  state.length = static_cast<double>(cells) * dx;
  auto fill = [&](bool incoming, std::size_t road) {
    RoadGrid g;
    g.x.resize(cells);
    g.rho.resize(cells);
    for (std::size_t k = 0; k < cells; ++k) {
      const double offset = (static_cast<double>(k) + 0.5) * dx;
      g.x[k] = incoming ? -state.length + offset : offset;
      g.rho[k] = initial(incoming, road, g.x[k], 0.0);
    }
    return g;
  };
  for (std::size_t i = 0; i < net.m(); ++i) state.incoming.push_back(fill(true, i));
  for (std::size_t j = 0; j < net.n(); ++j) state.outgoing.push_back(fill(false, j));
  return state;
}

double stable_dt(const StarNetwork& net, double dx) {
  double d_max = 0.0;
  double s_max = 0.0;
  for (const auto* group : {&net.incoming, &net.outgoing}) {
    for (const Road& road : *group) {
      d_max = std::max(d_max, road.diffusivity.max_value());
      s_max = std::max(s_max, max_slope(road.flux));
    }
  }
  double bound = std::numeric_limits<double>::infinity();
  if (d_max > 0.0) bound = std::min(bound, dx * dx / (2.0 * d_max));
  if (s_max > 0.0) bound = std::min(bound, dx / s_max);
  return 0.9 * bound;
}

StepDiagnostics step(const StarNetwork& net, DiscreteNetworkState& state, const FarField& far, double dt,
                     const StepOptions& options) {
  const double bound = stable_dt(net, state.dx);
  if (dt > bound / 0.9 * (1.0 + 1e-12)) {
    throw StabilityError("time step " + std::to_string(dt) + " exceeds the stability bound", bound);
  }
  const double dx = state.dx;
  const double t = state.t;
  StepDiagnostics diag;
  const double mass_before = state.mass();

  // Incoming face fluxes, the last one at the node.
  std::vector<std::vector<double>> in_faces(net.m());
  std::vector<double> node_in(net.m());
  for (std::size_t i = 0; i < net.m(); ++i) {
    const Road& road = net.incoming[i];
    const RoadGrid& g = state.incoming[i];
    const std::size_t n = g.rho.size();
    auto& faces = in_faces[i];
    faces.resize(n + 1);
    faces[0] = face_flux(road, far(true, i, g.x[0] - dx, t), g.rho[0], dx);
    for (std::size_t k = 1; k < n; ++k) faces[k] = face_flux(road, g.rho[k - 1], g.rho[k], dx);
    const double last = g.rho[n - 1];
    const double prev = g.rho[n - 2];
    const double trace = std::clamp(last + 0.5 * (last - prev), 0.0, 1.0);
    if (options.closure == NodeClosure::Affine) {
      if (options.relations.size() != net.m()) throw std::invalid_argument("affine closure needs one relation per incoming road");
      faces[n] = options.relations[i].speed * trace + options.relations[i].offset;
    } else {
      faces[n] = road.flux.value(trace) - road.diffusivity.value(trace) * (last - prev) / dx;
    }
    node_in[i] = faces[n];
  }
  std::vector<std::vector<double>> out_faces(net.n());
  double total_in = 0.0;
  double total_out = 0.0;
  for (double v : node_in) total_in += v;
  for (std::size_t j = 0; j < net.n(); ++j) {
    const Road& road = net.outgoing[j];
    const RoadGrid& g = state.outgoing[j];
    const std::size_t n = g.rho.size();
    auto& faces = out_faces[j];
    faces.resize(n + 1);
    faces[0] = 0.0;
    for (std::size_t i = 0; i < net.m(); ++i) faces[0] += net.alpha[i][j] * node_in[i];
    total_out += faces[0];
    for (std::size_t k = 1; k < n; ++k) faces[k] = face_flux(road, g.rho[k - 1], g.rho[k], dx);
    faces[n] = face_flux(road, g.rho[n - 1], far(false, j, g.x[n - 1] + dx, t), dx);
  }
  diag.node_conservation = std::abs(total_out - total_in);

  double boundary = 0.0;
  auto update = [&](RoadGrid& g, const std::vector<double>& faces) {
    const std::size_t n = g.rho.size();
    boundary += faces[0] - faces[n];
    for (std::size_t k = 0; k < n; ++k) {
      g.rho[k] -= dt / dx * (faces[k + 1] - faces[k]);
    }
  };
  for (std::size_t i = 0; i < net.m(); ++i) update(state.incoming[i], in_faces[i]);
  for (std::size_t j = 0; j < net.n(); ++j) update(state.outgoing[j], out_faces[j]);
  // The node faces cancel up to the conservation residual.
  const double mass_after = state.mass();
  diag.mass_balance = std::abs(mass_after - mass_before - dt * boundary);

  for (auto* group : {&state.incoming, &state.outgoing}) {
    for (RoadGrid& g : *group) {
      for (double& r : g.rho) r = clip(r, options.clip_tolerance, diag.clipped);
    }
  }
  state.t = t + dt;
  return diag;
}

DriftReport drift(const DiscreteNetworkState& state, const NetworkWave& wave) {
  struct Sample {
    const Profile* profile;
    double c;
    double x;
    double rho;
  };
  std::vector<Sample> samples;
  auto collect = [&](const std::vector<RoadGrid>& grids, const std::vector<Profile>& profiles) {
    for (std::size_t h = 0; h < grids.size(); ++h) {
      const Profile& p = profiles[h];
      const double c = p.ends().stationary() ? 0.0 : p.ends().speed;
      for (std::size_t k = 0; k < grids[h].x.size(); ++k) {
        const double xi = grids[h].x[k] - c * state.t;
        if (std::abs(xi - p.nu_minus()) < 1.0 || std::abs(xi - p.nu_plus()) < 1.0) continue;
        samples.push_back(Sample{&p, c, grids[h].x[k], grids[h].rho[k]});
      }
    }
  };
  collect(state.incoming, wave.incoming);
  collect(state.outgoing, wave.outgoing);

  auto linf = [&](double tau) {
    double e = 0.0;
    for (const Sample& s : samples) e = std::max(e, std::abs(s.rho - (*s.profile)(s.x - s.c * (state.t + tau))));
    return e;
  };
  double tau = golden_section_min(linf, -1.0, 1.0, 1e-10);
  if (linf(0.0) <= linf(tau)) tau = 0.0;

  DriftReport report;
  report.best_shift = tau;
  double sq = 0.0;
  for (const Sample& s : samples) {
    const double e = std::abs(s.rho - (*s.profile)(s.x - s.c * (state.t + tau)));
    report.linf = std::max(report.linf, e);
    sq += e * e;
  }
  report.l2 = std::sqrt(sq * state.dx);
  return report;
}

std::vector<NodeRelation> wave_node_relations(const StarNetwork& net, const NetworkWave& wave) {
  std::vector<NodeRelation> out;
  for (std::size_t i = 0; i < net.m(); ++i) {
    const EndStates& e = wave.incoming[i].ends();
    const double c = e.stationary() ? 0.0 : e.speed;
    out.push_back(NodeRelation{c, net.incoming[i].flux.value(e.lo) - c * e.lo});
  }
  return out;
}

SimulationReport simulate(const StarNetwork& net, const NetworkWave& wave, const SimulationOptions& opts) {
  SimulationOptions options = opts;
  if (options.step.closure == NodeClosure::Affine && options.step.relations.empty()) {
    options.step.relations = wave_node_relations(net, wave);
  }
  const FarField far = wave_far_field(wave);
  DiscreteNetworkState state = make_state(net, far, options.length, options.dx);
  SimulationReport report;
  double dt = options.dt > 0.0 ? options.dt : stable_dt(net, state.dx);
  const auto steps = static_cast<std::size_t>(std::ceil(options.final_time / dt - 1e-12));
  if (steps > 0) dt = options.final_time / static_cast<double>(steps);
  report.dt = dt;
  report.steps = steps;
  for (std::size_t s = 0; s < steps; ++s) {
    const StepDiagnostics d = step(net, state, far, dt, options.step);
    report.max_node_conservation = std::max(report.max_node_conservation, d.node_conservation);
    report.max_mass_balance = std::max(report.max_mass_balance, d.mass_balance);
    report.max_clipped = std::max(report.max_clipped, d.clipped);
  }
  report.drift = drift(state, wave);
  return report;
}

RefinementReport refinement_study(const StarNetwork& net, const NetworkWave& wave,
                                  const SimulationOptions& options) {
  RefinementReport report;
  SimulationOptions coarse = options;
  coarse.dx = 2.0 * options.dx;
  coarse.dt = 0.0;
  SimulationOptions fine = options;
  fine.dt = 0.0;
  report.coarse = simulate(net, wave, coarse);
  report.fine = simulate(net, wave, fine);
  report.ratio = report.coarse.drift.linf / report.fine.drift.linf;
  return report;
}

}  // namespace twnet
