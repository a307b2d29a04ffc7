#include "twnet/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> symmetric_grid(double half_width, std::size_t points) {
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = 0.0;
    return out;
  }
  for (std::size_t k = 0; k < points; ++k) {
    out[k] = -half_width + 2.0 * half_width * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return out;
}

double flux_high(const Road& road, const EndStates& e) {
  return std::max(road.flux.value(e.lo), road.flux.value(e.hi));
}

double flux_low(const Road& road, const EndStates& e) {
  return std::min(road.flux.value(e.lo), road.flux.value(e.hi));
}

// Clamps tiny overshoots of the flux maximum caused by rounding.
bool fits_under_max(const FluxSpec& flux, double& y) {
  const double top = flux.max_value();
  if (y <= top) return true;
  if (y <= top * (1.0 + 1e-13)) {
    y = top;
    return true;
  }
  return false;
}

bool any_moving(const std::vector<EndStates>& ends) {
  return std::any_of(ends.begin(), ends.end(), [](const EndStates& e) { return !e.stationary(); });
}

void push_unique(std::vector<EndStates>& out, const EndStates& e) {
  for (const EndStates& x : out) {
    if (std::abs(x.lo - e.lo) <= 1e-14 && std::abs(x.hi - e.hi) <= 1e-14) return;
  }
  out.push_back(e);
}

struct RoadConstants {
  std::vector<double> L_minus;
  std::vector<double> L_plus;
  std::vector<double> c_ratio;
  std::vector<double> A;
  double k = 0.0;
  double k_lower = 0.0;
  double k_midpoint = 0.0;
  double width_residual = 0.0;
};

RoadConstants road_constants(const StarNetwork& net, const std::vector<EndStates>& incoming, std::size_t j,
                             const EndStates& out) {
  const double cj = out.speed;
  if (std::abs(cj) <= kStationaryTolerance) {
    throw std::domain_error("coupling constants need a nonzero outgoing speed");
  }
  RoadConstants r;
  const std::size_t m = incoming.size();
  r.L_minus.assign(m, 0.0);
  r.L_plus.assign(m, 0.0);
  r.c_ratio.assign(m, 0.0);
  r.A.assign(m, 0.0);
  double upper = 0.0;
  double lower = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const EndStates& e = incoming[i];
    const double ci = e.stationary() ? 0.0 : e.speed;
    if (ci * cj >= 0.0) {
      r.L_minus[i] = e.lo;
      r.L_plus[i] = e.hi;
    } else {
      r.L_minus[i] = e.hi;
      r.L_plus[i] = e.lo;
    }
    r.c_ratio[i] = ci / cj;
    r.A[i] = net.alpha[i][j] * r.c_ratio[i];
    if (ci == 0.0) continue;
    upper += r.A[i] * r.L_plus[i];
    lower += r.A[i] * r.L_minus[i];
  }
  r.k = upper - out.hi;
  r.k_lower = lower - out.lo;
  r.k_midpoint = 0.5 * (upper + lower) - out.midpoint();
  r.width_residual = std::abs((upper - lower) - out.width());
  return r;
}

double min_moving_speed(const std::vector<EndStates>& ends) {
  double c = kInf;
  for (const EndStates& e : ends) {
    if (!e.stationary()) c = std::min(c, std::abs(e.speed));
  }
  return c;
}

}  // namespace

std::vector<std::vector<EndStates>> match_end_states(const StarNetwork& net,
                                                     const std::vector<EndStates>& incoming) {
  if (incoming.size() != net.m()) throw std::invalid_argument("one end-state pair per incoming road expected");
  for (const EndStates& e : incoming) {
    if (!(e.lo < e.hi)) throw std::invalid_argument("incoming end states must satisfy lo < hi");
  }
  const bool moving = any_moving(incoming);
  std::vector<std::vector<EndStates>> out(net.n());
  for (std::size_t j = 0; j < net.n(); ++j) {
    const Road& road = net.outgoing[j];
    const FluxSpec& f = road.flux;
    double top = 0.0;
    double bottom = 0.0;
    for (std::size_t i = 0; i < net.m(); ++i) {
      top += net.alpha[i][j] * flux_high(net.incoming[i], incoming[i]);
      bottom += net.alpha[i][j] * flux_low(net.incoming[i], incoming[i]);
    }
    if (!moving) {
      double y = top;
      if (!(y < f.max_value())) continue;
      const double lo = f.inverse_left(y);
      const double hi = f.inverse_right(y);
      if (lo < hi) {
        EndStates e = make_end_states(road, lo, hi);
        e.speed = 0.0;
        out[j].push_back(e);
      }
      continue;
    }
    if (!fits_under_max(f, top) || !fits_under_max(f, bottom)) continue;
    const double top_left = f.inverse_left(top);
    const double top_right = f.inverse_right(top);
    const double low_left = f.inverse_left(bottom);
    const double low_right = f.inverse_right(bottom);
    // Positive speed: the lower state carries the smaller flux.
    for (double hi : {top_left, top_right}) {
      if (low_left < hi) {
        const EndStates e = make_end_states(road, low_left, hi);
        if (e.speed > kStationaryTolerance) push_unique(out[j], e);
      }
    }
    // Negative speed: the upper state carries the smaller flux.
    for (double lo : {top_left, top_right}) {
      if (lo < low_right) {
        const EndStates e = make_end_states(road, lo, low_right);
        if (e.speed < -kStationaryTolerance) push_unique(out[j], e);
      }
    }
  }
  return out;
}

CouplingConstants coupling_constants(const StarNetwork& net, const std::vector<EndStates>& incoming,
                                     const std::vector<EndStates>& outgoing) {
  CouplingConstants cc;
  const std::size_t m = net.m();
  const std::size_t n = net.n();
  for (std::size_t i = 0; i < m; ++i) {
    cc.c_in.push_back(incoming[i].stationary() ? 0.0 : incoming[i].speed);
    (incoming[i].stationary() ? cc.stationary_incoming : cc.moving_incoming).push_back(i);
  }
  for (std::size_t j = 0; j < n; ++j) cc.c_out.push_back(outgoing[j].speed);
  cc.L_minus.assign(m, std::vector<double>(n));
  cc.L_plus.assign(m, std::vector<double>(n));
  cc.c_ratio.assign(m, std::vector<double>(n));
  cc.A.assign(m, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const RoadConstants r = road_constants(net, incoming, j, outgoing[j]);
    for (std::size_t i = 0; i < m; ++i) {
      cc.L_minus[i][j] = r.L_minus[i];
      cc.L_plus[i][j] = r.L_plus[i];
      cc.c_ratio[i][j] = r.c_ratio[i];
      cc.A[i][j] = r.A[i];
    }
    cc.k.push_back(r.k);
    cc.k_lower.push_back(r.k_lower);
    cc.k_midpoint.push_back(r.k_midpoint);
    cc.kappa.push_back(outgoing[j].speed * r.k);
    cc.width_residual.push_back(r.width_residual);
  }
  return cc;
}

double candidate_residual(const StarNetwork& net, const std::vector<Profile>& incoming, std::size_t j,
                          const EndStates& outgoing, const ConditionOptions& options) {
  if (outgoing.stationary()) return kInf;
  std::vector<EndStates> in_ends;
  for (const Profile& p : incoming) in_ends.push_back(p.ends());
  const RoadConstants r = road_constants(net, in_ends, j, outgoing);
  const double c_min = std::min(min_moving_speed(in_ends), std::abs(outgoing.speed));
  const ReducedFlux out_flux(net.outgoing[j], outgoing);
  std::vector<ReducedFlux> in_flux;
  for (std::size_t i = 0; i < incoming.size(); ++i) in_flux.emplace_back(net.incoming[i], in_ends[i]);

  double residual = 0.0;
  for (double xi : symmetric_grid(options.span / c_min, options.points)) {
    double level = -r.k;
    double rhs = 0.0;
    for (std::size_t i = 0; i < incoming.size(); ++i) {
      if (in_ends[i].stationary()) continue;
      const double phi = incoming[i](in_ends[i].speed * xi);
      level += r.A[i] * phi;
      rhs += r.A[i] * r.c_ratio[i] * in_flux[i].gamma(phi);
    }
    // Rounding in k_j must not move the level off an end state where the
    // extended slope jumps.
    const double snap = 1e-12 * outgoing.width();
    if (std::abs(level - outgoing.lo) <= snap) level = outgoing.lo;
    if (std::abs(level - outgoing.hi) <= snap) level = outgoing.hi;
    const double clamped = std::clamp(level, outgoing.lo, outgoing.hi);
    const double lhs = out_flux.gamma(clamped);
    residual = std::max(residual, std::abs(lhs - rhs) + std::abs(level - clamped));
  }
  return residual;
}

ConditionResult check_traveling_condition(const StarNetwork& net, const std::vector<EndStates>& incoming,
                                          const ConditionOptions& options) {
  ConditionResult result;
  if (!any_moving(incoming)) {
    result.reason = "all incoming roads are stationary";
    result.residual = kInf;
    return result;
  }
  std::vector<Profile> profiles;
  for (std::size_t i = 0; i < net.m(); ++i) profiles.push_back(build_profile(net.incoming[i], incoming[i]));

  const auto candidates = match_end_states(net, incoming);
  result.candidates.resize(net.n());
  std::vector<std::vector<std::size_t>> accepted(net.n());
  double worst = 0.0;
  for (std::size_t j = 0; j < net.n(); ++j) {
    double best = kInf;
    for (const EndStates& e : candidates[j]) {
      CandidateVerdict v;
      v.ends = e;
      v.residual = candidate_residual(net, profiles, j, e, options);
      v.accepted = v.residual <= options.tolerance;
      if (v.accepted) accepted[j].push_back(result.candidates[j].size());
      best = std::min(best, v.residual);
      result.candidates[j].push_back(v);
    }
    worst = std::max(worst, best);
  }
  result.residual = worst;

  for (std::size_t j = 0; j < net.n(); ++j) {
    if (candidates[j].empty()) {
      result.reason = "flux matching has no solution on outgoing road " + std::to_string(j + 1);
      return result;
    }
    if (accepted[j].empty()) {
      result.reason = "slope identity fails on outgoing road " + std::to_string(j + 1);
      return result;
    }
  }
  result.exists = true;

  // Cartesian product of the accepted candidates, capped.
  std::vector<std::size_t> pick(net.n(), 0);
  while (result.witnesses.size() < options.max_witnesses) {
    WaveSkeleton w;
    w.incoming = incoming;
    for (std::size_t j = 0; j < net.n(); ++j) {
      const CandidateVerdict& v = result.candidates[j][accepted[j][pick[j]]];
      w.outgoing.push_back(v.ends);
      w.residual = std::max(w.residual, v.residual);
    }
    result.witnesses.push_back(std::move(w));
    std::size_t j = 0;
    while (j < net.n() && ++pick[j] == accepted[j].size()) {
      pick[j] = 0;
      ++j;
    }
    if (j == net.n()) break;
  }
  return result;
}

std::string to_string(Stationarity s) {
  switch (s) {
    case Stationarity::Stationary: return "stationary";
    case Stationarity::CompletelyNonStationary: return "completely non-stationary";
    case Stationarity::Mixed: return "mixed";
  }
  return "unknown";
}

std::string to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::NonDegenerate: return "non-degenerate";
    case Degeneracy::Degenerate: return "degenerate";
    case Degeneracy::CompletelyDegenerate: return "completely degenerate";
  }
  return "unknown";
}

std::vector<EndStates> NetworkWave::incoming_ends() const {
  std::vector<EndStates> out;
  for (const Profile& p : incoming) out.push_back(p.ends());
  return out;
}

std::vector<EndStates> NetworkWave::outgoing_ends() const {
  std::vector<EndStates> out;
  for (const Profile& p : outgoing) out.push_back(p.ends());
  return out;
}

void classify_wave(NetworkWave& wave) {
  std::size_t moving = 0;
  std::size_t total = 0;
  std::size_t degenerate = 0;
  for (const auto* group : {&wave.incoming, &wave.outgoing}) {
    for (const Profile& p : *group) {
      ++total;
      if (!p.ends().stationary()) ++moving;
      if (std::isfinite(p.nu_minus()) || std::isfinite(p.nu_plus())) ++degenerate;
    }
  }
  if (moving == 0) {
    wave.stationarity = Stationarity::Stationary;
  } else if (moving == total) {
    wave.stationarity = Stationarity::CompletelyNonStationary;
  } else {
    wave.stationarity = Stationarity::Mixed;
  }
  if (degenerate == 0) {
    wave.degeneracy = Degeneracy::NonDegenerate;
  } else if (degenerate == total) {
    wave.degeneracy = Degeneracy::CompletelyDegenerate;
  } else {
    wave.degeneracy = Degeneracy::Degenerate;
  }
}

NetworkWave assemble_wave(const StarNetwork& net, const WaveSkeleton& skeleton) {
  if (!any_moving(skeleton.incoming)) {
    throw std::invalid_argument("assemble_wave expects a moving incoming road");
  }
  NetworkWave wave;
  for (std::size_t i = 0; i < net.m(); ++i) {
    wave.incoming.push_back(build_profile(net.incoming[i], skeleton.incoming[i]));
  }
  const double c_in_min = min_moving_speed(skeleton.incoming);
  for (std::size_t j = 0; j < net.n(); ++j) {
    const EndStates& out = skeleton.outgoing[j];
    const RoadConstants r = road_constants(net, skeleton.incoming, j, out);
    const Profile base = build_profile(net.outgoing[j], out);
    // Coupling formula in the coordinate of road j.
    auto formula = [&](double xi) {
      double level = -r.k;
      for (std::size_t i = 0; i < net.m(); ++i) {
        if (skeleton.incoming[i].stationary()) continue;
        level += r.A[i] * wave.incoming[i](r.c_ratio[i] * xi);
      }
      return level;
    };
    // Anchor where the formula is closest to the midpoint of road j.
    const double half = 20.0 / std::min(c_in_min, std::abs(out.speed));
    double anchor = 0.0;
    double best = kInf;
    for (double xi : symmetric_grid(half, 801)) {
      const double gap = std::abs(formula(xi) - out.midpoint());
      if (gap < best) {
        best = gap;
        anchor = xi;
      }
    }
    const double target = std::clamp(formula(anchor), out.lo + 1e-3 * out.width(), out.hi - 1e-3 * out.width());
    wave.outgoing.push_back(base.shifted(base.locate(target) - anchor));
  }
  classify_wave(wave);
  return wave;
}

NetworkWave assemble_stationary(const StarNetwork& net, const std::vector<EndStates>& incoming) {
  if (any_moving(incoming)) throw std::invalid_argument("assemble_stationary expects stationary incoming states");
  const auto candidates = match_end_states(net, incoming);
  std::vector<EndStates> outgoing;
  for (std::size_t j = 0; j < net.n(); ++j) {
    if (candidates[j].size() != 1) {
      throw std::domain_error("stationary flux matching fails on outgoing road " + std::to_string(j + 1));
    }
    outgoing.push_back(candidates[j].front());
  }
  double s_lo = 0.0;
  double s_hi = 1.0;
  for (const std::vector<EndStates>* group : {&incoming, static_cast<const std::vector<EndStates>*>(&outgoing)}) {
    for (const EndStates& e : *group) {
      s_lo = std::max(s_lo, e.lo);
      s_hi = std::min(s_hi, e.hi);
    }
  }
  const bool common = s_lo < s_hi;
  const double level = 0.5 * (s_lo + s_hi);
  auto place = [&](const Road& road, const EndStates& e) {
    EndStates ends = e;
    ends.speed = 0.0;
    const Profile p = build_profile(road, ends);
    return common ? p.shifted(p.locate(level)) : p;
  };
  NetworkWave wave;
  for (std::size_t i = 0; i < net.m(); ++i) wave.incoming.push_back(place(net.incoming[i], incoming[i]));
  for (std::size_t j = 0; j < net.n(); ++j) wave.outgoing.push_back(place(net.outgoing[j], outgoing[j]));
  classify_wave(wave);
  return wave;
}

NetworkWave assemble(const StarNetwork& net, const WaveSkeleton& skeleton) {
  if (!any_moving(skeleton.incoming)) return assemble_stationary(net, skeleton.incoming);
  return assemble_wave(net, skeleton);
}

ContinuityResult check_continuity(const StarNetwork& net, const NetworkWave& wave,
                                  const ContinuityOptions& options) {
  ContinuityResult result;
  std::vector<const Profile*> all;
  for (const Profile& p : wave.incoming) all.push_back(&p);
  for (const Profile& p : wave.outgoing) all.push_back(&p);
  std::vector<EndStates> ends;
  for (const Profile* p : all) ends.push_back(p->ends());

  const bool moving = any_moving(ends);
  const std::vector<double> ts =
      moving ? symmetric_grid(options.span / min_moving_speed(ends), options.points) : std::vector<double>{0.0};
  auto speed_of = [](const Profile* p) { return p->ends().stationary() ? 0.0 : p->ends().speed; };
  for (double t : ts) {
    const double ref = (*all[0])(speed_of(all[0]) * t);
    for (std::size_t h = 1; h < all.size(); ++h) {
      result.residual = std::max(result.residual, std::abs((*all[h])(speed_of(all[h]) * t) - ref));
    }
  }
  result.continuous = result.residual <= options.tolerance;
  if (!result.continuous) return result;
  result.common = CommonTrace{*all[0], speed_of(all[0])};
  if (!moving) return result;

  const auto in = wave.incoming_ends();
  const auto out = wave.outgoing_ends();
  const CouplingConstants cc = coupling_constants(net, in, out);
  double sum_in = 0.0;
  double sum_out = 0.0;
  for (double c : cc.c_in) sum_in += c;
  for (double c : cc.c_out) sum_out += c;
  result.total_speed_residual = std::abs(sum_out - sum_in);
  for (std::size_t j = 0; j < net.n(); ++j) {
    double routed = 0.0;
    double a_sum = 0.0;
    for (std::size_t i = 0; i < net.m(); ++i) {
      routed += net.alpha[i][j] * cc.c_in[i];
      if (cc.c_in[i] != 0.0) a_sum += cc.A[i][j];
    }
    result.speed_residual = std::max(result.speed_residual, std::abs(cc.c_out[j] - routed));
    result.a_sum_residual = std::max(result.a_sum_residual, std::abs(a_sum - 1.0));
    result.kappa_residual = std::max(result.kappa_residual, std::abs(cc.kappa[j]));
  }
  for (const EndStates& e : ends) {
    result.end_state_residual =
        std::max({result.end_state_residual, std::abs(e.lo - ends[0].lo), std::abs(e.hi - ends[0].hi)});
  }
  constexpr double kRelationTolerance = 1e-8;
  result.relations_hold = result.speed_residual <= kRelationTolerance &&
                          result.total_speed_residual <= kRelationTolerance &&
                          result.kappa_residual <= kRelationTolerance &&
                          result.a_sum_residual <= kRelationTolerance &&
                          result.end_state_residual <= kRelationTolerance;
  return result;
}

namespace {

// f - D phi' of road h at the node, for time t.
double node_flux(const Road& road, const Profile& p, double t) {
  const double c = p.ends().stationary() ? 0.0 : p.ends().speed;
  const double xi = -c * t;
  const double rho = p(xi);
  return road.flux.value(rho) - road.diffusivity.value(rho) * p.slope(xi);
}

// c phi(c t) + g(lo), pushed far enough that the profile has reached its ends.
double far_trace(const Road& road, const Profile& p, double sign) {
  const EndStates& e = p.ends();
  const double c = e.stationary() ? 0.0 : e.speed;
  const double g_lo = road.flux.value(e.lo) - c * e.lo;
  if (c == 0.0) return g_lo;
  double x = 100.0;
  double phi = p(sign * c > 0.0 ? x : -x);
  while (x < 1e12) {
    phi = p(sign * c > 0.0 ? x : -x);
    const double target = sign * c > 0.0 ? e.hi : e.lo;
    if (std::abs(phi - target) <= 1e-15) break;
    x *= 2.0;
  }
  return c * phi + g_lo;
}

}  // namespace

NodeFluxReport node_flux_residuals(const StarNetwork& net, const NetworkWave& wave, std::size_t points,
                                   double span) {
  NodeFluxReport report;
  std::vector<EndStates> ends = wave.incoming_ends();
  for (const EndStates& e : wave.outgoing_ends()) ends.push_back(e);
  const double c_min = min_moving_speed(ends);
  const double half = std::isfinite(c_min) ? span / c_min : span;
  for (double t : symmetric_grid(half, points)) {
    std::vector<double> fin(net.m());
    double total_in = 0.0;
    double total_out = 0.0;
    for (std::size_t i = 0; i < net.m(); ++i) {
      fin[i] = node_flux(net.incoming[i], wave.incoming[i], t);
      total_in += fin[i];
    }
    for (std::size_t j = 0; j < net.n(); ++j) {
      const double fj = node_flux(net.outgoing[j], wave.outgoing[j], t);
      total_out += fj;
      double routed = 0.0;
      for (std::size_t i = 0; i < net.m(); ++i) routed += net.alpha[i][j] * fin[i];
      report.coupling_residual = std::max(report.coupling_residual, std::abs(fj - routed));
    }
    report.conservation_residual = std::max(report.conservation_residual, std::abs(total_out - total_in));
  }
  for (double sign : {1.0, -1.0}) {
    std::vector<double> traces(net.m());
    for (std::size_t i = 0; i < net.m(); ++i) traces[i] = far_trace(net.incoming[i], wave.incoming[i], sign);
    for (std::size_t j = 0; j < net.n(); ++j) {
      const Road& road = net.outgoing[j];
      const Profile& p = wave.outgoing[j];
      const double tj = far_trace(road, p, sign);
      double routed = 0.0;
      double matched = 0.0;
      for (std::size_t i = 0; i < net.m(); ++i) {
        routed += net.alpha[i][j] * traces[i];
        const EndStates& e = wave.incoming[i].ends();
        matched += net.alpha[i][j] * (sign > 0.0 ? flux_high(net.incoming[i], e) : flux_low(net.incoming[i], e));
      }
      const double own = sign > 0.0 ? flux_high(road, p.ends()) : flux_low(road, p.ends());
      report.limit_residual =
          std::max({report.limit_residual, std::abs(tj - routed), std::abs(tj - own), std::abs(own - matched)});
    }
  }
  return report;
}

double outgoing_formula_residual(const StarNetwork& net, const NetworkWave& wave, std::size_t points,
                                 double span) {
  const auto in = wave.incoming_ends();
  const auto out = wave.outgoing_ends();
  if (!any_moving(in)) return 0.0;
  const CouplingConstants cc = coupling_constants(net, in, out);
  double residual = 0.0;
  for (std::size_t j = 0; j < net.n(); ++j) {
    const double c_min = std::min(min_moving_speed(in), std::abs(out[j].speed));
    for (double xi : symmetric_grid(span / c_min, points)) {
      double level = -cc.k[j];
      for (std::size_t i : cc.moving_incoming) level += cc.A[i][j] * wave.incoming[i](cc.c_ratio[i][j] * xi);
      residual = std::max(residual, std::abs(wave.outgoing[j](xi) - level));
    }
  }
  return residual;
}

double omega_spread(const NetworkWave& wave) {
  double lo = kInf;
  double hi = -kInf;
  bool any_finite = false;
  bool any_infinite = false;
  for (const auto* group : {&wave.incoming, &wave.outgoing}) {
    for (const Profile& p : *group) {
      const auto w = p.omega();
      if (!w) continue;
      if (std::isfinite(*w)) {
        any_finite = true;
        lo = std::min(lo, *w);
        hi = std::max(hi, *w);
      } else {
        any_infinite = true;
      }
    }
  }
  if (!any_finite) return 0.0;
  if (any_infinite) return kInf;
  return hi - lo;
}

double outgoing_shift(double c1, double cj, double sigma1) { return cj * sigma1 / c1; }

double linear_outgoing_shift(double v_ratio, double delta_ratio, double sigma1) {
  return v_ratio * sigma1 / delta_ratio;
}

std::vector<double> shift_constraints(const NetworkWave& wave) {
  std::vector<double> out;
  if (wave.incoming.empty()) return out;
  const Profile& first = wave.incoming.front();
  const double c1 = first.ends().speed;
  for (const Profile& p : wave.outgoing) {
    out.push_back(std::abs(p.ends().speed * first.shift() - c1 * p.shift()));
  }
  return out;
}

}  // namespace twnet
