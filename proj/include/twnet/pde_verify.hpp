#pragma once

// Explicit finite-volume time stepping of the coupled parabolic system on
// truncated roads, started from an assembled wave, with a drift measurement
// against the exact translated profiles.
//
// Incoming roads live on [-L, 0] and outgoing roads on [0, L].  Interior
// faces use the Godunov flux of the concave f and harmonic-mean face
// diffusivities.  At the node each outgoing face flux is the alpha-weighted
// sum of the incoming face fluxes; the incoming ones come either from an
// extrapolated trace or from an affine relation F = c rho + g(lo) satisfied
// by the wave.  Far ends are Dirichlet cells fed by a time-dependent far field.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "twnet/coupling.hpp"
#include "twnet/graph_model.hpp"

namespace twnet {

/// Raised when a requested time step exceeds the stability bound.
class StabilityError : public std::runtime_error {
 public:
  StabilityError(const std::string& what, double suggested_dt)
      : std::runtime_error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Raised when an update leaves [0, 1] by more than the clipping tolerance.
class ClippingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoadGrid {
  /// Cell centers.
  std::vector<double> x;
  std::vector<double> rho;
};

struct DiscreteNetworkState {
  std::vector<RoadGrid> incoming;
  std::vector<RoadGrid> outgoing;
  double dx = 0.0;
  double length = 0.0;
  double t = 0.0;

  double mass() const;
};

/// Density imposed in the ghost cell at the far end of a road.
using FarField = std::function<double(bool incoming, std::size_t road, double x, double t)>;

/// rho_h(t, x) = phi_h(x - c_h t).
FarField wave_far_field(const NetworkWave& wave);
FarField constant_far_field(std::vector<double> incoming, std::vector<double> outgoing);

/// Cells of width dx on roads of the given length, filled from the far field at t = 0.
DiscreteNetworkState make_state(const StarNetwork& net, const FarField& initial, double length, double dx);

/// 0.9 min(dx^2 / (2 max D), dx / max |f'|); the logarithmic flux slope is
/// sampled on rho >= 1e-8.
double stable_dt(const StarNetwork& net, double dx);

struct StepDiagnostics {
  /// |sum_j F_j - sum_i F_i| over the node faces.
  double node_conservation = 0.0;
  /// |mass change - dt * (boundary inflow - boundary outflow)|.
  double mass_balance = 0.0;
  /// Largest amount removed by clipping to [0, 1].
  double clipped = 0.0;
};

/// Affine node relation F_i = speed * trace + offset for an incoming road.
/// A traveling wave satisfies it with its own speed and offset g(lo).
struct NodeRelation {
  double speed = 0.0;
  double offset = 0.0;
};

enum class NodeClosure {
  /// Incoming node flux from the extrapolated trace and a one-sided gradient.
  Extrapolated,
  /// Incoming node flux from the per-road affine relation.
  Affine,
};

struct StepOptions {
  double clip_tolerance = 1e-12;
  NodeClosure closure = NodeClosure::Extrapolated;
  /// One per incoming road; used by the affine closure.
  std::vector<NodeRelation> relations;
};

/// Affine relations matching the incoming profiles of a wave.
std::vector<NodeRelation> wave_node_relations(const StarNetwork& net, const NetworkWave& wave);

/// One forward Euler step.  Throws StabilityError when dt exceeds
/// stable_dt / 0.9 and ClippingError on excessive clipping.
StepDiagnostics step(const StarNetwork& net, DiscreteNetworkState& state, const FarField& far, double dt,
                     const StepOptions& options = {});

struct DriftReport {
  double linf = 0.0;
  double l2 = 0.0;
  /// Time offset tau minimizing the L-infinity distance to phi_h(x - c_h (T + tau)).
  double best_shift = 0.0;
};

/// Distance between the state and the translated wave, minimized over a
/// common time offset in [-1, 1].  Cells within one unit of a degeneracy
/// point of the exact profile are skipped.
DriftReport drift(const DiscreteNetworkState& state, const NetworkWave& wave);

struct SimulationOptions {
  double length = 40.0;
  double dx = 1e-2;
  double final_time = 5.0;
  /// Zero selects stable_dt.
  double dt = 0.0;
  /// simulate fills relations from the wave when the affine closure is
  /// selected and none are given.
  StepOptions step{1e-12, NodeClosure::Affine, {}};
};

struct SimulationReport {
  DriftReport drift;
  double dt = 0.0;
  std::size_t steps = 0;
  double max_node_conservation = 0.0;
  double max_mass_balance = 0.0;
  double max_clipped = 0.0;
};

SimulationReport simulate(const StarNetwork& net, const NetworkWave& wave, const SimulationOptions& options = {});

struct RefinementReport {
  SimulationReport coarse;
  SimulationReport fine;
  /// coarse drift / fine drift (L-infinity) for dx and dx / 2.
  double ratio = 0.0;
};

/// Runs at 2 dx and dx.
RefinementReport refinement_study(const StarNetwork& net, const NetworkWave& wave,
                                  const SimulationOptions& options = {});

}  // namespace twnet
