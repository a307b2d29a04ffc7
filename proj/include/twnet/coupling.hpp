#pragma once

// Node algebra of the star network: outgoing end states from flux matching,
// the coupling constants, the existence test for non-stationary waves, wave
// assembly, classification and the continuity check.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "twnet/graph_model.hpp"
#include "twnet/scalar_wave.hpp"

namespace twnet {

/// For every outgoing road, all end-state pairs lo < hi whose flux values
/// match max/min of the routed incoming fluxes.  A list is empty when the
/// solvability inequality fails (strict when every incoming road is
/// stationary).  Up to four candidates per road in the moving case, exactly
/// one in the stationary case.
std::vector<std::vector<EndStates>> match_end_states(const StarNetwork& net,
                                                     const std::vector<EndStates>& incoming);

/// Constants linking the outgoing profiles to the incoming ones.  Matrices are
/// indexed [i][j].
struct CouplingConstants {
  std::vector<double> c_in;
  std::vector<double> c_out;
  /// Incoming roads with zero speed, and the others.
  std::vector<std::size_t> stationary_incoming;
  std::vector<std::size_t> moving_incoming;
  /// End states of road i, swapped when c_i and c_j have opposite signs.
  std::vector<std::vector<double>> L_minus;
  std::vector<std::vector<double>> L_plus;
  /// c_i / c_j.
  std::vector<std::vector<double>> c_ratio;
  /// alpha_{i,j} c_i / c_j.
  std::vector<std::vector<double>> A;
  /// Offset of the outgoing profile, from the upper states.
  std::vector<double> k;
  /// Same offset from the lower states.
  std::vector<double> k_lower;
  /// Same offset from the midpoints.
  std::vector<double> k_midpoint;
  /// c_j k_j.
  std::vector<double> kappa;
  /// |sum_i A (L+ - L-) - (hi_j - lo_j)|.
  std::vector<double> width_residual;
};

/// Throws std::domain_error when some outgoing speed is zero.
CouplingConstants coupling_constants(const StarNetwork& net, const std::vector<EndStates>& incoming,
                                     const std::vector<EndStates>& outgoing);

struct ConditionOptions {
  std::size_t points = 401;
  /// The grid covers [-span / |c|min, span / |c|min].
  double span = 20.0;
  double tolerance = 1e-7;
  std::size_t max_witnesses = 64;
};

struct CandidateVerdict {
  EndStates ends;
  double residual = 0.0;
  bool accepted = false;
};

/// End states of a network wave passing the existence test.
struct WaveSkeleton {
  std::vector<EndStates> incoming;
  std::vector<EndStates> outgoing;
  double residual = 0.0;
};

struct ConditionResult {
  bool exists = false;
  std::string reason;
  /// Smallest residual of the best candidate, maximized over outgoing roads.
  double residual = 0.0;
  std::vector<std::vector<CandidateVerdict>> candidates;
  std::vector<WaveSkeleton> witnesses;
};

/// Existence test for a non-stationary wave with the given incoming end
/// states.  Each outgoing candidate is accepted when the slope identity
/// between the outgoing profile built from the incoming ones and the
/// profile equation of road j holds on the grid.  Incoming profiles use the
/// midpoint normalization; with several incoming roads the verdict refers
/// to that relative placement.
ConditionResult check_traveling_condition(const StarNetwork& net, const std::vector<EndStates>& incoming,
                                          const ConditionOptions& options = {});

/// Slope residual of one outgoing candidate, exposed for diagnostics.
double candidate_residual(const StarNetwork& net, const std::vector<Profile>& incoming, std::size_t j,
                          const EndStates& outgoing, const ConditionOptions& options = {});

enum class Stationarity { Stationary, CompletelyNonStationary, Mixed };
enum class Degeneracy { NonDegenerate, Degenerate, CompletelyDegenerate };
std::string to_string(Stationarity s);
std::string to_string(Degeneracy d);

struct NetworkWave {
  std::vector<Profile> incoming;
  std::vector<Profile> outgoing;
  Stationarity stationarity = Stationarity::Stationary;
  Degeneracy degeneracy = Degeneracy::NonDegenerate;
  bool continuity = false;

  std::vector<EndStates> incoming_ends() const;
  std::vector<EndStates> outgoing_ends() const;
};

/// Classifies the wave from its profiles (sets stationarity and degeneracy).
void classify_wave(NetworkWave& wave);

/// Builds the profiles of a moving wave: incoming profiles with the midpoint
/// normalization and outgoing profiles shifted onto the node-coupling formula.
NetworkWave assemble_wave(const StarNetwork& net, const WaveSkeleton& skeleton);

/// Stationary wave with outgoing states from flux matching; when all open
/// end-state intervals overlap, every profile is shifted to take the
/// midpoint of the overlap at 0.  Throws std::invalid_argument for moving
/// incoming states and std::domain_error when matching fails.
NetworkWave assemble_stationary(const StarNetwork& net, const std::vector<EndStates>& incoming);

struct ContinuityOptions {
  std::size_t points = 401;
  double span = 20.0;
  double tolerance = 1e-8;
};

struct CommonTrace {
  Profile profile;
  /// The common node trace is t -> profile(speed * t).
  double speed = 0.0;
};

struct ContinuityResult {
  bool continuous = false;
  /// max over the grid of |phi_j(c_j t) - phi_i(c_i t)|.
  double residual = 0.0;
  std::optional<CommonTrace> common;
  /// Necessary relations checked for continuous moving waves.
  bool relations_hold = true;
  double speed_residual = 0.0;
  double total_speed_residual = 0.0;
  double kappa_residual = 0.0;
  double a_sum_residual = 0.0;
  double end_state_residual = 0.0;
};

ContinuityResult check_continuity(const StarNetwork& net, const NetworkWave& wave,
                                  const ContinuityOptions& options = {});

struct NodeFluxReport {
  /// max over j and t of |F_j - sum_i alpha_{i,j} F_i|.
  double coupling_residual = 0.0;
  /// max over t of |sum_j F_j - sum_i F_i|.
  double conservation_residual = 0.0;
  /// Far-field traces against the max/min matching values.
  double limit_residual = 0.0;
};

/// Parabolic flux f - D rho_x of every road traced at the node.
NodeFluxReport node_flux_residuals(const StarNetwork& net, const NetworkWave& wave,
                                   std::size_t points = 401, double span = 20.0);

/// max over the grid of |phi_j(xi) - (sum_i A phi_i(c_i xi / c_j) - k_j)|.
double outgoing_formula_residual(const StarNetwork& net, const NetworkWave& wave,
                                 std::size_t points = 401, double span = 20.0);

/// Spread of the rescaled degeneracy points over the moving roads (zero
/// when none is degenerate).
double omega_spread(const NetworkWave& wave);

/// Shift of outgoing road j that keeps c_j sigma_1 = c_1 sigma_j.
double outgoing_shift(double c1, double cj, double sigma1);
/// Linear-diffusivity form of the same relation: v_{1,j} sigma_1 = delta_{1,j} sigma_j.
double linear_outgoing_shift(double v_ratio, double delta_ratio, double sigma1);
/// |c_j sigma_1 - c_1 sigma_j| per outgoing road of a single-incoming wave.
std::vector<double> shift_constraints(const NetworkWave& wave);

/// Stationary when every incoming end-state pair has zero speed; then the
/// wave is built by assemble_stationary, otherwise from the given skeleton.
NetworkWave assemble(const StarNetwork& net, const WaveSkeleton& skeleton);

}  // namespace twnet
