#pragma once

// Closed-form results for networks with one incoming road whose fluxes and
// diffusivities are scalar multiples of a common pair: f_h = v_h f and
// D_h = delta_h D.  Covers the quadratic flux with constant or linear
// diffusivity and the logarithmic flux with constant diffusivity.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twnet/graph_model.hpp"
#include "twnet/scalar_wave.hpp"

namespace twnet {

/// Relative tolerance for the equalities in the closed-form criteria.
inline constexpr double kCriterionTolerance = 1e-10;

bool nearly_equal(double a, double b, double rel = kCriterionTolerance);

/// Speed scales and diffusivity scales of a single-incoming-road network.
/// Index j runs over the outgoing roads.
struct FamilyParams {
  FluxKind flux = FluxKind::Quadratic;
  DiffusivityKind diffusivity = DiffusivityKind::Constant;
  double v1 = 1.0;
  double delta1 = 1.0;
  std::vector<double> v;
  std::vector<double> delta;
  std::vector<double> alpha;

  std::size_t n() const { return v.size(); }
  /// v_1 / v_j.
  double v_ratio(std::size_t j) const { return v1 / v[j]; }
  /// delta_1 / delta_j.
  double delta_ratio(std::size_t j) const { return delta1 / delta[j]; }
};

/// Extracts the family parameters; empty unless m = 1 and every road uses
/// the same analytic flux kind and the same analytic diffusivity kind.
std::optional<FamilyParams> family_params(const StarNetwork& net);

/// Builds a network realizing the given parameters.
StarNetwork make_family_network(const FamilyParams& params);

/// Half-open or closed interval [lo, hi) / [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool hi_closed = false;

  bool contains(double x) const { return x >= lo && (hi_closed ? x <= hi : x < hi); }
};

struct IntervalTables {
  /// Admissible lower end states of stationary incoming waves, per j.
  std::vector<Interval> stationary;
  /// Admissible incoming end states of non-stationary waves, per j, as a
  /// union of closed pieces.
  std::vector<std::vector<Interval>> nonstationary;
  /// Threshold sets for the degenerate criteria, per j (empty for the
  /// quadratic flux with constant diffusivity).
  std::vector<std::vector<double>> thresholds;

  bool stationary_admissible(double lo1) const;
  bool nonstationary_admissible(double x) const;
};

IntervalTables interval_tables(const FamilyParams& params);

// Quadratic flux, constant diffusivity.

struct QuadConstCriterion {
  /// alpha_{1,j} delta_{1,j} = v_{1,j}.
  std::vector<bool> exists_per_j;
  bool exists = false;
  /// v_{1,j}^2 = delta_{1,j} and alpha_{1,j} v_{1,j} = 1 for every j.
  bool continuity_exists = false;
};

QuadConstCriterion quad_const_D_criterion(const FamilyParams& params);

/// Logistic profile of the quadratic flux with constant diffusivity, shifted
/// so that phi(xi) = psi(xi + sigma).
Profile quad_const_D_profile(double v, double delta, const EndStates& ends, double sigma = 0.0);

// Quadratic flux, linear diffusivity.

enum class FamilyVerdict { Families, Unique, None };
std::string to_string(FamilyVerdict verdict);

struct DegenerateAnalysis {
  FamilyVerdict verdict = FamilyVerdict::None;
  /// Per j: v_{1,j} < min thresholds or v_{1,j} > max thresholds.
  std::vector<bool> window;
  /// Per j: alpha delta = v and v^2 = delta.
  std::vector<bool> continuity_relations;
  /// Whether the per-j expressions for the incoming upper state agree.
  bool chain_consistent = false;
  /// End states of the unique wave (lower states are zero).
  double incoming_hi = 0.0;
  std::vector<double> outgoing_hi;
  std::string reason;
};

DegenerateAnalysis quad_linear_D_analyze(const FamilyParams& params);

/// Profile of the quadratic flux with linear diffusivity: explicit with a
/// kink at -(delta / v) ln 2 when lo = 0, implicit otherwise.
Profile quad_linear_D_profile(double v, double delta, const EndStates& ends, double sigma = 0.0);

/// Implicit identity lo ln(sigma(u)) - hi ln(sigma(-u)) - width (lambda xi + ln 2)
/// evaluated at the profile value; zero for an exact solution.
double linear_diffusion_implicit_residual(double v, double delta, const EndStates& ends, double xi,
                                          double value);

// Logarithmic flux, constant diffusivity.

/// Inverses of -rho ln(rho) on [0, 1/e] and [1/e, 1].  Arguments outside
/// [0, 1/e] throw std::domain_error.
double log_inverse_left(double y);
double log_inverse_right(double y);

DegenerateAnalysis log_analyze(const FamilyParams& params);

// Stationary families.

struct StationaryEnds {
  EndStates incoming;
  std::vector<EndStates> outgoing;
};

/// End states of the stationary wave with the given incoming lower state;
/// empty when it lies outside the admissible intervals.
std::optional<StationaryEnds> stationary_end_states(const FamilyParams& params, double lo1);

// Shared builders for the closed-form shapes used by build_profile().
std::shared_ptr<const ProfileShape> logistic_shape(double v, double delta, double lo, double hi);
std::shared_ptr<const ProfileShape> linear_diffusion_shape(double v, double delta, double lo, double hi);

}  // namespace twnet
