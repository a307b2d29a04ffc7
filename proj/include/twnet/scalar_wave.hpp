#pragma once

// Traveling waves on a single road: end states and speed, the reduced flux,
// monotone profiles (closed form or quadrature), degeneracy detection and the
// limiting slopes at finite degeneracy points.

#include <cmath>
#include <memory>
#include <optional>
#include <string_view>

#include "twnet/graph_model.hpp"

namespace twnet {

/// Speeds with |c| at or below this value are treated as zero.
inline constexpr double kStationaryTolerance = 1e-12;

/// Left and right limits of a profile together with the induced speed.
struct EndStates {
  double lo = 0.0;
  double hi = 1.0;
  double speed = 0.0;

  double midpoint() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool stationary() const { return std::abs(speed) <= kStationaryTolerance; }
};

/// Secant slope (f(hi) - f(lo)) / (hi - lo).  Closed forms are used for the
/// quadratic flux.  Throws std::invalid_argument unless 0 <= lo < hi <= 1.
double wave_speed(const FluxSpec& flux, double lo, double hi);
double wave_speed(const Road& road, double lo, double hi);

EndStates make_end_states(const FluxSpec& flux, double lo, double hi);
EndStates make_end_states(const Road& road, double lo, double hi);

/// g(rho) = f(rho) - c rho for a fixed pair of end states.
class ReducedFlux {
 public:
  ReducedFlux(const Road& road, const EndStates& ends);

  double g(double rho) const;
  /// Common value g(lo) = g(hi).
  double g_end() const { return g_end_; }
  /// g(rho) - g(lo), evaluated so that no cancellation occurs near the ends.
  double excess(double rho) const;
  /// Same as excess() at rho = lo + a = hi - b; a and b are passed separately
  /// so that tiny distances to either end state keep full relative accuracy.
  double excess_split(double a, double b) const;
  /// (g(rho) - g(lo)) / D(rho), and 0 where D vanishes.
  double gamma(double rho) const;

  const EndStates& ends() const { return ends_; }
  const Road& road() const { return road_; }

 private:
  Road road_;
  EndStates ends_;
  double g_end_;
};

/// Whether the profile reaches lo at a finite point (D(0) = 0 and lo = 0).
bool finite_nu_minus(const Road& road, const EndStates& ends);
/// Whether the profile reaches hi at a finite point (D(1) = 0 and hi = 1).
bool finite_nu_plus(const Road& road, const EndStates& ends);

enum class ProfileMethod { Quadrature, Logistic, LinearDiffusionExplicit, LinearDiffusionImplicit };
std::string_view to_string(ProfileMethod method);

/// Unshifted monotone profile normalized by value(0) = (lo + hi) / 2.
class ProfileShape {
 public:
  virtual ~ProfileShape() = default;
  virtual double value(double xi) const = 0;
  virtual double slope(double xi) const = 0;
  /// -infinity when the lower end state is only reached asymptotically.
  virtual double nu_minus() const = 0;
  /// +infinity when the upper end state is only reached asymptotically.
  virtual double nu_plus() const = 0;
  virtual ProfileMethod method() const = 0;
};

/// Profile phi(xi) = shape(xi + shift) with its end states.
class Profile {
 public:
  Profile(std::shared_ptr<const ProfileShape> shape, EndStates ends, double shift = 0.0);

  double operator()(double xi) const { return evaluate(xi); }
  double evaluate(double xi) const { return shape_->value(xi + shift_); }
  /// phi'(xi); zero outside (nu_minus, nu_plus).
  double slope(double xi) const { return shape_->slope(xi + shift_); }

  double nu_minus() const { return shape_->nu_minus() - shift_; }
  double nu_plus() const { return shape_->nu_plus() - shift_; }
  double shift() const { return shift_; }
  const EndStates& ends() const { return ends_; }
  ProfileMethod method() const { return shape_->method(); }

  /// The profile xi -> phi(xi + extra).
  Profile shifted(double extra) const { return Profile(shape_, ends_, shift_ + extra); }
  /// Point where the profile takes the given value, which must lie strictly
  /// between the end states.
  double locate(double value) const;
  /// min(nu_minus / c, nu_plus / c); empty for stationary profiles.
  std::optional<double> omega() const;

 private:
  std::shared_ptr<const ProfileShape> shape_;
  EndStates ends_;
  double shift_;
};

struct ProfileOptions {
  enum class Method { Auto, Quadrature, ClosedForm };
  Method method = Method::Auto;
  /// Point at which the profile takes the midpoint value.
  double anchor = 0.0;
};

/// Builds the profile solving D(phi) phi' = g(phi) - g(lo) with the given end
/// states.  Auto picks a closed form for quadratic flux with constant or
/// linear diffusivity and quadrature otherwise.  Quadrature failures raise
/// QuadratureError with the achieved error estimate.
Profile build_profile(const Road& road, const EndStates& ends, const ProfileOptions& options = {});

/// Quadrature profile; exposed for cross-checks against the closed forms.
std::shared_ptr<const ProfileShape> quadrature_shape(const Road& road, const EndStates& ends);

struct BoundarySlopes {
  std::optional<double> left;
  std::optional<double> right;
};

/// Limits of phi' at the finite degeneracy points.  Throws std::logic_error
/// when neither side is degenerate.
BoundarySlopes boundary_slopes(const Road& road, const EndStates& ends);

struct Classification {
  bool stationary = false;
  bool degenerate = false;
  double nu_minus = 0.0;
  double nu_plus = 0.0;
  std::optional<double> omega;
};

Classification classify(const Profile& profile);
Classification classify(const Road& road, const EndStates& ends);

}  // namespace twnet
