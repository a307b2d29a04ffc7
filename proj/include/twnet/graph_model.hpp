#pragma once

// Domain types for a star network: roads carrying a concave flux and a
// (possibly degenerate) diffusivity, joined at one node by distribution
// coefficients.  Densities are normalized to [0, 1] on every road.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace twnet {

enum class FluxKind { Quadratic, Logarithmic, Tabulated };
enum class DiffusivityKind { Constant, Linear, Tabulated };
enum class Orientation { Incoming, Outgoing };

std::string_view to_string(FluxKind kind);
std::string_view to_string(DiffusivityKind kind);
std::string_view to_string(Orientation orientation);

using ScalarFn = std::function<double(double)>;

/// Hyperbolic flux f on [0, 1].
///
/// Quadratic:   f(rho) = v rho (1 - rho)
/// Logarithmic: f(rho) = -v rho ln(rho), continuously extended by f(0) = 0
/// Tabulated:   user callables for f and f'; no differentiation is attempted.
///
/// Evaluation outside [0, 1] throws std::out_of_range.
class FluxSpec {
 public:
  static FluxSpec quadratic(double v);
  static FluxSpec logarithmic(double v);
  static FluxSpec tabulated(ScalarFn f, ScalarFn df);

  FluxKind kind() const { return kind_; }
  /// Speed scale; 1 for tabulated fluxes.
  double v() const { return v_; }

  double value(double rho) const;
  /// f'(rho).  The logarithmic flux returns +infinity at rho = 0.
  double derivative(double rho) const;

  /// Maximizer of f on [0, 1] (0.5 and 1/e for the analytic kinds).
  double argmax() const { return argmax_; }
  double max_value() const { return max_value_; }

  /// Root of f(rho) = y on the increasing branch [0, argmax].
  double inverse_left(double y) const;
  /// Root of f(rho) = y on the decreasing branch [argmax, 1].
  double inverse_right(double y) const;

 private:
  FluxSpec(FluxKind kind, double v, ScalarFn f, ScalarFn df);

  FluxKind kind_;
  double v_;
  ScalarFn f_;
  ScalarFn df_;
  double argmax_ = 0.5;
  double max_value_ = 0.0;
};

/// Diffusivity D on [0, 1]: Constant D = delta, Linear D = delta rho, or
/// tabulated callables for D and D'.
class DiffusivitySpec {
 public:
  static DiffusivitySpec constant(double delta);
  static DiffusivitySpec linear(double delta);
  static DiffusivitySpec tabulated(ScalarFn d, ScalarFn dd);

  DiffusivityKind kind() const { return kind_; }
  /// Anticipation-length scale; 1 for tabulated diffusivities.
  double delta() const { return delta_; }

  double value(double rho) const;
  double derivative(double rho) const;

  bool vanishes_at_zero() const { return zero_at_0_; }
  bool vanishes_at_one() const { return zero_at_1_; }
  /// Upper bound of D over [0, 1] (exact for the analytic kinds, sampled otherwise).
  double max_value() const { return max_value_; }

 private:
  DiffusivitySpec(DiffusivityKind kind, double delta, ScalarFn d, ScalarFn dd);

  DiffusivityKind kind_;
  double delta_;
  ScalarFn d_;
  ScalarFn dd_;
  bool zero_at_0_ = false;
  bool zero_at_1_ = false;
  double max_value_ = 0.0;
};

struct Road {
  std::size_t id = 0;
  Orientation orientation = Orientation::Incoming;
  FluxSpec flux;
  DiffusivitySpec diffusivity;
};

/// m incoming and n outgoing roads with the m x n distribution matrix alpha.
/// alpha[i][j] is the share of the flow of incoming road i routed to outgoing
/// road j; every row sums to one.
struct StarNetwork {
  std::vector<Road> incoming;
  std::vector<Road> outgoing;
  std::vector<std::vector<double>> alpha;

  std::size_t m() const { return incoming.size(); }
  std::size_t n() const { return outgoing.size(); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline constexpr double kRowSumTolerance = 1e-12;

/// Checks the structural assumptions on a network: non-empty road sets,
/// alpha shape, positivity and row sums, f(0) = f(1) = 0, strict concavity
/// of f (midpoint secant test on a 1000-point grid), D > 0 on (0, 1).
ValidationReport validate(const StarNetwork& net);

/// Flux concavity test used by validate(): every interior grid point lies
/// strictly above the chord of its two neighbours.
bool passes_concavity_test(const FluxSpec& flux, std::size_t points = 1000);

}  // namespace twnet
