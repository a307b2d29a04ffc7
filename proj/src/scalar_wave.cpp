#include "twnet/scalar_wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "twnet/numerics.hpp"
#include "twnet/special_cases.hpp"

namespace twnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative width of the end-state layers where the excess is linearized.
constexpr double kLayer = 1e-6;

void check_ends(double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
    std::ostringstream os;
    os << "end states must satisfy 0 <= lo < hi <= 1 (got " << lo << ", " << hi << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double wave_speed(const FluxSpec& flux, double lo, double hi) {
  check_ends(lo, hi);
  if (flux.kind() == FluxKind::Quadratic) return flux.v() * (1.0 - hi - lo);
  return (flux.value(hi) - flux.value(lo)) / (hi - lo);
}

double wave_speed(const Road& road, double lo, double hi) { return wave_speed(road.flux, lo, hi); }

EndStates make_end_states(const FluxSpec& flux, double lo, double hi) {
  return EndStates{lo, hi, wave_speed(flux, lo, hi)};
}

EndStates make_end_states(const Road& road, double lo, double hi) {
  return make_end_states(road.flux, lo, hi);
}

ReducedFlux::ReducedFlux(const Road& road, const EndStates& ends)
    : road_(road), ends_(ends), g_end_(0.0) {
  check_ends(ends.lo, ends.hi);
  // Same expression at both ends; the lower end is exact when lo = 0.
  g_end_ = road_.flux.value(ends_.lo) - ends_.speed * ends_.lo;
}

double ReducedFlux::g(double rho) const { return road_.flux.value(rho) - ends_.speed * rho; }

double ReducedFlux::excess_split(double a, double b) const {
  const FluxSpec& f = road_.flux;
  const double lo = ends_.lo;
  const double hi = ends_.hi;
  const double c = ends_.speed;
  if (f.kind() == FluxKind::Quadratic) return f.v() * a * b;
  if (f.kind() == FluxKind::Logarithmic) {
    const double v = f.v();
    if (a <= 0.0 || b <= 0.0) return 0.0;
    if (lo == 0.0) {
      if (a <= b) return v * a * (std::log(hi) - std::log(a));
      return -v * a * std::log1p(-b / hi);
    }
    // ln(lo + a) and ln(hi - b) through log1p keep full accuracy near both ends.
    if (a <= b) return -v * a * std::log(lo) - v * (lo + a) * std::log1p(a / lo) - c * a;
    return v * b * std::log(hi) - v * (hi - b) * std::log1p(-b / hi) + c * b;
  }
  const double width = hi - lo;
  if (a <= kLayer * width) {
    const double slope = f.derivative(lo);
    if (std::isfinite(slope)) return (slope - c) * a;
  }
  if (b <= kLayer * width) return (c - f.derivative(hi)) * b;
  if (a <= b) return f.value(lo + a) - f.value(lo) - c * a;
  return f.value(hi - b) - f.value(hi) + c * b;
}

double ReducedFlux::excess(double rho) const {
  return excess_split(rho - ends_.lo, ends_.hi - rho);
}

double ReducedFlux::gamma(double rho) const {
  const double d = road_.diffusivity.value(rho);
  if (d == 0.0) return 0.0;
  return excess(rho) / d;
}

bool finite_nu_minus(const Road& road, const EndStates& ends) {
  return road.diffusivity.vanishes_at_zero() && ends.lo == 0.0;
}

bool finite_nu_plus(const Road& road, const EndStates& ends) {
  return road.diffusivity.vanishes_at_one() && ends.hi == 1.0;
}

std::string_view to_string(ProfileMethod method) {
  switch (method) {
    case ProfileMethod::Quadrature: return "quadrature";
    case ProfileMethod::Logistic: return "logistic";
    case ProfileMethod::LinearDiffusionExplicit: return "linear-diffusion-explicit";
    case ProfileMethod::LinearDiffusionImplicit: return "linear-diffusion-implicit";
  }
  return "unknown";
}

Profile::Profile(std::shared_ptr<const ProfileShape> shape, EndStates ends, double shift)
    : shape_(std::move(shape)), ends_(ends), shift_(shift) {
  if (!shape_) throw std::invalid_argument("profile needs a shape");
}

double Profile::locate(double value) const {
  if (!(value > ends_.lo && value < ends_.hi)) {
    throw std::domain_error("locate: value must lie strictly between the end states");
  }
  double a = -1.0;
  double b = 1.0;
  while (evaluate(a) >= value) {
    a *= 2.0;
    if (a < -1e12) throw std::runtime_error("locate: value not reached");
  }
  while (evaluate(b) < value) {
    b *= 2.0;
    if (b > 1e12) throw std::runtime_error("locate: value not reached");
  }
  return bisect_increasing([&](double xi) { return evaluate(xi) - value; }, a, b);
}

std::optional<double> Profile::omega() const {
  if (ends_.stationary()) return std::nullopt;
  const double c = ends_.speed;
  return std::min(nu_minus() / c, nu_plus() / c);
}

namespace {

/// Profile obtained from xi(s) = integral of D(r) / (g(r) - g(lo)) from the
/// midpoint, written in the logit variable u with s = lo + width * sigma(u).
/// In that variable the integrand is bounded at both ends.
class QuadratureShape final : public ProfileShape {
 public:
  QuadratureShape(const Road& road, const EndStates& ends)
      : reduced_(road, ends), diffusivity_(road.diffusivity), lo_(ends.lo), hi_(ends.hi),
        width_(ends.hi - ends.lo) {
    build_table();
    nu_minus_ = -kInf;
    nu_plus_ = kInf;
    if (finite_nu_minus(road, ends)) nu_minus_ = confirm_finite(0);
    if (finite_nu_plus(road, ends)) nu_plus_ = confirm_finite(us_.size() - 1);
  }

  double value(double xi) const override {
    const Point p = solve(xi);
    return p.s;
  }

  double slope(double xi) const override {
    if (xi <= nu_minus_ || xi >= nu_plus_) return 0.0;
    const Point p = solve(xi);
    if (p.a <= 0.0 || p.b <= 0.0) return 0.0;
    const double d = diffusivity_.value(p.s);
    if (d == 0.0) return 0.0;
    return reduced_.excess_split(p.a, p.b) / d;
  }

  double nu_minus() const override { return nu_minus_; }
  double nu_plus() const override { return nu_plus_; }
  ProfileMethod method() const override { return ProfileMethod::Quadrature; }

 private:
  struct Point {
    double s;
    double a;
    double b;
  };

  Point at_u(double u) const {
    const double a = width_ * logistic(u);
    const double b = width_ * logistic(-u);
    const double s = u < 0.0 ? lo_ + a : hi_ - b;
    return Point{std::clamp(s, lo_, hi_), a, b};
  }

  // d xi / d u.
  double integrand(double u) const {
    const Point p = at_u(u);
    if (p.a <= 0.0 || p.b <= 0.0) return 0.0;
    const double excess = reduced_.excess_split(p.a, p.b);
    if (!(excess > 0.0)) return 0.0;
    const double d = diffusivity_.value(p.s);
    return d * (p.a / width_) * p.b / excess;
  }

  double segment(double u0, double u1) const {
    return integrate([this](double u) { return integrand(u); }, u0, u1, 1e-13, 1e-14);
  }

  void build_table() {
    std::vector<double> neg;
    for (double u = 0.0; u > -40.0; u -= 0.5) neg.push_back(u);
    for (double u = -40.0; u >= -700.0; u -= 4.0) neg.push_back(u);
    us_.assign(neg.rbegin(), neg.rend());
    for (double u = 0.5; u < 40.0; u += 0.5) us_.push_back(u);
    for (double u = 40.0; u <= 700.0; u += 4.0) us_.push_back(u);
    zero_index_ = static_cast<std::size_t>(std::find(us_.begin(), us_.end(), 0.0) - us_.begin());
    xis_.assign(us_.size(), 0.0);
    for (std::size_t k = zero_index_ + 1; k < us_.size(); ++k) {
      xis_[k] = xis_[k - 1] + segment(us_[k - 1], us_[k]);
    }
    for (std::size_t k = zero_index_; k-- > 0;) {
      xis_[k] = xis_[k + 1] - segment(us_[k], us_[k + 1]);
    }
  }

  // The algebraic test says the end is reached at finite xi; the integrand at
  // the end of the table must then have decayed below the confirmation level.
  double confirm_finite(std::size_t index) const {
    const double tail = integrand(us_[index]);
    if (!(tail < 1e-6)) {
      throw QuadratureError("degeneracy point did not converge", tail);
    }
    return xis_[index];
  }

  Point solve(double xi) const {
    if (xi <= xis_.front()) return Point{lo_, 0.0, width_};
    if (xi >= xis_.back()) return Point{hi_, width_, 0.0};
    const auto it = std::upper_bound(xis_.begin(), xis_.end(), xi);
    const std::size_t k = static_cast<std::size_t>(it - xis_.begin()) - 1;
    double ua = us_[k];
    double ub = us_[k + 1];
    const double base = xis_[k];
    if (xis_[k + 1] == base) return at_u(ua);
    double u = ua + (ub - ua) * (xi - base) / (xis_[k + 1] - base);
    for (int iter = 0; iter < 200; ++iter) {
      const double residual = base + segment(us_[k], u) - xi;
      if (residual < 0.0) {
        ua = u;
      } else {
        ub = u;
      }
      const double h = integrand(u);
      double next = h > 0.0 ? u - residual / h : 0.5 * (ua + ub);
      if (!(next > ua && next < ub)) next = 0.5 * (ua + ub);
      const double step = std::abs(next - u);
      u = next;
      // Relative in u so that values near either end keep full precision.
      const double scale = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u));
      if (step <= scale || ub - ua <= scale) break;
    }
    return at_u(u);
  }

  ReducedFlux reduced_;
  DiffusivitySpec diffusivity_;
  double lo_;
  double hi_;
  double width_;
  std::vector<double> us_;
  std::vector<double> xis_;
  std::size_t zero_index_ = 0;
  double nu_minus_ = -kInf;
  double nu_plus_ = kInf;
};

bool closed_form_available(const Road& road) {
  return road.flux.kind() == FluxKind::Quadratic &&
         (road.diffusivity.kind() == DiffusivityKind::Constant ||
          road.diffusivity.kind() == DiffusivityKind::Linear);
}

}  // namespace

std::shared_ptr<const ProfileShape> quadrature_shape(const Road& road, const EndStates& ends) {
  return std::make_shared<QuadratureShape>(road, ends);
}

Profile build_profile(const Road& road, const EndStates& ends, const ProfileOptions& options) {
  check_ends(ends.lo, ends.hi);
  std::shared_ptr<const ProfileShape> shape;
  const bool closed = closed_form_available(road);
  if (options.method == ProfileOptions::Method::ClosedForm && !closed) {
    throw std::invalid_argument("no closed-form profile for this flux/diffusivity pair");
  }
  if (options.method != ProfileOptions::Method::Quadrature && closed) {
    const double v = road.flux.v();
    const double delta = road.diffusivity.delta();
    if (road.diffusivity.kind() == DiffusivityKind::Constant) {
      shape = logistic_shape(v, delta, ends.lo, ends.hi);
    } else {
      shape = linear_diffusion_shape(v, delta, ends.lo, ends.hi);
    }
  } else {
    shape = quadrature_shape(road, ends);
  }
  return Profile(shape, ends, 0.0 - options.anchor);
}

BoundarySlopes boundary_slopes(const Road& road, const EndStates& ends) {
  BoundarySlopes out;
  const bool left = finite_nu_minus(road, ends);
  const bool right = finite_nu_plus(road, ends);
  if (!left && !right) throw std::logic_error("non-degenerate: no finite degeneracy point");
  if (left) {
    const double dd = road.diffusivity.derivative(0.0);
    const double df = road.flux.derivative(0.0);
    if (dd > 0.0 && std::isfinite(df)) {
      const double hi = ends.hi;
      out.left = (hi * df - road.flux.value(hi)) / (hi * dd);
    } else {
      out.left = kInf;
    }
  }
  if (right) {
    const double dd = road.diffusivity.derivative(1.0);
    if (dd < 0.0) {
      const double lo = ends.lo;
      out.right = ((1.0 - lo) * road.flux.derivative(1.0) + road.flux.value(lo)) / ((1.0 - lo) * dd);
    } else {
      out.right = kInf;
    }
  }
  return out;
}

Classification classify(const Profile& profile) {
  Classification out;
  out.stationary = profile.ends().stationary();
  out.nu_minus = profile.nu_minus();
  out.nu_plus = profile.nu_plus();
  out.degenerate = std::isfinite(out.nu_minus) || std::isfinite(out.nu_plus);
  out.omega = profile.omega();
  return out;
}

Classification classify(const Road& road, const EndStates& ends) {
  return classify(build_profile(road, ends));
}

}  // namespace twnet
