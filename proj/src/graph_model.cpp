#include "twnet/graph_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "twnet/numerics.hpp"

namespace twnet {

std::string_view to_string(FluxKind kind) {
  switch (kind) {
    case FluxKind::Quadratic: return "quadratic";
    case FluxKind::Logarithmic: return "logarithmic";
    case FluxKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

std::string_view to_string(DiffusivityKind kind) {
  switch (kind) {
    case DiffusivityKind::Constant: return "constant";
    case DiffusivityKind::Linear: return "linear";
    case DiffusivityKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::Incoming ? "incoming" : "outgoing";
}

namespace {

void check_density(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    std::ostringstream os;
    os << "density " << rho << " outside [0, 1]";
    throw std::out_of_range(os.str());
  }
}

void check_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

FluxSpec::FluxSpec(FluxKind kind, double v, ScalarFn f, ScalarFn df)
    : kind_(kind), v_(v), f_(std::move(f)), df_(std::move(df)) {
  switch (kind_) {
    case FluxKind::Quadratic:
      argmax_ = 0.5;
      break;
    case FluxKind::Logarithmic:
      argmax_ = std::exp(-1.0);
      break;
    case FluxKind::Tabulated: {
      // Coarse golden-section bracket, then refine on the sign change of f'.
      const double guess = golden_section_max(f_, 0.0, 1.0, 1e-6);
      const double lo = std::max(0.0, guess - 1e-4);
      const double hi = std::min(1.0, guess + 1e-4);
      if (df_(lo) > 0.0 && df_(hi) < 0.0) {
        argmax_ = bisect_increasing([this](double r) { return -df_(r); }, lo, hi, 1e-14);
      } else {
        argmax_ = golden_section_max(f_, 0.0, 1.0, 1e-10);
      }
      break;
    }
  }
  max_value_ = f_(argmax_);
}

FluxSpec FluxSpec::quadratic(double v) {
  check_positive(v, "flux speed v");
  return FluxSpec(
      FluxKind::Quadratic, v, [v](double r) { return v * r * (1.0 - r); },
      [v](double r) { return v * (1.0 - 2.0 * r); });
}

FluxSpec FluxSpec::logarithmic(double v) {
  check_positive(v, "flux speed v");
  return FluxSpec(
      FluxKind::Logarithmic, v,
      [v](double r) { return r > 0.0 ? -v * r * std::log(r) : 0.0; },
      [v](double r) {
        return r > 0.0 ? -v * (std::log(r) + 1.0) : std::numeric_limits<double>::infinity();
      });
}

FluxSpec FluxSpec::tabulated(ScalarFn f, ScalarFn df) {
  if (!f || !df) throw std::invalid_argument("tabulated flux needs f and f'");
  return FluxSpec(FluxKind::Tabulated, 1.0, std::move(f), std::move(df));
}

double FluxSpec::value(double rho) const {
  check_density(rho);
  if (kind_ != FluxKind::Tabulated && (rho == 0.0 || rho == 1.0)) return 0.0;
  return f_(rho);
}

double FluxSpec::derivative(double rho) const {
  check_density(rho);
  return df_(rho);
}

double FluxSpec::inverse_left(double y) const {
  if (y < 0.0 || y > max_value_ * (1.0 + 1e-15)) {
    throw std::domain_error("flux inverse: value outside [0, max f]");
  }
  if (y >= max_value_) return argmax_;
  if (y == 0.0) return 0.0;
  if (kind_ == FluxKind::Quadratic) {
    const double disc = std::max(0.0, 1.0 - 4.0 * y / v_);
    // Rationalized root avoids cancellation for small y.
    return 2.0 * y / v_ / (1.0 + std::sqrt(disc));
  }
  return bisect_increasing([&](double r) { return value(r) - y; }, 0.0, argmax_);
}

double FluxSpec::inverse_right(double y) const {
  if (y < 0.0 || y > max_value_ * (1.0 + 1e-15)) {
    throw std::domain_error("flux inverse: value outside [0, max f]");
  }
  if (y >= max_value_) return argmax_;
  if (y == 0.0) return 1.0;
  if (kind_ == FluxKind::Quadratic) {
    const double disc = std::max(0.0, 1.0 - 4.0 * y / v_);
    return 1.0 - 2.0 * y / v_ / (1.0 + std::sqrt(disc));
  }
  return bisect_increasing([&](double r) { return y - value(r); }, argmax_, 1.0);
}

DiffusivitySpec::DiffusivitySpec(DiffusivityKind kind, double delta, ScalarFn d, ScalarFn dd)
    : kind_(kind), delta_(delta), d_(std::move(d)), dd_(std::move(dd)) {
  zero_at_0_ = d_(0.0) == 0.0;
  zero_at_1_ = d_(1.0) == 0.0;
  switch (kind_) {
    case DiffusivityKind::Constant:
    case DiffusivityKind::Linear:
      max_value_ = delta_;
      break;
    case DiffusivityKind::Tabulated:
      for (int k = 0; k <= 1000; ++k) max_value_ = std::max(max_value_, d_(k / 1000.0));
      break;
  }
}

DiffusivitySpec DiffusivitySpec::constant(double delta) {
  check_positive(delta, "diffusivity delta");
  return DiffusivitySpec(
      DiffusivityKind::Constant, delta, [delta](double) { return delta; },
      [](double) { return 0.0; });
}

DiffusivitySpec DiffusivitySpec::linear(double delta) {
  check_positive(delta, "diffusivity delta");
  return DiffusivitySpec(
      DiffusivityKind::Linear, delta, [delta](double r) { return delta * r; },
      [delta](double) { return delta; });
}

DiffusivitySpec DiffusivitySpec::tabulated(ScalarFn d, ScalarFn dd) {
  if (!d || !dd) throw std::invalid_argument("tabulated diffusivity needs D and D'");
  return DiffusivitySpec(DiffusivityKind::Tabulated, 1.0, std::move(d), std::move(dd));
}

double DiffusivitySpec::value(double rho) const {
  check_density(rho);
  return d_(rho);
}

double DiffusivitySpec::derivative(double rho) const {
  check_density(rho);
  return dd_(rho);
}

bool passes_concavity_test(const FluxSpec& flux, std::size_t points) {
  if (points < 3) points = 3;
  const double h = 1.0 / static_cast<double>(points - 1);
  double prev = flux.value(0.0);
  double cur = flux.value(h);
  for (std::size_t k = 1; k + 1 < points; ++k) {
    const double next = flux.value(std::min(1.0, (k + 1) * h));
    if (!(cur > 0.5 * (prev + next))) return false;
    prev = cur;
    cur = next;
  }
  return true;
}

namespace {

void validate_road(const Road& road, const std::string& label, ValidationReport& report) {
  const FluxSpec& f = road.flux;
  if (f.value(0.0) != 0.0 || f.value(1.0) != 0.0) {
    report.violations.push_back(label + ": flux must vanish at 0 and 1");
  }
  if (!passes_concavity_test(f)) {
    report.violations.push_back(label + ": flux not concave");
  }
  const DiffusivitySpec& d = road.diffusivity;
  for (int k = 1; k < 1000; ++k) {
    if (!(d.value(k / 1000.0) > 0.0)) {
      report.violations.push_back(label + ": diffusivity not positive on (0, 1)");
      break;
    }
  }
}

}  // namespace

ValidationReport validate(const StarNetwork& net) {
  ValidationReport report;
  if (net.incoming.empty()) report.violations.push_back("no incoming roads");
  if (net.outgoing.empty()) report.violations.push_back("no outgoing roads");
  for (std::size_t i = 0; i < net.m(); ++i) {
    if (net.incoming[i].orientation != Orientation::Incoming) {
      report.violations.push_back("incoming road " + std::to_string(i) + ": wrong orientation");
    }
    validate_road(net.incoming[i], "incoming road " + std::to_string(i), report);
  }
  for (std::size_t j = 0; j < net.n(); ++j) {
    if (net.outgoing[j].orientation != Orientation::Outgoing) {
      report.violations.push_back("outgoing road " + std::to_string(j) + ": wrong orientation");
    }
    validate_road(net.outgoing[j], "outgoing road " + std::to_string(j), report);
  }
  if (net.alpha.size() != net.m()) {
    report.violations.push_back("alpha must have one row per incoming road");
    return report;
  }
  for (std::size_t i = 0; i < net.m(); ++i) {
    const auto& row = net.alpha[i];
    if (row.size() != net.n()) {
      report.violations.push_back("alpha row " + std::to_string(i) + ": wrong length");
      continue;
    }
    double sum = 0.0;
    for (double a : row) {
      if (!(a > 0.0 && a <= 1.0)) {
        report.violations.push_back("alpha row " + std::to_string(i) + ": entry outside (0, 1]");
      }
      sum += a;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      report.violations.push_back("alpha row " + std::to_string(i) + ": row sum != 1");
    }
  }
  return report;
}

}  // namespace twnet
