#include "twnet/special_cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "twnet/numerics.hpp"

namespace twnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);
const double kInvE = std::exp(-1.0);

class LogisticShape final : public ProfileShape {
 public:
  LogisticShape(double v, double delta, double lo, double hi)
      : rate_(v / delta * (hi - lo)), lo_(lo), hi_(hi), width_(hi - lo) {}

  double value(double xi) const override {
    const double z = rate_ * xi;
    return z < 0.0 ? lo_ + width_ * logistic(z) : hi_ - width_ * logistic(-z);
  }
  double slope(double xi) const override {
    const double z = rate_ * xi;
    return rate_ * width_ * logistic(z) * logistic(-z);
  }
  double nu_minus() const override { return -kInf; }
  double nu_plus() const override { return kInf; }
  ProfileMethod method() const override { return ProfileMethod::Logistic; }

 private:
  double rate_;
  double lo_;
  double hi_;
  double width_;
};

/// lo = 0: phi = (hi / 2)(2 - exp(-lambda xi)) right of the kink, 0 left of it.
class LinearExplicitShape final : public ProfileShape {
 public:
  LinearExplicitShape(double v, double delta, double hi)
      : lambda_(v / delta), hi_(hi), kink_(-kLn2 * delta / v) {}

  double value(double xi) const override {
    if (xi <= kink_) return 0.0;
    return hi_ - 0.5 * hi_ * std::exp(-lambda_ * xi);
  }
  double slope(double xi) const override {
    if (xi <= kink_) return 0.0;
    return 0.5 * hi_ * lambda_ * std::exp(-lambda_ * xi);
  }
  double nu_minus() const override { return kink_; }
  double nu_plus() const override { return kInf; }
  ProfileMethod method() const override { return ProfileMethod::LinearDiffusionExplicit; }

 private:
  double lambda_;
  double hi_;
  double kink_;
};

/// lo > 0: in the logit variable u with phi = lo + width sigma(u),
///   lo ln sigma(u) - hi ln sigma(-u) = width (lambda xi + ln 2).
class LinearImplicitShape final : public ProfileShape {
 public:
  LinearImplicitShape(double v, double delta, double lo, double hi)
      : lambda_(v / delta), lo_(lo), hi_(hi), width_(hi - lo) {}

  double value(double xi) const override {
    const double u = solve(xi);
    return u < 0.0 ? lo_ + width_ * logistic(u) : hi_ - width_ * logistic(-u);
  }
  double slope(double xi) const override {
    const double u = solve(xi);
    const double a = width_ * logistic(u);
    const double b = width_ * logistic(-u);
    const double s = u < 0.0 ? lo_ + a : hi_ - b;
    return lambda_ * a * b / s;
  }
  double nu_minus() const override { return -kInf; }
  double nu_plus() const override { return kInf; }
  ProfileMethod method() const override { return ProfileMethod::LinearDiffusionImplicit; }

 private:
  double lhs(double u) const { return lo_ * log_logistic(u) - hi_ * log_logistic(-u); }
  double dlhs(double u) const { return lo_ * logistic(-u) + hi_ * logistic(u); }

  // lhs is increasing with slope in [lo, hi], which brackets the root.
  double solve(double xi) const {
    const double target = width_ * (lambda_ * xi + kLn2);
    const double offset = target - lhs(0.0);
    double a = std::min(offset / lo_, offset / hi_);
    double b = std::max(offset / lo_, offset / hi_);
    double u = offset / (0.5 * (lo_ + hi_));
    for (int iter = 0; iter < 200; ++iter) {
      const double r = lhs(u) - target;
      if (r < 0.0) {
        a = u;
      } else {
        b = u;
      }
      double next = u - r / dlhs(u);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      const double step = std::abs(next - u);
      u = next;
      if (step <= 1e-15 * std::max(1.0, std::abs(u)) || b - a <= 1e-15 * std::max(1.0, std::abs(u))) {
        break;
      }
    }
    return u;
  }

  double lambda_;
  double lo_;
  double hi_;
  double width_;
};

bool analytic(const Road& road) {
  return road.flux.kind() != FluxKind::Tabulated &&
         road.diffusivity.kind() != DiffusivityKind::Tabulated;
}

Road make_road(std::size_t id, Orientation o, FluxKind fk, DiffusivityKind dk, double v,
               double delta) {
  FluxSpec flux = fk == FluxKind::Quadratic ? FluxSpec::quadratic(v) : FluxSpec::logarithmic(v);
  DiffusivitySpec diff =
      dk == DiffusivityKind::Constant ? DiffusivitySpec::constant(delta) : DiffusivitySpec::linear(delta);
  return Road{id, o, std::move(flux), std::move(diff)};
}

double min_of(const std::vector<double>& xs) { return *std::min_element(xs.begin(), xs.end()); }
double max_of(const std::vector<double>& xs) { return *std::max_element(xs.begin(), xs.end()); }

}  // namespace

bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

std::shared_ptr<const ProfileShape> logistic_shape(double v, double delta, double lo, double hi) {
  return std::make_shared<LogisticShape>(v, delta, lo, hi);
}

std::shared_ptr<const ProfileShape> linear_diffusion_shape(double v, double delta, double lo, double hi) {
  if (lo == 0.0) return std::make_shared<LinearExplicitShape>(v, delta, hi);
  return std::make_shared<LinearImplicitShape>(v, delta, lo, hi);
}

std::optional<FamilyParams> family_params(const StarNetwork& net) {
  if (net.m() != 1 || net.n() == 0 || net.alpha.size() != 1 || net.alpha[0].size() != net.n()) {
    return std::nullopt;
  }
  const Road& in = net.incoming[0];
  if (!analytic(in)) return std::nullopt;
  FamilyParams p;
  p.flux = in.flux.kind();
  p.diffusivity = in.diffusivity.kind();
  p.v1 = in.flux.v();
  p.delta1 = in.diffusivity.delta();
  for (std::size_t j = 0; j < net.n(); ++j) {
    const Road& out = net.outgoing[j];
    if (!analytic(out) || out.flux.kind() != p.flux || out.diffusivity.kind() != p.diffusivity) {
      return std::nullopt;
    }
    p.v.push_back(out.flux.v());
    p.delta.push_back(out.diffusivity.delta());
    p.alpha.push_back(net.alpha[0][j]);
  }
  return p;
}

StarNetwork make_family_network(const FamilyParams& params) {
  StarNetwork net;
  net.incoming.push_back(
      make_road(0, Orientation::Incoming, params.flux, params.diffusivity, params.v1, params.delta1));
  for (std::size_t j = 0; j < params.n(); ++j) {
    net.outgoing.push_back(make_road(j + 1, Orientation::Outgoing, params.flux, params.diffusivity,
                                     params.v[j], params.delta[j]));
  }
  net.alpha = {params.alpha};
  return net;
}

bool IntervalTables::stationary_admissible(double lo1) const {
  return std::all_of(stationary.begin(), stationary.end(),
                     [&](const Interval& iv) { return iv.contains(lo1); });
}

bool IntervalTables::nonstationary_admissible(double x) const {
  return std::all_of(nonstationary.begin(), nonstationary.end(), [&](const auto& pieces) {
    return std::any_of(pieces.begin(), pieces.end(), [&](const Interval& iv) { return iv.contains(x); });
  });
}

IntervalTables interval_tables(const FamilyParams& params) {
  IntervalTables t;
  const bool quadratic = params.flux == FluxKind::Quadratic;
  const double argmax = quadratic ? 0.5 : kInvE;
  for (std::size_t j = 0; j < params.n(); ++j) {
    const double r = params.alpha[j] * params.v_ratio(j);
    if (r <= 1.0) {
      t.stationary.push_back(Interval{0.0, argmax, false});
      t.nonstationary.push_back({Interval{0.0, 1.0, true}});
    } else {
      double left = 0.0;
      double right = 1.0;
      if (quadratic) {
        const double root = std::sqrt(1.0 - 1.0 / r);
        left = 0.5 * (1.0 - root);
        right = 0.5 * (1.0 + root);
      } else {
        left = log_inverse_left(kInvE / r);
        right = log_inverse_right(kInvE / r);
      }
      t.stationary.push_back(Interval{0.0, left, false});
      t.nonstationary.push_back({Interval{0.0, left, true}, Interval{right, 1.0, true}});
    }
    const double a = params.alpha[j];
    const double d = params.delta_ratio(j);
    if (quadratic && params.diffusivity == DiffusivityKind::Linear) {
      t.thresholds.push_back({a * d, std::sqrt(d), std::cbrt(a * d * d)});
    } else if (!quadratic && params.diffusivity == DiffusivityKind::Constant) {
      t.thresholds.push_back({a * d, std::sqrt(d)});
    } else {
      t.thresholds.emplace_back();
    }
  }
  return t;
}

QuadConstCriterion quad_const_D_criterion(const FamilyParams& params) {
  QuadConstCriterion out;
  out.exists = true;
  out.continuity_exists = true;
  for (std::size_t j = 0; j < params.n(); ++j) {
    const double v = params.v_ratio(j);
    const double d = params.delta_ratio(j);
    const double a = params.alpha[j];
    const bool ok = nearly_equal(a * d, v);
    out.exists_per_j.push_back(ok);
    out.exists = out.exists && ok;
    out.continuity_exists = out.continuity_exists && nearly_equal(v * v, d) && nearly_equal(a * v, 1.0);
  }
  return out;
}

Profile quad_const_D_profile(double v, double delta, const EndStates& ends, double sigma) {
  return Profile(logistic_shape(v, delta, ends.lo, ends.hi), ends, sigma);
}

Profile quad_linear_D_profile(double v, double delta, const EndStates& ends, double sigma) {
  return Profile(linear_diffusion_shape(v, delta, ends.lo, ends.hi), ends, sigma);
}

double linear_diffusion_implicit_residual(double v, double delta, const EndStates& ends, double xi,
                                          double value) {
  const double width = ends.hi - ends.lo;
  const double a = value - ends.lo;
  const double b = ends.hi - value;
  return ends.lo * std::log(a / width) - ends.hi * std::log(b / width) -
         width * (v / delta * xi + kLn2);
}

std::string to_string(FamilyVerdict verdict) {
  switch (verdict) {
    case FamilyVerdict::Families: return "infinite-families";
    case FamilyVerdict::Unique: return "unique";
    case FamilyVerdict::None: return "none";
  }
  return "unknown";
}

namespace {

template <class Upper1, class UpperJ>
DegenerateAnalysis analyze_degenerate(const FamilyParams& params, Upper1 upper1, UpperJ upper_j) {
  DegenerateAnalysis out;
  const IntervalTables tables = interval_tables(params);
  bool all_families = true;
  bool any_families = false;
  bool all_window = true;
  std::vector<double> candidates;
  for (std::size_t j = 0; j < params.n(); ++j) {
    const double v = params.v_ratio(j);
    const double d = params.delta_ratio(j);
    const double a = params.alpha[j];
    const bool fam = nearly_equal(a * d, v) && nearly_equal(v * v, d);
    out.continuity_relations.push_back(fam);
    all_families = all_families && fam;
    any_families = any_families || fam;
    const auto& th = tables.thresholds[j];
    const bool win = v < min_of(th) || v > max_of(th);
    out.window.push_back(win);
    all_window = all_window && win;
    if (win) candidates.push_back(upper1(v, d, a));
  }
  if (all_families) {
    out.verdict = FamilyVerdict::Families;
    out.chain_consistent = true;
    out.reason = "alpha delta = v and v^2 = delta for every outgoing road";
    return out;
  }
  if (any_families) {
    out.reason = "continuity relations hold for some outgoing roads only";
    return out;
  }
  if (!all_window) {
    out.reason = "threshold window fails";
    return out;
  }
  out.chain_consistent = true;
  for (double c : candidates) {
    out.chain_consistent = out.chain_consistent && nearly_equal(c, candidates.front());
  }
  if (!out.chain_consistent) {
    out.reason = "incoming upper state differs across outgoing roads";
    return out;
  }
  out.incoming_hi = candidates.front();
  for (std::size_t j = 0; j < params.n(); ++j) {
    out.outgoing_hi.push_back(upper_j(params.v_ratio(j), params.delta_ratio(j), params.alpha[j]));
  }
  out.verdict = FamilyVerdict::Unique;
  out.reason = "threshold window and consistency chain hold";
  return out;
}

}  // namespace

DegenerateAnalysis quad_linear_D_analyze(const FamilyParams& params) {
  if (params.flux != FluxKind::Quadratic || params.diffusivity != DiffusivityKind::Linear) {
    throw std::invalid_argument("quadratic flux with linear diffusivity required");
  }
  return analyze_degenerate(
      params,
      [](double v, double d, double a) { return v * (d - v * v) / (a * d * d - v * v * v); },
      [](double v, double d, double a) { return a * d * (d - v * v) / (a * d * d - v * v * v); });
}

double log_inverse_left(double y) {
  if (!(y >= 0.0 && y <= kInvE)) throw std::domain_error("inverse flux argument outside [0, 1/e]");
  if (y == 0.0) return 0.0;
  if (y == kInvE) return kInvE;
  return bisect_increasing([y](double r) { return (r > 0.0 ? -r * std::log(r) : 0.0) - y; }, 0.0, kInvE);
}

double log_inverse_right(double y) {
  if (!(y >= 0.0 && y <= kInvE)) throw std::domain_error("inverse flux argument outside [0, 1/e]");
  if (y == 0.0) return 1.0;
  if (y == kInvE) return kInvE;
  return bisect_increasing([y](double r) { return y + r * std::log(r); }, kInvE, 1.0);
}

DegenerateAnalysis log_analyze(const FamilyParams& params) {
  if (params.flux != FluxKind::Logarithmic || params.diffusivity != DiffusivityKind::Constant) {
    throw std::invalid_argument("logarithmic flux with constant diffusivity required");
  }
  return analyze_degenerate(
      params, [](double v, double d, double a) { return std::pow(a * d / v, d / (v * v - d)); },
      [](double v, double d, double a) { return std::pow(a * d / v, v * v / (v * v - d)); });
}

std::optional<StationaryEnds> stationary_end_states(const FamilyParams& params, double lo1) {
  const IntervalTables tables = interval_tables(params);
  if (!tables.stationary_admissible(lo1)) return std::nullopt;
  StationaryEnds out;
  if (params.flux == FluxKind::Quadratic) {
    const double hi1 = 1.0 - lo1;
    out.incoming = EndStates{lo1, hi1, 0.0};
    for (std::size_t j = 0; j < params.n(); ++j) {
      const double root = std::sqrt(1.0 - 4.0 * params.alpha[j] * params.v_ratio(j) * hi1 * lo1);
      out.outgoing.push_back(EndStates{0.5 * (1.0 - root), 0.5 * (1.0 + root), 0.0});
    }
  } else {
    const double y1 = lo1 > 0.0 ? -lo1 * std::log(lo1) : 0.0;
    out.incoming = EndStates{lo1, log_inverse_right(y1), 0.0};
    for (std::size_t j = 0; j < params.n(); ++j) {
      const double y = params.alpha[j] * params.v_ratio(j) * y1;
      out.outgoing.push_back(EndStates{log_inverse_left(y), log_inverse_right(y), 0.0});
    }
  }
  return out;
}

}  // namespace twnet
