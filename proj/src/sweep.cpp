#include "twnet/sweep.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "twnet/coupling.hpp"
#include "twnet/special_cases.hpp"

namespace twnet {

namespace {

constexpr double kBoundaryMargin = 1e-6;
constexpr std::size_t kMaxExamples = 8;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return pick(0, 1) == 1; }

  std::vector<double> alpha(std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
      x = uniform(0.2, 1.0);
      total += x;
    }
    for (double& x : w) x /= total;
    if (n == 1) w[0] = 1.0;
    return w;
  }

  /// Multiplier bounded away from one.
  double perturbation() {
    const double size = uniform(0.05, 0.7);
    return std::exp(coin() ? size : -size);
  }

 private:
  std::mt19937_64 rng_;
};

FamilyParams base_params(Draw& d, FluxKind flux, DiffusivityKind diff, std::size_t n) {
  FamilyParams p;
  p.flux = flux;
  p.diffusivity = diff;
  p.v1 = d.uniform(0.5, 2.0);
  p.delta1 = d.uniform(0.5, 2.0);
  p.alpha = d.alpha(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.v.push_back(d.uniform(0.5, 2.0));
    p.delta.push_back(d.uniform(0.5, 2.0));
  }
  return p;
}

/// alpha v_{1,j} = 1 and v_{1,j}^2 = delta_{1,j} on every outgoing road.
void make_proportional(FamilyParams& p) {
  for (std::size_t j = 0; j < p.n(); ++j) {
    p.v[j] = p.alpha[j] * p.v1;
    p.delta[j] = p.delta1 * p.alpha[j] * p.alpha[j];
  }
}

/// alpha_{1,j} delta_{1,j} = v_{1,j} on road j.
void impose_criterion(FamilyParams& p, std::size_t j) { p.delta[j] = p.alpha[j] * p.delta1 * p.v[j] / p.v1; }

/// Single outgoing road with the ratios v_{1,2} = v and delta_{1,2} = d.
FamilyParams single_road(Draw& d, FluxKind flux, DiffusivityKind diff, double v, double delta) {
  FamilyParams p = base_params(d, flux, diff, 1);
  p.v[0] = p.v1 / v;
  p.delta[0] = p.delta1 / delta;
  return p;
}

/// Ratios satisfying the threshold window, below the smallest or above the
/// largest threshold.
std::pair<double, double> window_ratios(Draw& d, bool linear) {
  const double delta = d.uniform(1.2, 6.0);
  const double low = linear ? std::min({delta, std::sqrt(delta), std::cbrt(delta * delta)})
                            : std::min(delta, std::sqrt(delta));
  const double high = linear ? std::max({delta, std::sqrt(delta), std::cbrt(delta * delta)})
                             : std::max(delta, std::sqrt(delta));
  const double v = d.coin() ? d.uniform(0.2, 0.95) * low : d.uniform(1.05, 2.0) * high;
  return {v, delta};
}

bool admissible(const FamilyParams& p, const IntervalTables& t, double lo, double hi) {
  if (!t.nonstationary_admissible(lo) || !t.nonstationary_admissible(hi)) return false;
  if (p.flux == FluxKind::Quadratic) return std::abs(1.0 - lo - hi) >= 0.02;
  const double ylo = lo > 0.0 ? -lo * std::log(lo) : 0.0;
  const double yhi = hi > 0.0 ? -hi * std::log(hi) : 0.0;
  return std::abs(ylo - yhi) >= 0.005;
}

/// Random admissible moving end states; lower state 0 when requested.
std::optional<std::pair<double, double>> random_ends(Draw& d, const FamilyParams& p, bool zero_lo) {
  const IntervalTables t = interval_tables(p);
  for (int attempt = 0; attempt < 500; ++attempt) {
    const double lo = zero_lo ? 0.0 : d.uniform(0.0, 0.9);
    const double hi = d.uniform(lo + 0.05, 1.0);
    if (admissible(p, t, lo, hi)) return std::make_pair(lo, hi);
  }
  return std::nullopt;
}

std::string describe(const FamilyParams& p, double lo, double hi) {
  std::ostringstream os;
  os.precision(6);
  os << "v1=" << p.v1 << " delta1=" << p.delta1 << " alpha=[";
  for (double a : p.alpha) os << a << ' ';
  os << "] v=[";
  for (double v : p.v) os << v << ' ';
  os << "] delta=[";
  for (double x : p.delta) os << x << ' ';
  os << "] ends=(" << lo << ", " << hi << ")";
  return os.str();
}

class Tally {
 public:
  explicit Tally(SweepFamily family) { result_.family = family; }

  void record(bool expected, bool generic, bool near_boundary, const std::string& text) {
    ++result_.probes;
    if (expected) ++result_.positives;
    if (expected == generic) return;
    ++result_.disagreements;
    if (near_boundary) ++result_.boundary_disagreements;
    if (result_.examples.size() < kMaxExamples) {
      result_.examples.push_back(std::string(expected ? "expected exists, got none: " : "expected none, got exists: ") +
                                 text);
    }
  }

  void failure(const std::string& text) {
    ++result_.probes;
    ++result_.failures;
    ++result_.disagreements;
    if (result_.examples.size() < kMaxExamples) result_.examples.push_back("generic test threw: " + text);
  }

  SweepResult finish(std::size_t draws) {
    result_.draws = draws;
    result_.disagreement_rate =
        result_.probes == 0 ? 0.0 : static_cast<double>(result_.disagreements) / static_cast<double>(result_.probes);
    return result_;
  }

 private:
  SweepResult result_;
};

bool generic_exists(const StarNetwork& net, double lo, double hi) {
  const EndStates e = make_end_states(net.incoming.front(), lo, hi);
  return check_traveling_condition(net, {e}).exists;
}

void probe(Tally& tally, const FamilyParams& p, double lo, double hi, bool expected, bool near_boundary) {
  const StarNetwork net = make_family_network(p);
  const std::string text = describe(p, lo, hi);
  try {
    tally.record(expected, generic_exists(net, lo, hi), near_boundary, text);
  } catch (const std::exception& e) {
    tally.failure(text + " (" + e.what() + ")");
  }
}

double criterion_margin(const FamilyParams& p) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.n(); ++j) {
    m = std::min(m, std::abs(p.alpha[j] * p.delta_ratio(j) / p.v_ratio(j) - 1.0));
  }
  return m;
}

double continuity_margin(const FamilyParams& p) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.n(); ++j) {
    const double v = p.v_ratio(j);
    m = std::min({m, std::abs(v * v / p.delta_ratio(j) - 1.0), std::abs(p.alpha[j] * v - 1.0)});
  }
  return m;
}

// Near a boundary when some relation is almost, but not exactly, satisfied.
bool near(double margin) { return margin > 1e-12 && margin < kBoundaryMargin; }

SweepResult quadratic_constant(const SweepOptions& options) {
  Draw d(options.seed);
  Tally tally(SweepFamily::QuadraticConstant);
  for (std::size_t k = 0; k < options.draws; ++k) {
    FamilyParams p = base_params(d, FluxKind::Quadratic, DiffusivityKind::Constant, d.pick(1, 3));
    for (std::size_t j = 0; j < p.n(); ++j) impose_criterion(p, j);
    if (k % 2 == 1) p.delta[d.pick(0, p.n() - 1)] *= d.perturbation();
    const auto ends = random_ends(d, p, false);
    if (!ends) continue;
    const bool expected = quad_const_D_criterion(p).exists;
    probe(tally, p, ends->first, ends->second, expected, near(criterion_margin(p)));
  }
  return tally.finish(options.draws);
}

bool closed_form_verdict(const FamilyParams& p, const DegenerateAnalysis& a, double lo, double hi) {
  switch (a.verdict) {
    case FamilyVerdict::Families: return admissible(p, interval_tables(p), lo, hi);
    case FamilyVerdict::Unique: return lo == 0.0 && std::abs(hi - a.incoming_hi) <= 1e-9;
    case FamilyVerdict::None: return false;
  }
  return false;
}

template <typename Analyze>
SweepResult degenerate_family(SweepFamily family, FluxKind flux, DiffusivityKind diff, Analyze analyze,
                              const SweepOptions& options) {
  Draw d(options.seed + static_cast<std::uint64_t>(family));
  Tally tally(family);
  const bool linear = diff == DiffusivityKind::Linear;
  // The closed forms for the logarithmic flux cover waves with lower state 0.
  const bool zero_lo_only = flux == FluxKind::Logarithmic;
  for (std::size_t k = 0; k < options.draws; ++k) {
    FamilyParams p;
    switch (k % 3) {
      case 0:
        p = base_params(d, flux, diff, d.pick(1, 2));
        make_proportional(p);
        break;
      case 1: {
        const auto [v, delta] = window_ratios(d, linear);
        p = single_road(d, flux, diff, v, delta);
        break;
      }
      default: p = base_params(d, flux, diff, d.pick(1, 2)); break;
    }
    const DegenerateAnalysis a = analyze(p);
    const bool boundary = near(continuity_margin(p));
    if (a.verdict == FamilyVerdict::Unique) {
      probe(tally, p, 0.0, a.incoming_hi, true, boundary);
    }
    if (const auto ends = random_ends(d, p, zero_lo_only || d.coin())) {
      probe(tally, p, ends->first, ends->second, closed_form_verdict(p, a, ends->first, ends->second), boundary);
    }
  }
  return tally.finish(options.draws);
}

SweepResult continuity(const SweepOptions& options) {
  Draw d(options.seed + static_cast<std::uint64_t>(SweepFamily::Continuity));
  Tally tally(SweepFamily::Continuity);
  for (std::size_t k = 0; k < options.draws; ++k) {
    const DiffusivityKind diff = (k / 4) % 2 == 0 ? DiffusivityKind::Constant : DiffusivityKind::Linear;
    FamilyParams p = base_params(d, FluxKind::Quadratic, diff, d.pick(1, 3));
    make_proportional(p);
    if (k % 4 == 2) {
      // Keeps alpha delta = v but breaks alpha v = 1 on one road.
      const std::size_t j = d.pick(0, p.n() - 1);
      p.v[j] *= d.perturbation();
      impose_criterion(p, j);
    } else if (k % 4 == 3) {
      p.v[d.pick(0, p.n() - 1)] *= d.perturbation();
      p.delta[d.pick(0, p.n() - 1)] *= d.perturbation();
    }
    bool expected = true;
    for (std::size_t j = 0; j < p.n(); ++j) {
      const double v = p.v_ratio(j);
      expected = expected && nearly_equal(v * v, p.delta_ratio(j)) && nearly_equal(p.alpha[j] * v, 1.0);
    }
    const auto ends = random_ends(d, p, false);
    if (!ends) continue;
    const StarNetwork net = make_family_network(p);
    const std::string text = describe(p, ends->first, ends->second);
    try {
      const EndStates e = make_end_states(net.incoming.front(), ends->first, ends->second);
      const ConditionResult cond = check_traveling_condition(net, {e});
      bool generic = false;
      for (const WaveSkeleton& w : cond.witnesses) {
        if (check_continuity(net, assemble_wave(net, w)).continuous) {
          generic = true;
          break;
        }
      }
      tally.record(expected, generic, near(continuity_margin(p)), text);
    } catch (const std::exception& ex) {
      tally.failure(text + " (" + ex.what() + ")");
    }
  }
  return tally.finish(options.draws);
}

}  // namespace

std::string to_string(SweepFamily family) {
  switch (family) {
    case SweepFamily::QuadraticConstant: return "quadratic-constant";
    case SweepFamily::QuadraticLinear: return "quadratic-linear";
    case SweepFamily::Logarithmic: return "logarithmic-constant";
    case SweepFamily::Continuity: return "continuity";
  }
  return "unknown";
}

SweepResult run_sweep(SweepFamily family, const SweepOptions& options) {
  switch (family) {
    case SweepFamily::QuadraticConstant: return quadratic_constant(options);
    case SweepFamily::QuadraticLinear:
      return degenerate_family(family, FluxKind::Quadratic, DiffusivityKind::Linear, quad_linear_D_analyze, options);
    case SweepFamily::Logarithmic:
      return degenerate_family(family, FluxKind::Logarithmic, DiffusivityKind::Constant, log_analyze, options);
    case SweepFamily::Continuity: return continuity(options);
  }
  return {};
}

}  // namespace twnet
