#pragma once

// Randomized agreement sweeps between the generic existence test and the
// closed-form criteria, and between the continuity check and the
// proportional-family algebra.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace twnet {

enum class SweepFamily { QuadraticConstant, QuadraticLinear, Logarithmic, Continuity };
std::string to_string(SweepFamily family);

struct SweepOptions {
  std::size_t draws = 1000;
  std::uint64_t seed = 20240917;
};

struct SweepResult {
  SweepFamily family = SweepFamily::QuadraticConstant;
  std::size_t draws = 0;
  /// Verdict comparisons (a draw may probe several end-state pairs).
  std::size_t probes = 0;
  /// Probes where the closed-form verdict is positive.
  std::size_t positives = 0;
  std::size_t disagreements = 0;
  /// Disagreements whose parameters lie within 1e-6 of a criterion boundary.
  std::size_t boundary_disagreements = 0;
  /// Probes where the generic test threw.
  std::size_t failures = 0;
  /// disagreements / probes.
  double disagreement_rate = 0.0;
  std::vector<std::string> examples;
};

SweepResult run_sweep(SweepFamily family, const SweepOptions& options = {});

}  // namespace twnet
