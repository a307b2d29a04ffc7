#pragma once

// Aggregated analysis of a configured network and its JSON report.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twnet/config.hpp"
#include "twnet/coupling.hpp"
#include "twnet/special_cases.hpp"

namespace twnet {

using Json = nlohmann::ordered_json;

struct CheckOutcome {
  Json report;
  bool exists = false;
  /// The assembled wave when one exists.
  std::optional<NetworkWave> wave;
};

/// Incoming end states from the config, or from the closed-form analysis when
/// the config omits them and that analysis predicts a unique wave.
std::optional<std::vector<EndStates>> resolve_incoming_ends(const RunConfig& config);

/// Stationary existence, the non-stationary existence test, the closed-form
/// criteria of the single-incoming families and the continuity check.
CheckOutcome analyze_network(const RunConfig& config);

Json ends_json(const EndStates& e);
Json wave_json(const StarNetwork& net, const NetworkWave& wave, const ContinuityOptions& continuity = {});
/// Closed-form section; null for networks outside the single-incoming families.
Json special_case_json(const StarNetwork& net);

struct ProfileSamples {
  std::vector<double> xi;
  std::vector<double> phi;
  std::vector<double> dphi;
};

ProfileSamples sample_profile(const Profile& profile, std::size_t points, double span);

}  // namespace twnet
