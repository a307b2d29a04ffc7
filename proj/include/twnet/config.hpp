#pragma once

// JSON run configuration: the network, optional incoming end states and the
// numerical parameters of the commands.  The schema is documented in
// docs/config.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twnet/coupling.hpp"
#include "twnet/graph_model.hpp"
#include "twnet/pde_verify.hpp"
#include "twnet/scalar_wave.hpp"

namespace twnet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfileSampling {
  std::size_t points = 401;
  double span = 20.0;
};

struct RunConfig {
  StarNetwork network;
  /// Incoming end states; empty when the config leaves them to the closed-form analysis.
  std::vector<EndStates> incoming_ends;
  ConditionOptions condition;
  ContinuityOptions continuity;
  SimulationOptions simulation;
  ProfileSampling sampling;
};

FluxSpec parse_flux(const nlohmann::json& j);
DiffusivitySpec parse_diffusivity(const nlohmann::json& j);

/// Throws ConfigError on malformed input.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace twnet
