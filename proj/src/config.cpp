#include "twnet/config.hpp"

#include <fstream>

namespace twnet {

namespace {

double number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double positive(const nlohmann::json& j, const char* key, double fallback) {
  const double v = number(j, key, fallback);
  if (!(v > 0.0)) throw ConfigError(std::string("field '") + key + "' must be positive");
  return v;
}

std::string text(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError(std::string("missing string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

Road parse_road(const nlohmann::json& j, std::size_t id) {
  if (!j.is_object()) throw ConfigError("each road must be an object");
  const std::string orientation = text(j, "orientation");
  Orientation o;
  if (orientation == "incoming") {
    o = Orientation::Incoming;
  } else if (orientation == "outgoing") {
    o = Orientation::Outgoing;
  } else {
    throw ConfigError("orientation must be 'incoming' or 'outgoing'");
  }
  if (!j.contains("flux")) throw ConfigError("road without 'flux'");
  if (!j.contains("diff")) throw ConfigError("road without 'diff'");
  return Road{id, o, parse_flux(j.at("flux")), parse_diffusivity(j.at("diff"))};
}

EndStates parse_ends(const Road& road, const nlohmann::json& j) {
  if (j.is_array()) {
    if (j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      throw ConfigError("end states must be [lo, hi]");
    }
    const double lo = j[0].get<double>();
    const double hi = j[1].get<double>();
    if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw ConfigError("end states need 0 <= lo < hi <= 1");
    return make_end_states(road, lo, hi);
  }
  if (j.is_object() && j.value("stationary", false)) {
    const double lo = number(j, "lo", -1.0);
    const FluxSpec& f = road.flux;
    if (!(0.0 <= lo && lo < f.argmax())) throw ConfigError("stationary lo must lie in [0, argmax f)");
    EndStates e = make_end_states(road, lo, f.inverse_right(f.value(lo)));
    e.speed = 0.0;
    return e;
  }
  throw ConfigError("end states must be [lo, hi] or {\"lo\": x, \"stationary\": true}");
}

}  // namespace

FluxSpec parse_flux(const nlohmann::json& j) {
  const std::string kind = text(j, "kind");
  const double v = positive(j, "v", 1.0);
  if (kind == "quadratic") return FluxSpec::quadratic(v);
  if (kind == "logarithmic") return FluxSpec::logarithmic(v);
  throw ConfigError("unknown flux kind '" + kind + "'");
}

DiffusivitySpec parse_diffusivity(const nlohmann::json& j) {
  const std::string kind = text(j, "kind");
  const double delta = positive(j, "delta", 1.0);
  if (kind == "constant") return DiffusivitySpec::constant(delta);
  if (kind == "linear") return DiffusivitySpec::linear(delta);
  throw ConfigError("unknown diffusivity kind '" + kind + "'");
}

RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("roads") || !j.at("roads").is_array()) throw ConfigError("missing array 'roads'");
  RunConfig cfg;
  std::size_t id = 0;
  for (const auto& r : j.at("roads")) {
    Road road = parse_road(r, ++id);
    (road.orientation == Orientation::Incoming ? cfg.network.incoming : cfg.network.outgoing).push_back(road);
  }
  if (!j.contains("alpha")) {
    if (cfg.network.m() != 1) throw ConfigError("'alpha' is required unless there is one incoming road");
    cfg.network.alpha = {std::vector<double>(cfg.network.n(), 1.0 / static_cast<double>(cfg.network.n()))};
    if (cfg.network.n() == 1) cfg.network.alpha = {{1.0}};
  } else {
    try {
      cfg.network.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("'alpha' must be a matrix of numbers");
    }
  }
  const ValidationReport report = validate(cfg.network);
  if (!report.ok()) throw ConfigError("invalid network: " + report.violations.front());

  if (j.contains("ends")) {
    const auto& ends = j.at("ends");
    if (!ends.contains("incoming") || !ends.at("incoming").is_array()) {
      throw ConfigError("'ends' needs an 'incoming' array");
    }
    const auto& list = ends.at("incoming");
    if (list.size() != cfg.network.m()) throw ConfigError("one end-state entry per incoming road expected");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.incoming_ends.push_back(parse_ends(cfg.network.incoming[i], list[i]));
    }
  }

  if (j.contains("condition")) {
    const auto& c = j.at("condition");
    cfg.condition.points = static_cast<std::size_t>(positive(c, "points", 401));
    cfg.condition.span = positive(c, "span", 20.0);
    cfg.condition.tolerance = positive(c, "tolerance", 1e-7);
  }
  if (j.contains("continuity")) {
    const auto& c = j.at("continuity");
    cfg.continuity.points = static_cast<std::size_t>(positive(c, "points", 401));
    cfg.continuity.span = positive(c, "span", 20.0);
    cfg.continuity.tolerance = positive(c, "tolerance", 1e-8);
  }
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    cfg.simulation.length = positive(s, "length", 40.0);
    cfg.simulation.dx = positive(s, "dx", 1e-2);
    cfg.simulation.final_time = positive(s, "final_time", 5.0);
    cfg.simulation.dt = number(s, "dt", 0.0);
    if (cfg.simulation.dt < 0.0) throw ConfigError("field 'dt' must not be negative");
  }
  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    cfg.sampling.points = static_cast<std::size_t>(positive(s, "points", 401));
    cfg.sampling.span = positive(s, "span", 20.0);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace twnet
