#include "twnet/wave_report.hpp"

#include <algorithm>
#include <cmath>

namespace twnet {

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json road_json(const Road& road) {
  Json j;
  j["id"] = road.id;
  j["orientation"] = std::string(to_string(road.orientation));
  j["flux"] = {{"kind", std::string(to_string(road.flux.kind()))}, {"v", road.flux.v()}};
  j["diff"] = {{"kind", std::string(to_string(road.diffusivity.kind()))}, {"delta", road.diffusivity.delta()}};
  return j;
}

Json profile_json(const Profile& p) {
  Json j = ends_json(p.ends());
  j["shift"] = p.shift();
  j["method"] = std::string(to_string(p.method()));
  j["nu_minus"] = finite_or_null(p.nu_minus());
  j["nu_plus"] = finite_or_null(p.nu_plus());
  const auto w = p.omega();
  j["omega"] = w ? finite_or_null(*w) : Json(nullptr);
  return j;
}

Json analysis_json(const DegenerateAnalysis& a) {
  Json j;
  j["verdict"] = to_string(a.verdict);
  j["reason"] = a.reason;
  j["window"] = a.window;
  j["continuity_relations"] = a.continuity_relations;
  j["chain_consistent"] = a.chain_consistent;
  if (a.verdict == FamilyVerdict::Unique) {
    j["incoming_hi"] = a.incoming_hi;
    j["outgoing_hi"] = a.outgoing_hi;
  }
  return j;
}

Json intervals_json(const IntervalTables& t) {
  Json j;
  Json stationary = Json::array();
  for (const Interval& iv : t.stationary) stationary.push_back({iv.lo, iv.hi});
  Json moving = Json::array();
  for (const auto& pieces : t.nonstationary) {
    Json list = Json::array();
    for (const Interval& iv : pieces) list.push_back({iv.lo, iv.hi});
    moving.push_back(list);
  }
  j["stationary_lower_states"] = stationary;
  j["nonstationary_states"] = moving;
  j["thresholds"] = t.thresholds;
  return j;
}

/// Reason attached to a negative verdict by the closed-form analysis, if any.
std::optional<std::string> special_case_reason(const StarNetwork& net) {
  const auto params = family_params(net);
  if (!params) return std::nullopt;
  if (params->flux == FluxKind::Quadratic && params->diffusivity == DiffusivityKind::Constant) {
    if (!quad_const_D_criterion(*params).exists) return "criterion αδ=v fails";
    return std::nullopt;
  }
  if (params->flux == FluxKind::Quadratic && params->diffusivity == DiffusivityKind::Linear) {
    const auto a = quad_linear_D_analyze(*params);
    if (a.verdict == FamilyVerdict::None) return a.reason;
    return std::nullopt;
  }
  if (params->flux == FluxKind::Logarithmic && params->diffusivity == DiffusivityKind::Constant) {
    const auto a = log_analyze(*params);
    if (a.verdict == FamilyVerdict::None) return a.reason;
  }
  return std::nullopt;
}

}  // namespace

Json ends_json(const EndStates& e) {
  Json j;
  j["lo"] = e.lo;
  j["hi"] = e.hi;
  j["speed"] = e.stationary() ? 0.0 : e.speed;
  return j;
}

Json wave_json(const StarNetwork& net, const NetworkWave& wave, const ContinuityOptions& continuity) {
  Json j;
  j["stationarity"] = to_string(wave.stationarity);
  j["degeneracy"] = to_string(wave.degeneracy);
  const ContinuityResult cont = check_continuity(net, wave, continuity);
  j["continuity"] = cont.continuous;
  j["continuity_residual"] = cont.residual;
  Json in = Json::array();
  for (const Profile& p : wave.incoming) in.push_back(profile_json(p));
  Json out = Json::array();
  for (const Profile& p : wave.outgoing) out.push_back(profile_json(p));
  j["incoming"] = in;
  j["outgoing"] = out;
  const NodeFluxReport flux = node_flux_residuals(net, wave);
  j["node_flux"] = {{"coupling_residual", flux.coupling_residual},
                    {"conservation_residual", flux.conservation_residual},
                    {"limit_residual", flux.limit_residual}};
  if (wave.stationarity != Stationarity::Stationary) {
    j["outgoing_formula_residual"] = outgoing_formula_residual(net, wave);
    j["omega_spread"] = finite_or_null(omega_spread(wave));
    if (net.m() == 1) j["shift_constraints"] = shift_constraints(wave);
  }
  return j;
}

Json special_case_json(const StarNetwork& net) {
  const auto params = family_params(net);
  if (!params) return Json(nullptr);
  Json j;
  j["flux"] = std::string(to_string(params->flux));
  j["diffusivity"] = std::string(to_string(params->diffusivity));
  j["v_ratio"] = Json::array();
  j["delta_ratio"] = Json::array();
  for (std::size_t k = 0; k < params->n(); ++k) {
    j["v_ratio"].push_back(params->v_ratio(k));
    j["delta_ratio"].push_back(params->delta_ratio(k));
  }
  const bool quadratic = params->flux == FluxKind::Quadratic;
  const bool constant = params->diffusivity == DiffusivityKind::Constant;
  if (quadratic || constant) j["intervals"] = intervals_json(interval_tables(*params));
  if (quadratic && constant) {
    const QuadConstCriterion c = quad_const_D_criterion(*params);
    j["criterion"] = c.exists ? "αδ=v holds" : "αδ=v fails";
    j["exists_per_road"] = c.exists_per_j;
    j["exists"] = c.exists;
    j["continuity_exists"] = c.continuity_exists;
  } else if (quadratic) {
    j["degenerate_analysis"] = analysis_json(quad_linear_D_analyze(*params));
  } else if (constant) {
    j["degenerate_analysis"] = analysis_json(log_analyze(*params));
  } else {
    j["note"] = "no closed-form analysis for this pair";
  }
  return j;
}

std::optional<std::vector<EndStates>> resolve_incoming_ends(const RunConfig& config) {
  if (!config.incoming_ends.empty()) return config.incoming_ends;
  const auto params = family_params(config.network);
  if (!params) return std::nullopt;
  std::optional<DegenerateAnalysis> a;
  if (params->flux == FluxKind::Quadratic && params->diffusivity == DiffusivityKind::Linear) {
    a = quad_linear_D_analyze(*params);
  } else if (params->flux == FluxKind::Logarithmic && params->diffusivity == DiffusivityKind::Constant) {
    a = log_analyze(*params);
  }
  if (!a || a->verdict != FamilyVerdict::Unique) return std::nullopt;
  return std::vector<EndStates>{make_end_states(config.network.incoming.front(), 0.0, a->incoming_hi)};
}

CheckOutcome analyze_network(const RunConfig& config) {
  const StarNetwork& net = config.network;
  CheckOutcome out;
  Json& r = out.report;
  Json roads = Json::array();
  for (const Road& road : net.incoming) roads.push_back(road_json(road));
  for (const Road& road : net.outgoing) roads.push_back(road_json(road));
  r["network"] = {{"incoming", net.m()}, {"outgoing", net.n()}, {"roads", roads}, {"alpha", net.alpha}};
  r["special_cases"] = special_case_json(net);

  const auto ends = resolve_incoming_ends(config);
  if (!ends) {
    r["verdict"] = "EXISTS: no (incoming end states required)";
    r["exists"] = false;
    return out;
  }
  Json in = Json::array();
  for (const EndStates& e : *ends) in.push_back(ends_json(e));
  r["incoming_ends"] = in;

  const bool stationary =
      std::all_of(ends->begin(), ends->end(), [](const EndStates& e) { return e.stationary(); });
  if (stationary) {
    Json s;
    try {
      NetworkWave wave = assemble_stationary(net, *ends);
      s["solvable"] = true;
      out.exists = true;
      out.wave = std::move(wave);
      r["verdict"] = "stationary wave: EXISTS";
    } catch (const std::domain_error& e) {
      s["solvable"] = false;
      s["reason"] = e.what();
      r["verdict"] = std::string("stationary wave: EXISTS: no (") + e.what() + ")";
    }
    r["stationary"] = s;
  } else {
    const ConditionResult cond = check_traveling_condition(net, *ends, config.condition);
    Json c;
    c["exists"] = cond.exists;
    c["residual"] = finite_or_null(cond.residual);
    if (!cond.exists) c["reason"] = cond.reason;
    Json cands = Json::array();
    for (const auto& list : cond.candidates) {
      Json road = Json::array();
      for (const CandidateVerdict& v : list) {
        Json e = ends_json(v.ends);
        e["residual"] = finite_or_null(v.residual);
        e["accepted"] = v.accepted;
        road.push_back(e);
      }
      cands.push_back(road);
    }
    c["candidates"] = cands;
    c["witnesses"] = cond.witnesses.size();
    r["nonstationary"] = c;
    if (cond.exists) {
      out.exists = true;
      out.wave = assemble_wave(net, cond.witnesses.front());
      r["verdict"] = "non-stationary wave: EXISTS";
    } else {
      const auto reason = special_case_reason(net);
      r["verdict"] = "non-stationary wave: EXISTS: no (" + reason.value_or(cond.reason) + ")";
    }
  }
  if (out.wave) {
    out.wave->continuity = check_continuity(net, *out.wave, config.continuity).continuous;
    r["wave"] = wave_json(net, *out.wave, config.continuity);
  }
  r["exists"] = out.exists;
  return out;
}

ProfileSamples sample_profile(const Profile& profile, std::size_t points, double span) {
  ProfileSamples s;
  for (std::size_t k = 0; k < points; ++k) {
    const double xi =
        points == 1 ? 0.0 : -span + 2.0 * span * static_cast<double>(k) / static_cast<double>(points - 1);
    s.xi.push_back(xi);
    s.phi.push_back(profile(xi));
    s.dphi.push_back(profile.slope(xi));
  }
  return s;
}

}  // namespace twnet
