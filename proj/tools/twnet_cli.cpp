// Command-line front end: check | profile | verify | sweep.
// Exit codes: 0 exists/pass, 1 not-exists/fail, 2 error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "twnet/config.hpp"
#include "twnet/pde_verify.hpp"
#include "twnet/sweep.hpp"
#include "twnet/wave_report.hpp"

namespace fs = std::filesystem;
using namespace twnet;

namespace {

constexpr int kExists = 0;
constexpr int kMissing = 1;
constexpr int kError = 2;

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

Json null_if_infinite(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

int cmd_check(const std::string& config_path, const std::string& out) {
  const RunConfig cfg = load_config(config_path);
  const CheckOutcome outcome = analyze_network(cfg);
  emit(outcome.report, out);
  std::cerr << outcome.report["verdict"].get<std::string>() << '\n';
  return outcome.exists ? kExists : kMissing;
}

void write_csv(const fs::path& path, const ProfileSamples& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "xi,phi,dphi\n";
  for (std::size_t k = 0; k < s.xi.size(); ++k) out << s.xi[k] << ',' << s.phi[k] << ',' << s.dphi[k] << '\n';
}

int cmd_profile(const std::string& config_path, const std::string& dir) {
  const RunConfig cfg = load_config(config_path);
  const CheckOutcome outcome = analyze_network(cfg);
  if (!outcome.wave) {
    std::cerr << outcome.report["verdict"].get<std::string>() << '\n';
    return kMissing;
  }
  fs::create_directories(dir);
  Json meta;
  meta["verdict"] = outcome.report["verdict"];
  meta["stationarity"] = to_string(outcome.wave->stationarity);
  meta["degeneracy"] = to_string(outcome.wave->degeneracy);
  meta["samples"] = cfg.sampling.points;
  meta["span"] = cfg.sampling.span;
  Json files = Json::array();
  auto dump = [&](const Profile& p, const Road& road, const std::string& name) {
    const fs::path file = fs::path(dir) / (name + ".csv");
    write_csv(file, sample_profile(p, cfg.sampling.points, cfg.sampling.span));
    Json entry = ends_json(p.ends());
    entry["road"] = road.id;
    entry["file"] = file.filename().string();
    entry["shift"] = p.shift();
    entry["nu_minus"] = null_if_infinite(p.nu_minus());
    entry["nu_plus"] = null_if_infinite(p.nu_plus());
    if (std::isfinite(p.nu_minus()) || std::isfinite(p.nu_plus())) {
      const BoundarySlopes b = boundary_slopes(road, p.ends());
      entry["slope_at_nu_minus"] = b.left ? null_if_infinite(*b.left) : Json(nullptr);
      entry["slope_at_nu_plus"] = b.right ? null_if_infinite(*b.right) : Json(nullptr);
    }
    files.push_back(entry);
  };
  for (std::size_t i = 0; i < outcome.wave->incoming.size(); ++i) {
    dump(outcome.wave->incoming[i], cfg.network.incoming[i], "incoming_" + std::to_string(i + 1));
  }
  for (std::size_t j = 0; j < outcome.wave->outgoing.size(); ++j) {
    dump(outcome.wave->outgoing[j], cfg.network.outgoing[j], "outgoing_" + std::to_string(j + 1));
  }
  meta["roads"] = files;
  emit(meta, (fs::path(dir) / "profile_meta.json").string());
  return kExists;
}

Json simulation_json(const SimulationReport& r) {
  return Json{{"dt", r.dt},
              {"steps", r.steps},
              {"drift_linf", r.drift.linf},
              {"drift_l2", r.drift.l2},
              {"best_time_offset", r.drift.best_shift},
              {"node_conservation", r.max_node_conservation},
              {"mass_balance", r.max_mass_balance},
              {"clipped", r.max_clipped}};
}

int cmd_verify(const std::string& config_path, const std::string& out, bool refine) {
  const RunConfig cfg = load_config(config_path);
  const CheckOutcome outcome = analyze_network(cfg);
  if (!outcome.wave) {
    std::cerr << outcome.report["verdict"].get<std::string>() << '\n';
    return kMissing;
  }
  Json report;
  report["verdict"] = outcome.report["verdict"];
  report["node_closure"] = "outgoing face flux = alpha-weighted incoming face fluxes; incoming face flux = c_i * trace + g_i(lo_i)";
  report["length"] = cfg.simulation.length;
  report["dx"] = cfg.simulation.dx;
  report["final_time"] = cfg.simulation.final_time;
  try {
    bool pass = true;
    if (refine) {
      const RefinementReport r = refinement_study(cfg.network, *outcome.wave, cfg.simulation);
      report["coarse"] = simulation_json(r.coarse);
      report["fine"] = simulation_json(r.fine);
      report["refinement_ratio"] = r.ratio;
      pass = r.fine.max_node_conservation <= 1e-12 && r.fine.max_mass_balance <= 1e-10;
    } else {
      const SimulationReport r = simulate(cfg.network, *outcome.wave, cfg.simulation);
      report["run"] = simulation_json(r);
      pass = r.max_node_conservation <= 1e-12 && r.max_mass_balance <= 1e-10;
    }
    report["pass"] = pass;
    emit(report, out);
    return pass ? kExists : kMissing;
  } catch (const StabilityError& e) {
    std::cerr << "error: " << e.what() << "; suggested dt " << e.suggested_dt() << '\n';
    return kError;
  }
}

int cmd_sweep(std::size_t draws, std::uint64_t seed, const std::string& family, const std::string& out) {
  SweepOptions options{draws, seed};
  Json report = Json::array();
  bool pass = true;
  for (SweepFamily f : {SweepFamily::QuadraticConstant, SweepFamily::QuadraticLinear, SweepFamily::Logarithmic,
                        SweepFamily::Continuity}) {
    if (family != "all" && family != to_string(f)) continue;
    const SweepResult r = run_sweep(f, options);
    const bool ok = f == SweepFamily::Continuity ? r.disagreements == 0 : r.disagreement_rate <= 0.01;
    pass = pass && ok;
    report.push_back(Json{{"family", to_string(f)},
                          {"draws", r.draws},
                          {"probes", r.probes},
                          {"positives", r.positives},
                          {"disagreements", r.disagreements},
                          {"boundary_disagreements", r.boundary_disagreements},
                          {"failures", r.failures},
                          {"disagreement_rate", r.disagreement_rate},
                          {"pass", ok},
                          {"examples", r.examples}});
  }
  if (report.empty()) throw std::invalid_argument("unknown sweep family '" + family + "'");
  emit(report, out);
  return pass ? kExists : kMissing;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling waves of degenerate advection-diffusion equations on a star network"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string dir = "profiles";
  bool refine = false;
  std::size_t draws = 1000;
  std::uint64_t seed = 20240917;
  std::string family = "all";

  auto* check = app.add_subcommand("check", "existence verdicts and wave report");
  check->add_option("config", config, "network config (JSON)")->required()->check(CLI::ExistingFile);
  check->add_option("-o,--out", out, "report path (default stdout)");

  auto* profile = app.add_subcommand("profile", "write profile samples per road");
  profile->add_option("config", config, "network config (JSON)")->required()->check(CLI::ExistingFile);
  profile->add_option("-d,--dir", dir, "output directory");

  auto* verify = app.add_subcommand("verify", "time-step the network from the wave and measure drift");
  verify->add_option("config", config, "network config (JSON)")->required()->check(CLI::ExistingFile);
  verify->add_option("-o,--out", out, "report path (default stdout)");
  verify->add_flag("--refine", refine, "also run at twice the cell width and report the drift ratio");

  auto* sweep = app.add_subcommand("sweep", "randomized agreement sweeps");
  sweep->add_option("-n,--draws", draws, "draws per family");
  sweep->add_option("-s,--seed", seed, "random seed");
  sweep->add_option("-f,--family", family, "all | quadratic-constant | quadratic-linear | logarithmic-constant | continuity");
  sweep->add_option("-o,--out", out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*check) return cmd_check(config, out);
    if (*profile) return cmd_profile(config, dir);
    if (*verify) return cmd_verify(config, out, refine);
    if (*sweep) return cmd_sweep(draws, seed, family, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
