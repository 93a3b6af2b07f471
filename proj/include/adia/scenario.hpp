#pragma once
// Declarative scenario runner: JSON config -> model -> eigencurves -> frame ->
// criteria -> bounds -> propagation, with CSV series and a machine-readable
// summary per run.

#include "adia/bounds.hpp"
#include "adia/propagator.hpp"

#include "json.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace adia {

using Json = nlohmann::ordered_json;

struct GridSpec {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t samples = 0;
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  Json model;  // family tag + parameters, kept declarative until build
  Eigen::Index tracked_level = 0;
  GaugeChoice gauge;
  GridSpec grid;
  std::set<std::string> analyses;  // criteria, bounds, bw, propagate, oracles
  double criteria_threshold = Defaults::criteria_threshold;
  double infidelity_threshold = Defaults::infidelity_threshold;
  double integrator_tol = Defaults::default_integrator_tol;
  double epsilon = 1.0;  // evolution runs on H(eps t) over the stretched window
  int passages = 0;      // cycling_lz only: horizon = passages * pi / varpi
  std::optional<std::uint64_t> seed_override;
  std::string base_dir;    // directory of the config file (for relative paths)
  std::string output_dir;  // resolved output directory
};

Scenario parse_scenario(const Json& config);
Scenario load_scenario(const std::string& path);

// instantiate the declared family (seed override and epsilon rescale applied)
HamiltonianModel build_model(const Scenario& s);

// horizon actually analyzed: config window divided by epsilon
std::pair<double, double> effective_window(const Scenario& s);

struct DiagnosticReport {
  std::string name;
  std::string output_dir;
  Json summary;      // what summary.json holds
  std::string text;  // human-readable rendering
};

DiagnosticReport run(const Scenario& s);

std::vector<DiagnosticReport> sweep(const Scenario& s, const std::string& param,
                                    const std::vector<double>& values,
                                    int threads = 1);

std::string list_families();

// 17 significant digits, shared by every writer
std::string format_double(double v);

}  // namespace adia
