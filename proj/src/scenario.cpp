#include "adia/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "adia/errors.hpp"
#include "adia/frame.hpp"

namespace adia {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::string short_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// ---- config access ------------------------------------------------------------

const Json& field(const Json& j, const char* key, const char* ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(std::string("missing field '") + key + "' in " + ctx);
  return *it;
}

double num(const Json& j, const char* key, const char* ctx) {
  const Json& v = field(j, key, ctx);
  if (!v.is_number())
    throw ConfigError(std::string("field '") + key + "' in " + ctx + " must be a number");
  return v.get<double>();
}

double num_or(const Json& j, const char* key, double dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number())
    throw ConfigError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

long long integer(const Json& j, const char* key, const char* ctx) {
  const Json& v = field(j, key, ctx);
  if (!v.is_number_integer())
    throw ConfigError(std::string("field '") + key + "' in " + ctx + " must be an integer");
  return v.get<long long>();
}

std::string str(const Json& j, const char* key, const char* ctx) {
  const Json& v = field(j, key, ctx);
  if (!v.is_string())
    throw ConfigError(std::string("field '") + key + "' in " + ctx + " must be a string");
  return v.get<std::string>();
}

Mat matrix_from_json(const Json& rows, const char* ctx) {
  if (!rows.is_array() || rows.empty())
    throw ConfigError(std::string("matrix '") + ctx + "' must be a non-empty array of rows");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Mat h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ConfigError(std::string("matrix '") + ctx + "' must be square");
    for (Eigen::Index jx = 0; jx < n; ++jx) {
      const Json& e = row[static_cast<std::size_t>(jx)];
      if (e.is_number()) {
        h(i, jx) = cxd(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        h(i, jx) = cxd(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(std::string("matrix '") + ctx +
                          "' entries must be numbers or [re, im] pairs");
      }
    }
  }
  return h;
}

double summary_num(const Json& s, std::initializer_list<const char*> path) {
  const Json* cur = &s;
  for (const char* k : path) {
    auto it = cur->find(k);
    if (it == cur->end() || it->is_null()) return nan_v;
    cur = &*it;
  }
  return cur->is_number() ? cur->get<double>() : nan_v;
}

const std::set<std::string>& known_analyses() {
  static const std::set<std::string> k{"criteria", "bounds", "bw", "propagate", "oracles"};
  return k;
}

}  // namespace

Scenario parse_scenario(const Json& config) {
  if (!config.is_object()) throw ConfigError("scenario config must be a JSON object");
  Scenario s;

  const Json& sv = field(config, "schema_version", "scenario");
  if (!sv.is_number_integer() || sv.get<int>() != 1)
    throw ConfigError("unsupported schema_version (expected 1)");

  s.name = str(config, "name", "scenario");
  if (s.name.empty() ||
      s.name.find_first_not_of(
          "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-") !=
          std::string::npos)
    throw ConfigError("scenario name must be non-empty and filesystem-safe");

  s.model = field(config, "model", "scenario");
  if (!s.model.is_object()) throw ConfigError("'model' must be an object");
  const std::string fam = str(s.model, "family", "model");

  const long long lvl = integer(config, "tracked_level", "scenario");
  if (lvl < 0) throw ConfigError("tracked_level must be nonnegative");
  s.tracked_level = static_cast<Eigen::Index>(lvl);

  if (auto it = config.find("passages"); it != config.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1)
      throw ConfigError("passages must be a positive integer");
    if (fam != "cycling_lz")
      throw ConfigError("passages is only meaningful for the cycling_lz family");
    s.passages = static_cast<int>(it->get<long long>());
  }

  if (auto it = config.find("gauge"); it != config.end()) {
    if (!it->is_object()) throw ConfigError("'gauge' must be an object");
    const std::string tag = str(*it, "tag", "gauge");
    if (tag == "parallel_transport") {
      s.gauge.tag = GaugeTag::parallel_transport;
    } else if (tag == "berry_dynamical") {
      s.gauge.tag = GaugeTag::berry_dynamical;
    } else if (tag == "pancharatnam_aligned") {
      s.gauge.tag = GaugeTag::pancharatnam_aligned;
    } else {
      throw ConfigError("unknown gauge tag '" + tag + "'");
    }
    s.gauge.aligned_level = static_cast<Eigen::Index>(
        it->contains("aligned_level") ? integer(*it, "aligned_level", "gauge") : lvl);
  } else {
    s.gauge.tag = GaugeTag::parallel_transport;
    s.gauge.aligned_level = s.tracked_level;
  }

  const Json& grid = field(config, "grid", "scenario");
  if (!grid.is_object()) throw ConfigError("'grid' must be an object");
  const long long samples = integer(grid, "samples", "grid");
  if (samples < static_cast<long long>(Defaults::min_samples))
    throw ConfigError("grid: samples must be at least " +
                      std::to_string(Defaults::min_samples));
  s.grid.samples = static_cast<std::size_t>(samples);
  if (s.passages > 0) {
    const double varpi = num(s.model, "varpi", "model");
    if (!(varpi > 0.0)) throw ConfigError("varpi must be positive");
    s.grid.t_start = 0.0;
    s.grid.t_end = s.passages * pi / varpi;
  } else {
    s.grid.t_start = num(grid, "t_start", "grid");
    s.grid.t_end = num(grid, "t_end", "grid");
  }
  if (!(s.grid.t_end > s.grid.t_start))
    throw ConfigError("grid: t_end must exceed t_start");

  if (auto it = config.find("analyses"); it != config.end()) {
    if (!it->is_array()) throw ConfigError("'analyses' must be an array of strings");
    for (const Json& a : *it) {
      if (!a.is_string() || !known_analyses().count(a.get<std::string>()))
        throw ConfigError("unknown analysis '" + a.dump() + "'");
      s.analyses.insert(a.get<std::string>());
    }
    if (s.analyses.empty()) throw ConfigError("'analyses' must not be empty");
  } else {
    s.analyses = known_analyses();
  }

  if (auto it = config.find("thresholds"); it != config.end()) {
    if (!it->is_object()) throw ConfigError("'thresholds' must be an object");
    s.criteria_threshold = num_or(*it, "criteria", Defaults::criteria_threshold);
    s.infidelity_threshold = num_or(*it, "infidelity", Defaults::infidelity_threshold);
    if (!(s.criteria_threshold > 0.0) || !(s.infidelity_threshold > 0.0))
      throw ConfigError("thresholds must be positive");
  }

  s.integrator_tol = num_or(config, "integrator_tol", Defaults::default_integrator_tol);
  if (!(s.integrator_tol > 0.0)) throw ConfigError("integrator_tol must be positive");
  s.epsilon = num_or(config, "epsilon", 1.0);
  if (!(s.epsilon > 0.0)) throw ConfigError("epsilon must be positive");

  if (auto it = config.find("output"); it != config.end()) {
    if (!it->is_string()) throw ConfigError("'output' must be a string");
    s.output_dir = it->get<std::string>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  Scenario s = parse_scenario(j);
  s.base_dir = fs::path(path).parent_path().string();
  return s;
}

HamiltonianModel build_model(const Scenario& s) {
  Json m = s.model;
  const std::string fam = str(m, "family", "model");
  if (s.seed_override && fam == "random_smooth")
    m["seed"] = *s.seed_override;

  auto base = [&]() -> HamiltonianModel {
    if (fam == "schwinger")
      return make_schwinger(num(m, "omega0", "model"), num(m, "theta", "model"),
                            num(m, "omega", "model"));
    if (fam == "cycling_lz")
      return make_cycling_lz(num(m, "alpha", "model"), num(m, "varpi", "model"),
                             num(m, "Omega", "model"));
    if (fam == "interpolating")
      return make_interpolating(matrix_from_json(field(m, "h_in", "model"), "h_in"),
                                matrix_from_json(field(m, "h_fin", "model"), "h_fin"),
                                num(m, "T", "model"));
    if (fam == "constant")
      return make_constant(matrix_from_json(field(m, "h", "model"), "h"));
    if (fam == "tabulated") {
      fs::path p = str(m, "path", "model");
      if (p.is_relative() && !s.base_dir.empty()) p = fs::path(s.base_dir) / p;
      return load_tabulated_csv(p.string());
    }
    if (fam == "random_smooth") {
      const long long dim = integer(m, "dim", "model");
      if (dim < 2) throw ConfigError("random_smooth: dim must be at least 2");
      const long long seed = integer(m, "seed", "model");
      if (seed < 0) throw ConfigError("random_smooth: seed must be nonnegative");
      const double gap = num_or(m, "gap", 1.0);
      const double strength = num_or(m, "strength", 0.05);
      const long long harm = m.contains("harmonics") ? integer(m, "harmonics", "model") : 3;
      if (harm < 1) throw ConfigError("random_smooth: harmonics must be positive");
      return make_random_smooth(static_cast<Eigen::Index>(dim),
                                static_cast<std::uint64_t>(seed), s.grid.t_end, gap,
                                strength, static_cast<int>(harm));
    }
    throw ConfigError("unknown model family '" + fam + "'");
  }();
  if (s.epsilon != 1.0) return rescale_time(base, s.epsilon);
  return base;
}

std::pair<double, double> effective_window(const Scenario& s) {
  return {s.grid.t_start / s.epsilon, s.grid.t_end / s.epsilon};
}

namespace {

std::string verdict_word(bool adiabatic) {
  return adiabatic ? "adiabatic" : "non-adiabatic";
}

}  // namespace

DiagnosticReport run(const Scenario& s) {
  const HamiltonianModel model = build_model(s);
  if (s.tracked_level >= model.dim())
    throw ConfigError("tracked_level " + std::to_string(s.tracked_level) +
                      " out of range for dimension " + std::to_string(model.dim()));
  GaugeChoice g = s.gauge;
  const auto [t0, t1] = effective_window(s);
  const Eigen::Index n = s.tracked_level;

  const EigenCurve curve = eigencurves(model, t0, t1, s.grid.samples, g);
  const AdiabaticFrame frame = build_frame(curve, n);
  const std::size_t ns = curve.samples();

  const fs::path outdir =
      s.output_dir.empty() ? fs::path("results") / s.name : fs::path(s.output_dir);
  fs::create_directories(outdir);

  Json sum;
  sum["schema_version"] = 1;
  sum["name"] = s.name;
  sum["dim"] = static_cast<int>(model.dim());
  sum["tracked_level"] = static_cast<int>(n);
  sum["gauge"] = gauge_name(g);
  sum["epsilon"] = s.epsilon;
  sum["grid"] = Json{{"t_start", t0},
                     {"t_end", t1},
                     {"samples", static_cast<long long>(ns)},
                     {"refinements", curve.refinements},
                     {"level_order_stable", curve.level_order_stable},
                     {"analytic_path", curve.analytic}};
  sum["thresholds"] =
      Json{{"criteria", s.criteria_threshold}, {"infidelity", s.infidelity_threshold}};
  Json series = Json::object();

  {
    const GapSeries gs = gaps(curve, n);
    std::ofstream f(outdir / "spectrum.csv");
    f << "t";
    for (Eigen::Index m = 0; m < curve.dim; ++m) f << ",e" << m;
    f << ",local_gap,global_gap\n";
    for (std::size_t k = 0; k < ns; ++k) {
      f << format_double(curve.grid[k]);
      for (Eigen::Index m = 0; m < curve.dim; ++m)
        f << ',' << format_double(curve.energies[k](m));
      f << ',' << format_double(gs.local_gap[k]) << ',' << format_double(gs.global_gap[k])
        << '\n';
    }
    series["spectrum"] = "spectrum.csv";
  }

  std::optional<CriteriaSeries> cs;
  double max_standard = nan_v, max_generalized = nan_v;
  if (s.analyses.count("criteria")) {
    cs = criteria_series(curve, frame);
    std::optional<TwoLevelConditionSeries> tl;
    if (model.dim() == 2 && model.angles()) tl = two_level_conditions(model, curve.grid);

    std::ofstream f(outdir / "criteria.csv");
    f << "t,standard,generalized,cond13,cond14_integral,ratio15\n";
    for (std::size_t k = 0; k < ns; ++k) {
      f << format_double(curve.grid[k]) << ',' << format_double(cs->standard[k]) << ','
        << cell(cs->generalized[k]) << ',' << format_double(cs->cond13[k]) << ','
        << format_double(cs->cond14_integral[k]) << ','
        << (tl ? cell(tl->ratio15[k]) : std::string()) << '\n';
    }
    series["criteria"] = "criteria.csv";

    max_standard = *std::max_element(cs->standard.begin(), cs->standard.end());
    for (double v : cs->generalized)
      if (!std::isnan(v) && !(v <= max_generalized)) max_generalized = v;
    const double max_cond13 = *std::max_element(cs->cond13.begin(), cs->cond13.end());

    int mono = 0;
    for (Eigen::Index a = 0; a < frame.dim; ++a)
      for (Eigen::Index b = a + 1; b < frame.dim; ++b) {
        std::vector<double> ser(ns);
        for (std::size_t k = 0; k < ns; ++k) ser[k] = std::abs(frame.hprime[k](a, b));
        mono = std::max(mono, count_monotonicity_changes(ser));
      }

    sum["criteria"] = Json{{"max_standard", max_standard},
                           {"max_generalized", max_generalized},
                           {"max_cond13", max_cond13},
                           {"cond14_total", cs->cond14_integral.back()},
                           {"masked_generalized_samples", cs->missing},
                           {"monotonicity_changes", mono},
                           {"oscillating", mono > Defaults::mono_flag_limit}};
  }

  std::optional<std::vector<BWResult>> bw;
  std::optional<NPrimeSeries> np;
  std::vector<double> key;
  std::vector<ZenoBound> zs;
  std::vector<double> jrs;
  bool bounds_ran = false;
  if (s.analyses.count("bounds") || s.analyses.count("bw")) {
    bw = bw_series(frame);
    np = nprime_series(frame);
    int unconv = 0, max_it = 0;
    for (const BWResult& r : *bw) {
      if (!r.converged) ++unconv;
      max_it = std::max(max_it, r.iterations);
    }
    if (s.analyses.count("bw"))
      sum["bw"] = Json{{"unconverged_samples", unconv}, {"max_iterations", max_it}};

    if (s.analyses.count("bounds")) {
      bounds_ran = true;
      const std::string backend = unconv == 0 ? "fixed_point" : "eigensolve";
      std::vector<Vec> vecs(ns);
      for (std::size_t k = 0; k < ns; ++k)
        vecs[k] = unconv == 0 ? (*bw)[k].n_prime : np->vectors[k];
      key = key_bound_series(frame, vecs);
      zs = zeno_series(frame);
      jrs = jrs_series(model, curve, n);

      double bf_viol = -std::numeric_limits<double>::infinity();
      std::ofstream f(outdir / "bounds.csv");
      f << "t,jrs_bound,key_bound,zeno_bound,bauer_fike_lhs,bauer_fike_rhs,bw_converged\n";
      for (std::size_t k = 0; k < ns; ++k) {
        const auto [lhs, rhs] = bauer_fike(frame, np->e_prime[k], curve.grid[k]);
        bf_viol = std::max(bf_viol, lhs - rhs);
        f << format_double(curve.grid[k]) << ',' << format_double(jrs[k]) << ','
          << format_double(key[k]) << ',' << format_double(zs[k].value()) << ','
          << format_double(lhs) << ',' << format_double(rhs) << ','
          << ((*bw)[k].converged ? 1 : 0) << '\n';
      }
      series["bounds"] = "bounds.csv";

      const JrsBound jb = jrs_bound(model, curve, n, t1);
      sum["bounds"] = Json{{"jrs_total", jb.total()},
                           {"jrs_integral", jb.integral},
                           {"jrs_grid_total", jrs.back()},
                           {"key_final", key.back()},
                           {"key_backend", backend},
                           {"bw_unconverged", unconv},
                           {"zeno_final", zs.back().value()},
                           {"zeno_phase_final", zs.back().phase},
                           {"bauer_fike_max_violation", bf_viol}};
    }
  }

  std::optional<EvolutionResult> ev;
  if (s.analyses.count("propagate")) {
    ev = propagate(model, curve, n, t1, s.integrator_tol);
    std::ofstream f(outdir / "evolution.csv");
    f << "t,fidelity,phase_mismatch,projector_distance\n";
    for (std::size_t k = 0; k < ns; ++k) {
      f << format_double(ev->grid[k]) << ',' << format_double(ev->fidelity[k]) << ','
        << format_double(ev->phase_mismatch[k]) << ','
        << format_double(ev->projector_distance[k]) << '\n';
    }
    series["evolution"] = "evolution.csv";

    const double leak = std::max(0.0, 1.0 - ev->final_fidelity * ev->final_fidelity);
    sum["evolution"] = Json{{"min_fidelity", ev->min_fidelity},
                            {"final_fidelity", ev->final_fidelity},
                            {"final_leak", leak},
                            {"max_phase_mismatch", ev->max_phase_mismatch},
                            {"steps_accepted", ev->steps_accepted},
                            {"steps_rejected", ev->steps_rejected}};
    if (bounds_ran) {
      double key_margin = std::numeric_limits<double>::infinity();
      double zeno_margin = std::numeric_limits<double>::infinity();
      double fid_phase_margin = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < ns; ++k) {
        key_margin = std::min(key_margin, key[k] - ev->phase_mismatch[k]);
        zeno_margin = std::min(zeno_margin, zs[k].value() - (1.0 - ev->fidelity[k]));
        fid_phase_margin =
            std::min(fid_phase_margin, ev->phase_mismatch[k] * ev->phase_mismatch[k] -
                                           2.0 * (1.0 - ev->fidelity[k]));
      }
      sum["margins"] = Json{{"key_minus_mismatch_min", key_margin},
                            {"zeno_minus_leak_min", zeno_margin},
                            {"mismatch_sq_minus_infidelity_min", fid_phase_margin}};
    }
  }

  if (s.analyses.count("oracles")) {
    Json orc = Json::object();
    const std::string fam = s.model.value("family", std::string());
    if (fam == "schwinger") {
      const double w0 = num(s.model, "omega0", "model");
      const double th = num(s.model, "theta", "model");
      const double w = num(s.model, "omega", "model") * s.epsilon;
      const double std_exact = std::abs(w * std::sin(th)) / w0;
      const double gen_exact =
          std::abs(w * std::sin(th)) / std::abs(w0 - w * std::cos(th));
      orc["standard_closed_form"] = std_exact;
      orc["generalized_closed_form"] = gen_exact;
      if (cs) {
        double ds = 0.0, dg = 0.0;
        for (std::size_t k = 0; k < ns; ++k) {
          ds = std::max(ds, std::abs(cs->standard[k] - std_exact));
          if (!std::isnan(cs->generalized[k]))
            dg = std::max(dg, std::abs(cs->generalized[k] - gen_exact));
        }
        orc["max_standard_dev"] = ds;
        orc["max_generalized_dev"] = dg;
      }
      if (ev) {
        double du = 0.0;
        const Mat u0 = schwinger_analytic(w0, th, w, t0);
        for (std::size_t k = 0; k < ns; ++k) {
          const Mat ue = schwinger_analytic(w0, th, w, curve.grid[k]) * u0.adjoint();
          du = std::max(du, (ev->unitaries[k] - ue).norm());
        }
        orc["max_unitary_error"] = du;
      }
    } else if (fam == "cycling_lz") {
      const double alpha = num(s.model, "alpha", "model");
      const double varpi = num(s.model, "varpi", "model") * s.epsilon;
      const double Omega = num(s.model, "Omega", "model");
      const double p1 = std::exp(-pi * Omega * Omega / (2.0 * alpha * varpi));
      orc["p1_predicted"] = p1;
      if (ev) {
        const double tp = pi / varpi;
        const auto k1 = static_cast<std::size_t>(std::llround((tp - t0) / curve.dt));
        if (k1 < ns && std::abs(curve.grid[k1] - t0 - tp) <= 0.5 * curve.dt) {
          const double fid = ev->fidelity[k1];
          const double meas = std::max(0.0, 1.0 - fid * fid);
          orc["p1_measured"] = meas;
          orc["p1_ratio"] = meas / p1;
        }
      }
    }
    sum["oracles"] = orc;
  }

  Json verd = Json::object();
  std::optional<bool> std_ad, gen_ad, meas_ad;
  if (cs) {
    std_ad = max_standard <= s.criteria_threshold;
    gen_ad = !std::isnan(max_generalized) && max_generalized <= s.criteria_threshold;
    verd["standard_adiabatic"] = *std_ad;
    verd["generalized_adiabatic"] = *gen_ad;
  }
  if (ev) {
    meas_ad = (1.0 - ev->min_fidelity) <= s.infidelity_threshold;
    verd["measured_adiabatic"] = *meas_ad;
  }
  if (std_ad && meas_ad) {
    verd["standard_matches_measured"] = (*std_ad == *meas_ad);
    verd["generalized_matches_measured"] = (*gen_ad == *meas_ad);
    verd["discrepancy_standard_vs_measured"] = (*std_ad != *meas_ad);
  }
  sum["verdicts"] = verd;
  sum["series"] = series;

  {
    std::ofstream f(outdir / "summary.json");
    f << sum.dump(2) << '\n';
  }

  DiagnosticReport rep;
  rep.name = s.name;
  rep.output_dir = outdir.string();
  rep.summary = std::move(sum);

  std::ostringstream txt;
  txt << std::setprecision(6);
  txt << "scenario '" << s.name << "': dim " << model.dim() << ", tracked level " << n
      << ", gauge " << gauge_name(g) << "\n";
  if (cs)
    txt << "  criteria:  max standard " << max_standard << " ("
        << verdict_word(*std_ad) << "), max generalized " << max_generalized << " ("
        << verdict_word(*gen_ad) << "), masked " << cs->missing << "\n";
  if (bounds_ran)
    txt << "  bounds:    jrs " << summary_num(rep.summary, {"bounds", "jrs_total"})
        << ", key " << key.back() << " ("
        << rep.summary["bounds"]["key_backend"].get<std::string>() << "), zeno "
        << zs.back().value() << "\n";
  if (ev)
    txt << "  evolution: min fidelity " << ev->min_fidelity << " ("
        << verdict_word(*meas_ad) << "), max phase mismatch " << ev->max_phase_mismatch
        << "\n";
  if (std_ad && meas_ad && *std_ad != *meas_ad)
    txt << "  note: standard criterion disagrees with the measured evolution\n";
  txt << "  output:    " << rep.output_dir << "\n";
  rep.text = txt.str();
  return rep;
}

std::vector<DiagnosticReport> sweep(const Scenario& s, const std::string& param,
                                    const std::vector<double>& values, int threads) {
  if (values.empty()) throw ConfigError("empty sweep value list");
  const std::string fam = s.model.value("family", std::string());
  const bool model_param =
      s.model.contains(param) && param != "family" && param != "path";
  if (!model_param && param != "epsilon" && param != "passages")
    throw ConfigError("parameter '" + param + "' is not a parameter of family '" + fam +
                      "'");
  if (param == "passages" && fam != "cycling_lz")
    throw ConfigError("passages sweep requires the cycling_lz family");

  const fs::path base =
      s.output_dir.empty() ? fs::path("results") / s.name : fs::path(s.output_dir);
  const fs::path sweepdir = base.string() + "-sweep-" + param;
  fs::create_directories(sweepdir);

  std::vector<Scenario> pts;
  pts.reserve(values.size());
  for (double v : values) {
    Scenario si = s;
    if (param == "epsilon") {
      if (!(v > 0.0)) throw ConfigError("epsilon values must be positive");
      si.epsilon = v;
    } else if (param == "passages") {
      const long long m = std::llround(v);
      if (m < 1 || static_cast<double>(m) != v)
        throw ConfigError("passages values must be positive integers");
      si.passages = static_cast<int>(m);
      si.grid.t_start = 0.0;
      si.grid.t_end = static_cast<double>(m) * pi / num(s.model, "varpi", "model");
    } else {
      si.model[param] = v;
    }
    si.name = s.name + "-" + param + "-" + short_value(v);
    si.output_dir = (sweepdir / short_value(v)).string();
    pts.push_back(std::move(si));
  }

  std::vector<DiagnosticReport> reps(pts.size());
  const int nth = std::max(1, std::min<int>(threads, static_cast<int>(pts.size())));
  if (nth == 1) {
    for (std::size_t i = 0; i < pts.size(); ++i) reps[i] = run(pts[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(pts.size());
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= pts.size()) return;
        try {
          reps[i] = run(pts[i]);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < nth; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errs)
      if (e) std::rethrow_exception(e);
  }

  {
    std::ofstream f(sweepdir / "sweep.csv");
    f << "param,value,max_standard,max_generalized,min_fidelity,final_fidelity,"
         "final_leak,key_final,jrs_total,jrs_integral,zeno_final\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Json& m = reps[i].summary;
      f << param << ',' << format_double(values[i]) << ','
        << cell(summary_num(m, {"criteria", "max_standard"})) << ','
        << cell(summary_num(m, {"criteria", "max_generalized"})) << ','
        << cell(summary_num(m, {"evolution", "min_fidelity"})) << ','
        << cell(summary_num(m, {"evolution", "final_fidelity"})) << ','
        << cell(summary_num(m, {"evolution", "final_leak"})) << ','
        << cell(summary_num(m, {"bounds", "key_final"})) << ','
        << cell(summary_num(m, {"bounds", "jrs_total"})) << ','
        << cell(summary_num(m, {"bounds", "jrs_integral"})) << ','
        << cell(summary_num(m, {"bounds", "zeno_final"})) << '\n';
    }
  }
  {
    Json sj;
    sj["schema_version"] = 1;
    sj["name"] = s.name;
    sj["param"] = param;
    sj["values"] = values;
    Json rows = Json::array();
    for (std::size_t i = 0; i < pts.size(); ++i)
      rows.push_back(Json{{"value", values[i]},
                          {"name", reps[i].name},
                          {"output", reps[i].output_dir}});
    sj["runs"] = rows;
    std::ofstream f(sweepdir / "sweep.json");
    f << sj.dump(2) << '\n';
  }
  return reps;
}

std::string list_families() {
  return
      "schwinger      omega0, theta, omega\n"
      "cycling_lz     alpha, varpi, Omega   (scenario field `passages` sets the horizon)\n"
      "interpolating  h_in, h_fin, T        (matrices as rows of numbers or [re, im])\n"
      "constant       h\n"
      "tabulated      path                  (CSV: t, re/im entry pairs, row-major)\n"
      "random_smooth  dim, seed, gap, strength, harmonics\n";
}

}  // namespace adia
