// ============================================================================
// wsncov_cli.hpp -- command-line front end
//
//   wsncov analyze   closed-form metrics for one configuration
//   wsncov simulate  Monte Carlo estimates next to the closed forms
//   wsncov figure N  tables for the four reference figures
//   wsncov sweep F   generic sweep from a JSON spec file
//   wsncov validate  closed form vs simulator grid
//
// Exit codes: 0 ok, 2 invalid flags or spec, 3 --check failed, 4 I/O error.
// ============================================================================
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsncov/analytics.hpp"
#include "wsncov/experiments.hpp"
#include "wsncov/montecarlo.hpp"
#include "wsncov/table.hpp"

namespace wsncov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCheckFailed = 3;
inline constexpr int kExitIo = 4;

/// Environment variable overriding the default master seed.
inline constexpr const char* kSeedEnv = "WSNCOV_SEED";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioFlags {
  std::optional<double> lambda;
  std::optional<double> density_km2;
  double rs = 150.0;
  double tau = 5.0;
  double amplitude = 1.0;
  std::optional<double> w;
  bool no_profile = false;
  double r = 100.0;
  std::optional<long long> m;

  [[nodiscard]] double density() const {
    if (density_km2) return per_km2_to_per_m2(*density_km2);
    return lambda.value_or(1e-5);
  }
  [[nodiscard]] ToleranceProfile profile() const {
    return no_profile ? ToleranceProfile::none() : ToleranceProfile::exponential(amplitude, w.value_or(0.01));
  }
  [[nodiscard]] ScenarioParams params() const {
    if (!(tau >= 0.0)) throw std::invalid_argument("--tau must be non-negative");
    if (m && *m < 1) throw std::invalid_argument("--m must be at least 1");
    return ScenarioParams{NetworkModel{density(), rs}, profile(), tau, RegionOfInterest{r}};
  }
  [[nodiscard]] Json to_json() const {
    return {{"lambda_per_m2", density()},
            {"lambda_per_km2", per_m2_to_per_km2(density())},
            {"rs", rs},
            {"tau", tau},
            {"amplitude", amplitude},
            {"w", no_profile ? Json(nullptr) : Json(w.value_or(0.01))},
            {"no_profile", no_profile},
            {"r", r},
            {"m", m ? Json(*m) : Json(nullptr)}};
  }
};

struct SimulationFlags {
  std::uint64_t seed = 20210601;
  std::size_t replications = 200;
  std::size_t test_points = 10000;
  double window = 5000.0;
  std::optional<double> padding;
  unsigned workers = 1;

  [[nodiscard]] SimulationConfig config() const {
    SimulationConfig c;
    c.seed = seed;
    c.replications = replications;
    c.test_points = test_points;
    c.half_width = window;
    c.padding = padding;
    c.workers = workers;
    return c;
  }
  [[nodiscard]] Json to_json() const {
    return {{"seed", seed},
            {"replications", replications},
            {"test_points", test_points},
            {"window_half_width", window},
            {"padding", padding ? Json(*padding) : Json(nullptr)},
            {"workers", workers}};
  }
};

struct OutputFlags {
  std::string out;
  std::string format = "csv";
  int precision = 13;
};

inline void add_scenario_flags(CLI::App* app, ScenarioFlags& f, bool multi_m_and_r = false) {
  auto* lambda = app->add_option("--lambda", f.lambda, "Sensor density, sensors per m^2")->check(CLI::NonNegativeNumber);
  auto* km2 = app->add_option("--density-km2", f.density_km2, "Sensor density, sensors per km^2")->check(CLI::NonNegativeNumber);
  lambda->excludes(km2);
  app->add_option("--rs", f.rs, "Native sensing radius R_S, m")->check(CLI::NonNegativeNumber);
  app->add_option("--tau", f.tau, "Allowed tolerance tau")->check(CLI::NonNegativeNumber);
  app->add_option("-A,--amplitude", f.amplitude, "Tolerance-function amplitude A")->check(CLI::PositiveNumber);
  auto* w = app->add_option("--w", f.w, "Spatial variation rate w, per m")->check(CLI::PositiveNumber);
  auto* none = app->add_flag("--no-profile", f.no_profile, "No spatial profile (w = infinity)");
  w->excludes(none);
  if (!multi_m_and_r) {
    app->add_option("--r", f.r, "Radius of the region of interest, m")->check(CLI::NonNegativeNumber);
    app->add_option("--m", f.m, "Sensor count m for the m-metrics")->check(CLI::PositiveNumber);
  }
}

inline void add_simulation_flags(CLI::App* app, SimulationFlags& f) {
  app->add_option("--seed", f.seed, "Master seed (default from $WSNCOV_SEED, else 20210601)");
  app->add_option("--replications", f.replications, "Monte Carlo replications")->check(CLI::PositiveNumber);
  app->add_option("--test-points", f.test_points, "Stratified test points per replication")->check(CLI::PositiveNumber);
  app->add_option("--window", f.window, "Observation window half-width L, m")->check(CLI::PositiveNumber);
  app->add_option("--padding", f.padding, "Sampling padding P, m (default R_S(tau) + r + 1)")->check(CLI::NonNegativeNumber);
  app->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
}

inline void add_output_flags(CLI::App* app, OutputFlags& f, const std::string& out_help) {
  app->add_option("--out", f.out, out_help);
  app->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--precision", f.precision, "Significant digits")->check(CLI::Range(10, 17));
}

inline std::string fmt(double v, int precision) { return format_real(v, precision); }

/// Writes `text` to `path`, creating parent directories.
inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
}

inline Json metrics_json(const Table& t) {
  Json m = Json::object();
  for (const auto& row : t.rows) {
    const auto& name = std::get<std::string>(row[0]);
    if (const auto* d = std::get_if<double>(&row[1])) m[name] = *d;
    else m[name] = nullptr;
  }
  return m;
}

// ============================================================================
// analyze
// ============================================================================
inline Table analyze_table(const ScenarioFlags& f) {
  const ScenarioParams p = f.params();
  Table t;
  t.columns = {"metric", "value"};
  auto undefined = Cell{std::string("NA")};
  t.add_row({std::string("lambda_per_m2"), p.net.density()});
  t.add_row({std::string("lambda_per_km2"), per_m2_to_per_km2(p.net.density())});
  t.add_row({std::string("effective_radius"), p.radius().meters});
  t.add_row({std::string("nu"), saf(p)});
  t.add_row({std::string("vacancy"), vacancy(p)});
  t.add_row({std::string("eta"), p.net.density() > 0.0 && p.net.sensing_radius() > 0.0 ? Cell{cif(p)} : undefined});
  t.add_row({std::string("mu"), intersection_prob(p)});
  t.add_row({std::string("beta"), cover_prob(p)});
  if (f.m) {
    const long long m = *f.m;
    t.add_row({std::string("nu_m"), at_most_m_saf(m, p)});
    t.add_row({std::string("mu_m"), m_intersection_prob(m, p)});
    t.add_row({std::string("beta_m"), m_cover_prob(m, p)});
    if (p.radius().meters + p.region.radius() > 0.0) {
      const OptimalDensity opt = optimal_density(m, p.net, p.profile, p.tau, p.region);
      t.add_row({std::string("lambda_opt_per_m2"), opt.density});
      t.add_row({std::string("lambda_opt_per_km2"), per_m2_to_per_km2(opt.density)});
      t.add_row({std::string("mu_max"), opt.max_probability});
    } else {
      t.add_row({std::string("lambda_opt_per_m2"), undefined});
      t.add_row({std::string("lambda_opt_per_km2"), undefined});
      t.add_row({std::string("mu_max"), undefined});
    }
  }
  return t;
}

// ============================================================================
// simulate
// ============================================================================
struct SimulationRow {
  std::string metric;
  double exact;
  MetricEstimate estimate;
};

inline std::vector<SimulationRow> simulate_rows(const ScenarioFlags& f, const SimulationConfig& sim) {
  const ScenarioParams p = f.params();
  const auto outcomes = simulate(p, sim);
  std::vector<SimulationRow> rows{
      {"nu", saf(p), estimate_saf(outcomes)},
      {"vacancy", vacancy(p), estimate_exact_k_fraction(0, outcomes)},
      {"mu", intersection_prob(p), estimate_intersection_events(std::nullopt, outcomes)},
      {"beta", cover_prob(p), estimate_cover_events(std::nullopt, outcomes)},
  };
  if (f.m) {
    const long long m = *f.m;
    const auto mu = static_cast<std::size_t>(m);
    rows.push_back({"nu_m", at_most_m_saf(m, p), estimate_at_most_m_fraction(mu, outcomes)});
    rows.push_back({"mu_m", m_intersection_prob(m, p), estimate_intersection_events(mu, outcomes)});
    rows.push_back({"beta_m", m_cover_prob(m, p), estimate_cover_events(mu, outcomes)});
  }
  return rows;
}

inline Table simulation_table(const std::vector<SimulationRow>& rows) {
  Table t;
  t.columns = {"metric", "exact", "estimate", "se", "z", "replications", "samples_per_replication"};
  const Cell na{std::string("NA")};
  for (const auto& r : rows) {
    const auto z = z_score(r.estimate, r.exact);
    t.add_row({r.metric, r.exact, r.estimate.mean, r.estimate.standard_error ? Cell{*r.estimate.standard_error} : na,
               z ? Cell{*z} : na, static_cast<long long>(r.estimate.replications),
               static_cast<long long>(r.estimate.samples_per_replication)});
  }
  return t;
}

// ============================================================================
// Entry point
// ============================================================================
inline std::uint64_t default_seed() {
  if (const char* s = std::getenv(kSeedEnv)) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(s, &pos);
      if (pos == std::string(s).size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string(kSeedEnv) + " is not an unsigned integer");
  }
  return 20210601;
}

inline void emit(std::ostream& out, const OutputFlags& o, const Table& t, const Json& doc) {
  std::string text;
  if (o.format == "json")
    text = doc.dump(2) + "\n";
  else
    text = to_csv(t, o.precision, "\n");
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, o.format == "json" ? text : to_csv(t, o.precision));
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coverage analysis for sensor networks with spatial-profile tolerance", "wsncov"};
  app.require_subcommand(1);

  ScenarioFlags scenario;
  SimulationFlags simulation;
  OutputFlags output;
  bool check = false;
  double z_threshold = 4.0;

  try {
    simulation.seed = default_seed();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto* analyze = app.add_subcommand("analyze", "Closed-form coverage metrics");
  add_scenario_flags(analyze, scenario);
  add_output_flags(analyze, output, "Write the table here instead of stdout");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimates with standard errors");
  add_scenario_flags(simulate_cmd, scenario);
  add_simulation_flags(simulate_cmd, simulation);
  add_output_flags(simulate_cmd, output, "Write the table here instead of stdout");
  simulate_cmd->add_flag("--check", check, "Exit 3 if any |z| exceeds --z-threshold");
  simulate_cmd->add_option("--z-threshold", z_threshold, "z-score limit for --check")->check(CLI::PositiveNumber);

  int figure_number = 0;
  std::vector<long long> figure_ms;
  std::vector<double> figure_radii;
  std::string out_dir = ".";
  auto* figure = app.add_subcommand("figure", "Reproduce a reference figure's table");
  figure->add_option("n", figure_number, "Figure number")->required()->check(CLI::Range(1, 4));
  add_scenario_flags(figure, scenario, true);
  figure->add_option("--m", figure_ms, "Sensor counts m (figures 2-4)")->check(CLI::PositiveNumber);
  figure->add_option("--r", figure_radii, "Region radii r (figure 3)")->check(CLI::NonNegativeNumber);
  figure->add_option("--out", out_dir, "Output directory");
  figure->add_option("--precision", output.precision, "Significant digits")->check(CLI::Range(10, 17));

  std::string spec_path;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Sweep from a JSON spec file");
  sweep->add_option("spec", spec_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--out", sweep_out, "Output CSV (overrides the spec's output)");
  sweep->add_option("--precision", output.precision, "Significant digits")->check(CLI::Range(10, 17));

  auto* validate = app.add_subcommand("validate", "Closed form vs simulator validation grid");
  add_simulation_flags(validate, simulation);
  add_output_flags(validate, output, "Write the report here instead of stdout");
  validate->add_flag("--check", check, "Exit 3 if the grid fails its pass criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      const Table t = analyze_table(scenario);
      Json doc = {{"command", "analyze"}, {"configuration", scenario.to_json()}, {"metrics", metrics_json(t)}};
      emit(out, output, t, doc);
      return kExitOk;
    }

    if (simulate_cmd->parsed()) {
      const auto rows = simulate_rows(scenario, simulation.config());
      const Table t = simulation_table(rows);
      Json metrics = Json::array();
      bool failed = false;
      for (const auto& r : rows) {
        const auto z = z_score(r.estimate, r.exact);
        if (check && z && std::abs(*z) > z_threshold) failed = true;
        metrics.push_back({{"metric", r.metric},
                           {"exact", r.exact},
                           {"estimate", r.estimate.mean},
                           {"se", r.estimate.standard_error ? Json(*r.estimate.standard_error) : Json(nullptr)},
                           {"z", z ? Json(*z) : Json(nullptr)}});
      }
      Json doc = {{"command", "simulate"},
                  {"configuration", scenario.to_json()},
                  {"simulation", simulation.to_json()},
                  {"metrics", metrics}};
      emit(out, output, t, doc);
      if (failed) {
        err << "check failed: |z| > " << z_threshold << "\n";
        return kExitCheckFailed;
      }
      return kExitOk;
    }

    if (figure->parsed()) {
      SweepResult result;
      Json config;
      switch (figure_number) {
        case 1: {
          Figure1Options o;
          o.sensing_radius = figure->count("--rs") ? scenario.rs : o.sensing_radius;
          o.tau = figure->count("--tau") ? scenario.tau : o.tau;
          o.amplitude = scenario.amplitude;
          if (scenario.w) o.rates = {*scenario.w, std::nullopt};
          result = figure1_sweep(o);
          config = {{"rs", o.sensing_radius}, {"tau", o.tau}, {"amplitude", o.amplitude}};
          break;
        }
        case 2: {
          Figure2Options o;
          o.sensing_radius = scenario.rs;
          o.tau = scenario.tau;
          o.amplitude = scenario.amplitude;
          o.rate = scenario.w.value_or(o.rate);
          if (!figure_ms.empty()) o.ms = figure_ms;
          result = figure2_sweep(o);
          config = {{"rs", o.sensing_radius}, {"tau", o.tau}, {"amplitude", o.amplitude}, {"w", o.rate}, {"m", o.ms}};
          break;
        }
        case 3: {
          Figure3Options o;
          o.sensing_radius = scenario.rs;
          o.tau = scenario.tau;
          o.amplitude = scenario.amplitude;
          o.rate = scenario.w.value_or(o.rate);
          if (!figure_ms.empty()) o.ms = figure_ms;
          if (!figure_radii.empty()) o.radii = figure_radii;
          result = figure3_sweep(o);
          config = {{"rs", o.sensing_radius}, {"tau", o.tau}, {"amplitude", o.amplitude}, {"w", o.rate}, {"m", o.ms}, {"r", o.radii},
                    {"assumption", "tau and A are not stated for this figure; defaults tau=5, A=1"}};
          break;
        }
        case 4: {
          Figure4Options o;
          o.sensing_radius = scenario.rs;
          o.amplitude = scenario.amplitude;
          o.rate = scenario.w.value_or(o.rate);
          o.density = scenario.lambda || scenario.density_km2 ? scenario.density() : o.density;
          if (figure->count("--tau")) o.taus = {0.0, scenario.tau};
          if (!figure_ms.empty()) o.ms = figure_ms;
          result = figure4_sweep(o);
          config = {{"rs", o.sensing_radius}, {"lambda", o.density}, {"amplitude", o.amplitude}, {"w", o.rate}, {"tau", o.taus},
                    {"m", o.ms}, {"assumption", "tau and A are not stated for this figure; defaults tau=5, A=1"}};
          break;
        }
      }
      const std::filesystem::path dir(out_dir);
      const auto csv = dir / ("figure" + std::to_string(figure_number) + ".csv");
      const auto json = dir / ("figure" + std::to_string(figure_number) + "_summary.json");
      write_file(csv, to_csv(result.table, output.precision));
      Json doc = {{"figure", figure_number}, {"configuration", config}, {"summary", result.summary}};
      write_file(json, doc.dump(2) + "\n");
      out << "figure " << figure_number << ": " << result.table.rows.size() << " rows -> " << csv.string() << "\n";
      return kExitOk;
    }

    if (sweep->parsed()) {
      std::ifstream is(spec_path);
      if (!is) throw IoError("cannot read " + spec_path);
      Json spec_json;
      try {
        spec_json = Json::parse(is);
      } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("sweep spec is not valid JSON: ") + e.what());
      }
      const SweepSpec spec = parse_sweep_spec(spec_json);
      const std::string target = sweep_out.empty() ? spec.output : sweep_out;
      if (target.empty()) throw std::invalid_argument("sweep spec has no output path and --out was not given");
      const SweepResult result = run_sweep(spec);
      std::filesystem::path csv(target);
      write_file(csv, to_csv(result.table, output.precision));
      std::filesystem::path json = csv;
      json.replace_extension();
      json += "_summary.json";
      write_file(json, Json{{"spec", spec_json}, {"summary", result.summary}}.dump(2) + "\n");
      out << "sweep " << spec.swept << ": " << result.table.rows.size() << " rows -> " << csv.string() << "\n";
      return kExitOk;
    }

    if (validate->parsed()) {
      const ValidationReport report = validation_grid(simulation.config());
      const Table t = report.table();
      Json doc = {{"command", "validate"},
                  {"simulation", simulation.to_json()},
                  {"cells", t.rows.size()},
                  {"within_4se", report.count_within(4.0)},
                  {"within_3se", report.count_within(3.0)},
                  {"required_within_4se", report.required_within4()},
                  {"required_within_3se", report.required_within3()},
                  {"passed", report.passed()}};
      Json cells = Json::array();
      for (const auto& c : report.cells)
        cells.push_back({{"lambda", c.density}, {"rs", c.sensing_radius}, {"tau", c.tau}, {"metric", c.metric},
                         {"exact", c.exact}, {"estimate", c.estimate.mean},
                         {"se", c.estimate.standard_error ? Json(*c.estimate.standard_error) : Json(nullptr)},
                         {"z", c.z ? Json(*c.z) : Json(nullptr)}});
      doc["results"] = cells;
      emit(out, output, t, doc);
      err << "validation: " << report.count_within(4.0) << "/" << t.rows.size() << " within 4 SE, "
          << report.count_within(3.0) << "/" << t.rows.size() << " within 3 SE\n";
      if (check && !report.passed()) return kExitCheckFailed;
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace wsncov::cli
