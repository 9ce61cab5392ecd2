// cogshare: stability regions, optimal access probabilities, and Monte Carlo
// cross-validation for a two-pair cognitive shared channel with an
// energy-harvesting primary node.
//
// Subcommands: region, simulate, sweep, validate.
// Exit codes: 0 success, 1 usage or configuration error, 2 validation
// failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cogshare/artifacts.hpp"
#include "cogshare/config.hpp"
#include "cogshare/regions.hpp"
#include "cogshare/sim.hpp"
#include "cogshare/validate.hpp"
#include "cogshare/version.hpp"

using namespace cogshare;

namespace {

struct ScenarioOverrides {
  std::optional<double> q11, q22, q112, q212, delta, lambda1, lambda2, p;
  std::optional<std::string> capacity;
};

void add_scenario_flags(CLI::App* cmd, ScenarioOverrides& ov) {
  cmd->add_option("--q11", ov.q11, "success probability of s1 alone");
  cmd->add_option("--q22", ov.q22, "success probability of s2 alone");
  cmd->add_option("--q112", ov.q112, "success of s1 under joint transmission");
  cmd->add_option("--q212", ov.q212, "success of s2 under joint transmission");
  cmd->add_option("--delta", ov.delta, "energy harvesting rate per slot");
  cmd->add_option("--capacity", ov.capacity,
                  "battery capacity (integer or 'inf')");
  cmd->add_option("--lambda1", ov.lambda1, "primary arrival rate");
  cmd->add_option("--lambda2", ov.lambda2, "secondary arrival rate");
  cmd->add_option("--p", ov.p, "secondary access probability");
}

ConfigValues load_config(const std::string& path,
                         const ScenarioOverrides& ov) {
  ConfigValues values = parse_config_file(path);
  if (ov.q11) values.q11 = *ov.q11;
  if (ov.q22) values.q22 = *ov.q22;
  if (ov.q112) values.q112 = *ov.q112;
  if (ov.q212) values.q212 = *ov.q212;
  if (ov.delta) values.delta = *ov.delta;
  if (ov.capacity) values.capacity = capacity_from_string(*ov.capacity);
  if (ov.lambda1) values.lambda1 = *ov.lambda1;
  if (ov.lambda2) values.lambda2 = *ov.lambda2;
  if (ov.p) values.p = *ov.p;
  return values;
}

struct SimFlags {
  std::optional<std::string> mode;
  std::optional<int64_t> horizon;
  std::optional<int64_t> burn_in;
  std::optional<int> replications;
  std::optional<uint64_t> seed;
};

void add_sim_flags(CLI::App* cmd, SimFlags& flags) {
  cmd->add_option("--mode", flags.mode,
                  "original | dominant1 | dominant2 | saturated");
  cmd->add_option("--horizon", flags.horizon, "slots per replication");
  cmd->add_option("--burn-in", flags.burn_in,
                  "slots discarded before measuring");
  cmd->add_option("--replications", flags.replications,
                  "independent replications");
  cmd->add_option("--seed", flags.seed, "master random seed");
}

SimConfig make_sim_config(const ConfigValues& values, const SimFlags& flags) {
  SimConfig config{values.to_scenario()};
  if (values.mode) config.mode = *values.mode;
  if (values.horizon) config.horizon = *values.horizon;
  if (values.burn_in) config.burn_in = *values.burn_in;
  if (values.replications) config.replications = *values.replications;
  if (values.seed) config.seed = *values.seed;
  if (flags.mode) config.mode = parse_sim_mode(*flags.mode);
  if (flags.horizon) config.horizon = *flags.horizon;
  if (flags.burn_in) config.burn_in = *flags.burn_in;
  if (flags.replications) config.replications = *flags.replications;
  if (flags.seed) config.seed = *flags.seed;
  return config;
}

HeaderKVs sim_meta(const SimConfig& config) {
  HeaderKVs meta = scenario_key_values(config.scenario);
  meta.emplace_back("mode", to_string(config.mode));
  meta.emplace_back("horizon", std::to_string(config.horizon));
  meta.emplace_back("burn_in", std::to_string(config.burn_in));
  meta.emplace_back("replications", std::to_string(config.replications));
  meta.emplace_back("seed", std::to_string(config.seed));
  return meta;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidConfig("cannot write output file: " + path);
  }
  return out;
}

int run_region(const std::string& config_path, const ScenarioOverrides& ov,
               int points, const std::string& out_path, std::string svg_path,
               bool overlay_infinite) {
  const ConfigValues values = load_config(config_path, ov);
  if (values.points) points = *values.points;
  const Scenario scenario = values.to_scenario();
  if (svg_path.empty()) {
    svg_path = std::filesystem::path(out_path)
                   .replace_extension(".svg")
                   .string();
  }

  const StabilityRegion region =
      build_region(scenario.channel, scenario.energy);
  const BoundaryPolyline polyline = boundary_polyline(region, points);

  HeaderKVs meta = scenario_key_values(scenario);
  for (auto& kv : region_meta_kvs(region.meta)) {
    meta.push_back(kv);
  }
  meta.emplace_back("points", std::to_string(points));
  {
    auto out = open_out(out_path);
    write_boundary_csv(out, polyline, meta);
  }

  std::vector<SvgCurve> curves;
  const bool finite = !scenario.energy.unbounded();
  if (overlay_infinite && finite) {
    const StabilityRegion unbounded_region =
        build_region(scenario.channel, EnergyModel(scenario.energy.delta));
    const BoundaryPolyline unbounded_polyline =
        boundary_polyline(unbounded_region, points);
    const std::string infinite_csv =
        std::filesystem::path(out_path).replace_extension().string() +
        "_infinite.csv";
    HeaderKVs infinite_meta = scenario_key_values(scenario);
    infinite_meta.emplace_back("capacity_override", "inf");
    for (auto& kv : region_meta_kvs(unbounded_region.meta)) {
      infinite_meta.push_back(kv);
    }
    {
      auto out = open_out(infinite_csv);
      write_boundary_csv(out, unbounded_polyline, infinite_meta);
    }
    curves.push_back({unbounded_polyline, "infinite battery", false});
    curves.push_back({polyline,
                      "capacity c=" +
                          std::to_string(*scenario.energy.capacity),
                      true});
  } else {
    curves.push_back(
        {polyline,
         finite ? "capacity c=" + std::to_string(*scenario.energy.capacity)
                : "infinite battery",
         false});
  }
  {
    auto out = open_out(svg_path);
    write_region_svg(out, curves);
  }

  for (const auto& [key, value] : region_meta_kvs(region.meta)) {
    std::cout << key << " = " << value << "\n";
  }
  std::cout << "wrote " << out_path << " and " << svg_path << "\n";
  return 0;
}

int run_simulate(const std::string& config_path, const ScenarioOverrides& ov,
                 const SimFlags& flags, const std::string& out_path,
                 const std::string& trajectory_path,
                 std::optional<int64_t> stride_flag) {
  const ConfigValues values = load_config(config_path, ov);
  const SimConfig config = make_sim_config(values, flags);

  int64_t stride = values.stride.value_or(1000);
  if (stride_flag) stride = *stride_flag;

  SimReport report;
  if (!trajectory_path.empty()) {
    auto trajectory_out = open_out(trajectory_path);
    write_trajectory_header(trajectory_out, sim_meta(config));
    report = run(
        config,
        [&](int64_t slot, const SystemState& state) {
          write_trajectory_row(trajectory_out, slot, state);
        },
        stride);
  } else {
    report = run(config);
  }

  {
    auto out = open_out(out_path);
    write_sim_report_csv(out, report, sim_meta(config));
  }

  std::cout << "mode=" << to_string(config.mode)
            << " replications=" << config.replications
            << " horizon=" << config.horizon << "\n";
  std::cout << "throughput1=" << format_double(report.mean.throughput1)
            << " throughput2=" << format_double(report.mean.throughput2)
            << " mu1_hat=" << format_double(report.mean.mu1_hat)
            << " mu2_hat=" << format_double(report.mean.mu2_hat) << "\n";
  std::cout << "active_fraction1="
            << format_double(report.mean.active_fraction1)
            << " battery_nonempty="
            << format_double(report.mean.battery_nonempty_fraction)
            << " stable1=" << (report.stable1 ? 1 : 0)
            << " stable2=" << (report.stable2 ? 1 : 0) << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_sweep(const std::string& config_path, const ScenarioOverrides& ov,
              const SimFlags& flags, const std::string& param,
              const std::vector<std::string>& value_strings,
              const std::string& out_path) {
  const ConfigValues base = load_config(config_path, ov);
  if (value_strings.empty()) {
    throw InvalidConfig("sweep requires at least one --values entry");
  }

  struct Point {
    std::string value_label;
    SimConfig config;
    SimReport report;
  };
  std::vector<Point> points;
  for (const auto& text : value_strings) {
    ConfigValues values = base;
    if (param == "lambda1") {
      values.lambda1 = std::stod(text);
    } else if (param == "lambda2") {
      values.lambda2 = std::stod(text);
    } else if (param == "p") {
      values.p = std::stod(text);
    } else if (param == "delta") {
      values.delta = std::stod(text);
    } else if (param == "c") {
      values.capacity = capacity_from_string(text);
    } else {
      throw InvalidConfig("unknown sweep parameter '" + param +
                          "' (expected lambda1, lambda2, p, delta, or c)");
    }
    points.push_back(Point{text, make_sim_config(values, flags), SimReport{}});
  }

  const uint64_t master_seed = points.front().config.seed;
  parallel_for(points.size(), [&](size_t i) {
    points[i].config.seed = splitmix64(master_seed ^ (i + 1));
    points[i].report = run(points[i].config);
  });

  auto out = open_out(out_path);
  HeaderKVs meta = scenario_key_values(base.to_scenario());
  meta.emplace_back("sweep_param", param);
  meta.emplace_back("mode", to_string(points.front().config.mode));
  meta.emplace_back("horizon", std::to_string(points.front().config.horizon));
  meta.emplace_back("replications",
                    std::to_string(points.front().config.replications));
  meta.emplace_back("seed", std::to_string(master_seed));
  write_csv_header_comments(out, meta);
  out << "param,value,throughput1,throughput2,mu1_hat,mu2_hat,"
         "active_fraction1,battery_nonempty_fraction,"
         "secondary_busy_fraction,queue_slope1,queue_slope2,stable1,"
         "stable2\n";
  for (const auto& point : points) {
    const ReplicationStats& m = point.report.mean;
    out << param << ',' << point.value_label << ','
        << format_double(m.throughput1) << ',' << format_double(m.throughput2)
        << ',' << format_double(m.mu1_hat) << ',' << format_double(m.mu2_hat)
        << ',' << format_double(m.active_fraction1) << ','
        << format_double(m.battery_nonempty_fraction) << ','
        << format_double(m.secondary_busy_fraction) << ','
        << format_double(m.queue_slope1) << ','
        << format_double(m.queue_slope2) << ','
        << (point.report.stable1 ? 1 : 0) << ','
        << (point.report.stable2 ? 1 : 0) << "\n";
  }
  std::cout << "wrote " << out_path << " (" << points.size() << " points)\n";
  return 0;
}

int run_validate(const std::string& suite, uint64_t seed, std::string out_path,
                 double inset) {
  ValidationReport report;
  if (suite == "service-rates") {
    const auto grid = run_saturated_grid(seed);
    report = service_rate_report(grid);
    report.seed = seed;
    ValidationReport active = validate_active_fraction(seed);
    for (auto& point : active.points) {
      report.points.push_back(point);
    }
    report.finalize();
  } else if (suite == "battery") {
    report = validate_battery(seed);
  } else if (suite == "boundary") {
    report = validate_boundary(seed, inset);
  } else if (suite == "pstar") {
    report = validate_pstar(seed);
  } else {
    throw InvalidConfig(
        "unknown suite '" + suite +
        "' (expected service-rates, battery, boundary, or pstar)");
  }

  if (out_path.empty()) {
    out_path = suite + ".csv";
  }
  {
    auto out = open_out(out_path);
    write_validation_csv(out, report);
  }

  size_t passed = 0;
  for (const auto& point : report.points) passed += point.pass;
  std::cout << "suite=" << suite << " points=" << report.points.size()
            << " passed=" << passed
            << " worst_deviation=" << format_double(report.worst_deviation)
            << "\n";
  for (const auto& point : report.points) {
    if (!point.pass) {
      std::cout << "FAIL " << point.params
                << " analytic=" << format_double(point.analytic)
                << " simulated=" << format_double(point.simulated)
                << " tolerance=" << format_double(point.tolerance) << "\n";
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return report.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cognitive shared channel stability analysis"};
  app.set_version_flag("--version", std::string("cogshare ") + kVersion);
  app.require_subcommand(1);

  // region
  auto* region_cmd =
      app.add_subcommand("region", "emit the stability region boundary");
  std::string region_config;
  ScenarioOverrides region_ov;
  int region_points = 201;
  std::string region_out = "region.csv";
  std::string region_svg;
  bool overlay_infinite = false;
  region_cmd->add_option("--config", region_config, "scenario file")
      ->required();
  region_cmd->add_option("--points", region_points, "boundary grid size");
  region_cmd->add_option("--out", region_out, "boundary CSV path");
  region_cmd->add_option("--svg", region_svg, "SVG path (default: out stem)");
  region_cmd->add_flag("--overlay-infinite", overlay_infinite,
                       "also emit the unbounded-battery frontier");
  add_scenario_flags(region_cmd, region_ov);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run the slotted simulator");
  std::string sim_config_path;
  ScenarioOverrides sim_ov;
  SimFlags sim_flags;
  std::string sim_out = "simulate.csv";
  std::string trajectory_path;
  std::optional<int64_t> stride;
  sim_cmd->add_option("--config", sim_config_path, "scenario file")
      ->required();
  sim_cmd->add_option("--out", sim_out, "report CSV path");
  sim_cmd->add_option("--trajectory", trajectory_path,
                      "dump slot,q1,q2,b1 for replication 0");
  sim_cmd->add_option("--stride", stride, "trajectory downsampling stride");
  add_sim_flags(sim_cmd, sim_flags);
  add_scenario_flags(sim_cmd, sim_ov);

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "simulate across a parameter grid");
  std::string sweep_config_path;
  ScenarioOverrides sweep_ov;
  SimFlags sweep_flags;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  std::string sweep_out = "sweep.csv";
  sweep_cmd->add_option("--config", sweep_config_path, "scenario file")
      ->required();
  sweep_cmd
      ->add_option("--param", sweep_param,
                   "lambda1 | lambda2 | p | delta | c")
      ->required();
  sweep_cmd
      ->add_option("--values", sweep_values, "comma separated grid values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--out", sweep_out, "sweep CSV path");
  add_sim_flags(sweep_cmd, sweep_flags);
  add_scenario_flags(sweep_cmd, sweep_ov);

  // validate
  auto* validate_cmd = app.add_subcommand(
      "validate", "run an analytic-vs-simulation campaign");
  std::string suite;
  uint64_t validate_seed = 1;
  std::string validate_out;
  double inset = 0.05;
  validate_cmd
      ->add_option("suite", suite,
                   "service-rates | battery | boundary | pstar")
      ->required();
  validate_cmd->add_option("--seed", validate_seed, "campaign seed");
  validate_cmd->add_option("--out", validate_out, "report CSV path");
  validate_cmd->add_option("--inset", inset,
                           "relative frontier inset (boundary suite)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (region_cmd->parsed()) {
      return run_region(region_config, region_ov, region_points, region_out,
                        region_svg, overlay_infinite);
    }
    if (sim_cmd->parsed()) {
      return run_simulate(sim_config_path, sim_ov, sim_flags, sim_out,
                          trajectory_path, stride);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_config_path, sweep_ov, sweep_flags, sweep_param,
                       sweep_values, sweep_out);
    }
    if (validate_cmd->parsed()) {
      return run_validate(suite, validate_seed, validate_out, inset);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
