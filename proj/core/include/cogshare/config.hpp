#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cogshare/model.hpp"
#include "cogshare/sim.hpp"

// Flat key = value scenario configuration. The scenario keys are fixed:
//
//   q11, q22, q112, q212, delta, capacity (integer or "inf"),
//   lambda1, lambda2, p
//
// Optional simulation keys mirror the CLI flags: mode, horizon, burn_in,
// replications, seed, stride, points, inset. Lines starting with '#' and
// blank lines are ignored. Unknown keys are hard errors so that a mistyped
// probability name cannot silently fall back to a default.

namespace cogshare {

// Raw parsed values before Scenario validation; all scenario keys required.
struct ConfigValues {
  double q11 = 0.0, q22 = 0.0, q112 = 0.0, q212 = 0.0;
  double delta = 0.0;
  std::optional<int64_t> capacity;  // nullopt = "inf"
  double lambda1 = 0.0, lambda2 = 0.0, p = 0.0;

  // Optional simulation settings (flag equivalents).
  std::optional<SimMode> mode;
  std::optional<int64_t> horizon;
  std::optional<int64_t> burn_in;
  std::optional<int> replications;
  std::optional<uint64_t> seed;
  std::optional<int64_t> stride;
  std::optional<int> points;
  std::optional<double> inset;

  Scenario to_scenario() const;
};

ConfigValues parse_config_text(const std::string& text);
ConfigValues parse_config_file(const std::string& path);

// Scenario keys in the canonical order, for echoing into output headers.
std::vector<std::pair<std::string, std::string>> scenario_key_values(
    const Scenario& scenario);

std::string serialize_scenario(const Scenario& scenario);

SimMode parse_sim_mode(const std::string& name);  // throws InvalidConfig

// "inf" or the integer capacity.
std::string capacity_to_string(const std::optional<int64_t>& capacity);
std::optional<int64_t> capacity_from_string(const std::string& text);

}  // namespace cogshare
