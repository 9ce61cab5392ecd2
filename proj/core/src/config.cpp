#include "cogshare/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "cogshare/artifacts.hpp"

namespace cogshare {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return parsed;
  } catch (const std::exception&) {
    throw InvalidConfig("invalid numeric value for '" + key + "': " + value);
  }
}

int64_t parse_int(const std::string& key, const std::string& value) {
  int64_t parsed = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw InvalidConfig("invalid integer value for '" + key + "': " + value);
  }
  return parsed;
}

}  // namespace

std::optional<int64_t> capacity_from_string(const std::string& text) {
  if (text == "inf" || text == "infinite" || text == "unbounded") {
    return std::nullopt;
  }
  return parse_int("capacity", text);
}

std::string capacity_to_string(const std::optional<int64_t>& capacity) {
  return capacity ? std::to_string(*capacity) : "inf";
}

SimMode parse_sim_mode(const std::string& name) {
  if (name == "original") return SimMode::Original;
  if (name == "dominant1") return SimMode::Dominant1;
  if (name == "dominant2") return SimMode::Dominant2;
  if (name == "saturated") return SimMode::SaturatedBoth;
  throw InvalidConfig(
      "unknown mode '" + name +
      "' (expected original, dominant1, dominant2, or saturated)");
}

ConfigValues parse_config_text(const std::string& text) {
  ConfigValues values;
  std::set<std::string> seen;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("line " + std::to_string(line_number) +
                          ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InvalidConfig("line " + std::to_string(line_number) +
                          ": empty key or value");
    }
    if (!seen.insert(key).second) {
      throw InvalidConfig("duplicate key '" + key + "'");
    }

    if (key == "q11") {
      values.q11 = parse_double(key, value);
    } else if (key == "q22") {
      values.q22 = parse_double(key, value);
    } else if (key == "q112") {
      values.q112 = parse_double(key, value);
    } else if (key == "q212") {
      values.q212 = parse_double(key, value);
    } else if (key == "delta") {
      values.delta = parse_double(key, value);
    } else if (key == "capacity") {
      values.capacity = capacity_from_string(value);
    } else if (key == "lambda1") {
      values.lambda1 = parse_double(key, value);
    } else if (key == "lambda2") {
      values.lambda2 = parse_double(key, value);
    } else if (key == "p") {
      values.p = parse_double(key, value);
    } else if (key == "mode") {
      values.mode = parse_sim_mode(value);
    } else if (key == "horizon") {
      values.horizon = parse_int(key, value);
    } else if (key == "burn_in") {
      values.burn_in = parse_int(key, value);
    } else if (key == "replications") {
      values.replications = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      values.seed = static_cast<uint64_t>(parse_int(key, value));
    } else if (key == "stride") {
      values.stride = parse_int(key, value);
    } else if (key == "points") {
      values.points = static_cast<int>(parse_int(key, value));
    } else if (key == "inset") {
      values.inset = parse_double(key, value);
    } else {
      throw InvalidConfig("unknown key '" + key + "'");
    }
  }

  for (const char* required : {"q11", "q22", "q112", "q212", "delta",
                               "capacity", "lambda1", "lambda2", "p"}) {
    if (seen.find(required) == seen.end()) {
      throw InvalidConfig(std::string("missing required key '") + required +
                          "'");
    }
  }
  return values;
}

ConfigValues parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw InvalidConfig("cannot read config file: " + path);
  }
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config_text(text.str());
}

Scenario ConfigValues::to_scenario() const {
  return Scenario{ChannelModel(q11, q22, q112, q212),
                  EnergyModel(delta, capacity), ArrivalRates(lambda1, lambda2),
                  AccessPolicy(p)};
}

std::vector<std::pair<std::string, std::string>> scenario_key_values(
    const Scenario& scenario) {
  auto fmt = [](double v) { return format_double(v); };
  return {
      {"q11", fmt(scenario.channel.q11)},
      {"q22", fmt(scenario.channel.q22)},
      {"q112", fmt(scenario.channel.q112)},
      {"q212", fmt(scenario.channel.q212)},
      {"delta", fmt(scenario.energy.delta)},
      {"capacity", capacity_to_string(scenario.energy.capacity)},
      {"lambda1", fmt(scenario.arrivals.lambda1)},
      {"lambda2", fmt(scenario.arrivals.lambda2)},
      {"p", fmt(scenario.policy.p)},
  };
}

std::string serialize_scenario(const Scenario& scenario) {
  std::ostringstream out;
  for (const auto& [key, value] : scenario_key_values(scenario)) {
    out << key << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace cogshare
