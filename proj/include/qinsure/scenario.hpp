#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qinsure/distributions.hpp"
#include "qinsure/error.hpp"
#include "qinsure/insurance.hpp"

namespace qinsure {

struct Scenario {
  std::size_t steps = 0;
  std::size_t resolution = 0;
  double z_min = 0.0;
  double z_max = 1.0;
  // One law per step.
  std::vector<std::vector<double>> distribution;
  std::optional<std::vector<std::vector<double>>> lapse;
  std::optional<MortalityTable> mortality;
  std::int64_t scale = 64;

  [[nodiscard]] ProcessDistribution process() const {
    ProcessDistribution proc;
    for (const auto& p : distribution) {
      proc.steps.push_back(make_distribution(p, z_min, z_max));
    }
    validate(proc);
    return proc;
  }

  [[nodiscard]] LapseModel lapse_model() const {
    require(lapse.has_value(), ErrorCode::InvalidScenario, "scenario has no lapse table");
    return {*lapse};
  }

  [[nodiscard]] std::vector<double> mortality_weights() const {
    require(mortality.has_value(), ErrorCode::InvalidScenario, "scenario has no mortality table");
    return qinsure::mortality_weights(*mortality, steps);
  }
};

namespace detail {

template <class T>
T field(const nlohmann::json& j, const char* key) {
  require(j.is_object() && j.contains(key), ErrorCode::InvalidScenario, std::string("missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::InvalidScenario, std::string("key \"") + key + "\" has the wrong type");
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::InvalidScenario, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidScenario, path + ": " + e.what());
  }
}

/// Wraps library precondition failures raised while checking a scenario.
template <class F>
auto as_scenario_error(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidScenario) {
      throw;
    }
    throw Error(ErrorCode::InvalidScenario, e.what());
  }
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
  using detail::field;
  require(j.is_object(), ErrorCode::InvalidScenario, "scenario must be a JSON object");
  Scenario s;
  const auto steps = field<std::int64_t>(j, "steps");
  const auto resolution = field<std::int64_t>(j, "resolution");
  require(steps >= 1, ErrorCode::InvalidScenario, "steps must be at least 1");
  require(resolution >= 1 && resolution <= 20, ErrorCode::InvalidScenario, "resolution must be in [1, 20]");
  s.steps = static_cast<std::size_t>(steps);
  s.resolution = static_cast<std::size_t>(resolution);
  const auto grid = field<nlohmann::json>(j, "grid");
  s.z_min = field<double>(grid, "z_min");
  s.z_max = field<double>(grid, "z_max");
  require(s.z_max > s.z_min, ErrorCode::InvalidScenario, "grid needs z_max > z_min");

  const auto dist = field<nlohmann::json>(j, "distribution");
  if (dist.is_string()) {
    require(dist.get<std::string>() == "uniform_excluding_zero", ErrorCode::InvalidScenario,
            "unknown distribution \"" + dist.get<std::string>() + "\"");
    s.distribution.assign(s.steps, uniform_excluding_zero(s.resolution).probabilities);
  } else if (dist.is_array() && !dist.empty() && dist.front().is_array()) {
    s.distribution = field<std::vector<std::vector<double>>>(j, "distribution");
    require(s.distribution.size() == s.steps, ErrorCode::InvalidScenario, "one distribution per step");
  } else {
    s.distribution.assign(s.steps, field<std::vector<double>>(j, "distribution"));
  }
  for (const auto& p : s.distribution) {
    require(p.size() == (std::size_t{1} << s.resolution), ErrorCode::InvalidScenario,
            "distribution needs 2^resolution entries");
  }

  if (j.contains("lapse")) {
    s.lapse = field<std::vector<std::vector<double>>>(j, "lapse");
  }
  if (j.contains("mortality")) {
    const auto m = field<nlohmann::json>(j, "mortality");
    s.mortality = MortalityTable{field<int>(m, "x"), field<std::vector<double>>(m, "q")};
  }
  if (j.contains("scale")) {
    s.scale = field<std::int64_t>(j, "scale");
    require(s.scale >= 1, ErrorCode::InvalidScenario, "scale must be at least 1");
  }

  detail::as_scenario_error([&] {
    (void)s.process();
    if (s.lapse) {
      (void)checked_lapse_rates(s.process(), LapseModel{*s.lapse});
    }
    if (s.mortality) {
      (void)s.mortality_weights();
    }
    return 0;
  });
  return s;
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(detail::read_json_file(path)); }

/// {"r", "z_min", "z_max", "probabilities"}
inline DiscreteDistribution parse_distribution(const nlohmann::json& j) {
  using detail::field;
  const auto r = field<std::int64_t>(j, "r");
  const auto p = field<std::vector<double>>(j, "probabilities");
  require(r >= 1 && r <= 20, ErrorCode::InvalidScenario, "r must be in [1, 20]");
  require(p.size() == (std::size_t{1} << r), ErrorCode::InvalidScenario, "probabilities need 2^r entries");
  const double z_min = field<double>(j, "z_min");
  const double z_max = field<double>(j, "z_max");
  return detail::as_scenario_error([&] { return make_distribution(p, z_min, z_max); });
}

inline DiscreteDistribution load_distribution(const std::string& path) {
  return parse_distribution(detail::read_json_file(path));
}

} // namespace qinsure
