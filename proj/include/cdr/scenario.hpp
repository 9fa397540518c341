#pragma once

#include "cdr/distribution.hpp"
#include "cdr/monotone_map.hpp"
#include "cdr/shift.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cdr {

// A target Q, optionally a shift producing the source P, and the map phi
// with eta_P = phi(eta_Q) (identity when there is no shift).
struct Scenario {
  std::string name;
  JointDistribution target;
  JointDistribution source;
  std::optional<ShiftSpec> shift;
  MonotoneMap phi = MonotoneMap::identity();
  nlohmann::json document;
};

FeatureDomain parse_domain(const nlohmann::json& j);
DensityPtr parse_density(const nlohmann::json& j, const FeatureDomain& domain);
ShiftSpec parse_shift(const nlohmann::json& j, const FeatureDomain& domain);

Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);

// Bundled library S1..S7:
//   S1  5-point grid with hand-computed tables
//   S2  1-d box, Gaussian class-conditionals, smooth monotone posterior
//   S3  S2 under CSPD with phi = lr_scale(3) and a shifted-mean marginal
//   S4  S1 under target shift
//   S5  S1 under label-dependent noise (0.1, 0.2)
//   S6  S1 under one-sided noise with psi(u) = u/2
//   S7  grid whose score CDF grows quadratically at the alpha = 0.5 level
std::vector<std::string> builtin_scenario_names();
nlohmann::json builtin_scenario_json(const std::string& name);
Scenario builtin_scenario(const std::string& name);

// "S3", "builtin:S3", or a path to a scenario JSON file.
Scenario resolve_scenario(const std::string& reference);

}  // namespace cdr
