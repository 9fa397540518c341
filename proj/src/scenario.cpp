#include "cdr/scenario.hpp"

#include "cdr/error.hpp"

#include <cmath>
#include <fstream>

namespace cdr {

using nlohmann::json;

namespace {

void format_require(bool ok, const std::string& what) { require(ok, ErrorKind::ScenarioFormat, what); }

const json& field(const json& j, const char* key) {
  format_require(j.is_object() && j.contains(key), std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  format_require(v.is_number(), std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Eigen::VectorXd vector_of(const json& j, const char* what) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  format_require(j.is_array() && !j.empty(), std::string(what) + " must be a nonempty array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    format_require(j[i].is_number(), std::string(what) + " entries must be numbers");
    out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

}  // namespace

FeatureDomain parse_domain(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "DiscreteGrid") {
    const json& points = field(j, "points");
    format_require(points.is_array() && !points.empty(), "'points' must be a nonempty array");
    std::vector<Feature> features;
    for (const auto& p : points) features.push_back(vector_of(p, "point"));
    return FeatureDomain::discrete_grid(features);
  }
  if (kind == "ContinuousBox") {
    const json& bounds = field(j, "bounds");
    format_require(bounds.is_array() && !bounds.empty(), "'bounds' must be a nonempty array");
    const auto d = static_cast<Eigen::Index>(bounds.size());
    Eigen::VectorXd lower(d), upper(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      Eigen::VectorXd b = vector_of(bounds[static_cast<std::size_t>(k)], "bound");
      format_require(b.size() == 2, "each bound must be [lower, upper]");
      lower(k) = b(0);
      upper(k) = b(1);
    }
    const json& res = field(j, "resolution");
    Eigen::VectorXi resolution(d);
    if (res.is_number_integer()) {
      resolution.setConstant(res.get<int>());
    } else {
      format_require(res.is_array() && static_cast<Eigen::Index>(res.size()) == d,
                     "'resolution' must have one entry per dimension");
      for (Eigen::Index k = 0; k < d; ++k) resolution(k) = res[static_cast<std::size_t>(k)].get<int>();
    }
    return FeatureDomain::continuous_box(lower, upper, resolution);
  }
  throw Error(ErrorKind::ScenarioFormat, "unknown domain kind '" + kind + "'");
}

DensityPtr parse_density(const json& j, const FeatureDomain& domain) {
  const std::string family = field(j, "family").get<std::string>();
  const json& params = field(j, "params");
  if (family == "TablePmf") {
    format_require(domain.is_grid(), "TablePmf requires a DiscreteGrid domain");
    Eigen::VectorXd table = vector_of(params, "TablePmf params");
    format_require(table.size() == domain.size(), "TablePmf params must align with 'points'");
    return std::make_shared<TablePmf>(domain, table);
  }
  if (family == "GaussianMixture") {
    format_require(params.is_array() && !params.empty(), "GaussianMixture params must be a nonempty array");
    std::vector<GaussianComponent> components;
    for (const auto& c : params) {
      GaussianComponent g;
      g.weight = c.contains("weight") ? number(c, "weight") : 1.0;
      g.mean = vector_of(field(c, "mean"), "mean");
      g.variance = vector_of(field(c, "covariance_diagonal"), "covariance_diagonal");
      components.push_back(std::move(g));
    }
    return std::make_shared<GaussianMixture>(domain, std::move(components));
  }
  throw Error(ErrorKind::ScenarioFormat, "unknown density family '" + family + "'");
}

ShiftSpec parse_shift(const json& j, const FeatureDomain& domain) {
  const std::string kind_name = field(j, "kind").get<std::string>();
  ShiftKind kind;
  try {
    kind = shift_kind_from_string(kind_name);
  } catch (const Error&) {
    throw Error(ErrorKind::ScenarioFormat, "unknown shift kind '" + kind_name + "'");
  }
  auto map_of = [&](const char* key) { return MonotoneMap::parse(field(j, key).get<std::string>()); };
  switch (kind) {
    case ShiftKind::CovariateShift:
      return ShiftSpec::covariate_shift(parse_density(field(j, "new_marginal"), domain));
    case ShiftKind::PosteriorDrift:
      return ShiftSpec::posterior_drift(map_of("phi"));
    case ShiftKind::CSPD:
      return ShiftSpec::cspd(map_of("phi"), parse_density(field(j, "new_marginal"), domain));
    case ShiftKind::TargetShift:
      return ShiftSpec::target_shift(number(j, "new_prior"));
    case ShiftKind::LDLN:
      return ShiftSpec::ldln(number(j, "rho0"), number(j, "rho1"));
    case ShiftKind::SymmetricNoise:
      return ShiftSpec::symmetric_noise(number(j, "nu"));
    case ShiftKind::OneSidedPD:
      return ShiftSpec::one_sided_pd(map_of("psi"));
    case ShiftKind::Composition: {
      const json& parts = field(j, "parts");
      format_require(parts.is_array() && !parts.empty(), "'parts' must be a nonempty array");
      std::vector<ShiftSpec> specs;
      for (const auto& p : parts) specs.push_back(parse_shift(p, domain));
      return ShiftSpec::composition(std::move(specs));
    }
  }
  throw Error(ErrorKind::ScenarioFormat, "unhandled shift kind");
}

Scenario scenario_from_json(const json& j) {
  try {
    const FeatureDomain domain = parse_domain(field(j, "domain"));
    JointDistribution target(number(j, "prior"), parse_density(field(j, "density0"), domain),
                             parse_density(field(j, "density1"), domain));
    Scenario s{j.value("name", std::string("unnamed")), target, target, std::nullopt, MonotoneMap::identity(), j};
    if (j.contains("shift") && !j.at("shift").is_null()) {
      s.shift = parse_shift(j.at("shift"), domain);
      ShiftResult shifted = apply_shift(target, *s.shift);
      s.source = shifted.source;
      s.phi = shifted.phi;
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ScenarioFormat, e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::ScenarioFormat, "cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ScenarioFormat, path + ": " + e.what());
  }
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Built-in library. Tables are generated from a marginal and a posterior so
// the class-conditionals are exact up to one rounding each.

namespace {

json grid_from_marginal_posterior(const std::vector<double>& xs, const Eigen::VectorXd& marginal,
                                  const Eigen::VectorXd& eta) {
  const double prior = marginal.dot(eta);
  const Eigen::VectorXd q1 = marginal.cwiseProduct(eta) / prior;
  const Eigen::VectorXd q0 = marginal.cwiseProduct((1.0 - eta.array()).matrix()) / (1.0 - prior);
  json points = json::array();
  for (double x : xs) points.push_back(json::array({x}));
  return {{"domain", {{"kind", "DiscreteGrid"}, {"points", points}}},
          {"prior", prior},
          {"density0", {{"family", "TablePmf"}, {"params", vector_json(q0)}}},
          {"density1", {{"family", "TablePmf"}, {"params", vector_json(q1)}}}};
}

json s1() {
  Eigen::VectorXd marginal(5), eta(5);
  marginal << 0.3, 0.2, 0.25, 0.15, 0.1;
  eta << 0.1, 0.2, 0.3, 0.5, 0.8;
  json j = grid_from_marginal_posterior({0, 1, 2, 3, 4}, marginal, eta);
  j["prior"] = 0.3;
  return j;
}

json gaussian(double mean, double variance) {
  return {{"family", "GaussianMixture"},
          {"params", json::array({{{"weight", 1.0}, {"mean", {mean}}, {"covariance_diagonal", {variance}}}})}};
}

json s2() {
  return {{"domain", {{"kind", "ContinuousBox"}, {"bounds", json::array({json::array({-4.0, 4.0})})},
                      {"resolution", json::array({1600})}}},
          {"prior", 0.5},
          {"density0", gaussian(-1.0, 1.0)},
          {"density1", gaussian(1.0, 1.0)}};
}

json s7() {
  constexpr int kPoints = 400;
  std::vector<double> xs(kPoints);
  Eigen::VectorXd marginal(kPoints), eta(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    xs[static_cast<std::size_t>(i)] = (i + 0.5) / kPoints;
    eta(i) = xs[static_cast<std::size_t>(i)];
    marginal(i) = std::abs(eta(i) - 0.5);
  }
  marginal /= marginal.sum();
  return grid_from_marginal_posterior(xs, marginal, eta);
}

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"S1", "S2", "S3", "S4", "S5", "S6", "S7"}; }

json builtin_scenario_json(const std::string& name) {
  json j;
  if (name == "S1") {
    j = s1();
  } else if (name == "S2") {
    j = s2();
  } else if (name == "S3") {
    j = s2();
    j["shift"] = {{"kind", "CSPD"}, {"phi", "lr_scale(3)"}, {"new_marginal", gaussian(0.5, 2.25)}};
  } else if (name == "S4") {
    j = s1();
    j["shift"] = {{"kind", "TargetShift"}, {"new_prior", 0.6}};
  } else if (name == "S5") {
    j = s1();
    j["shift"] = {{"kind", "LDLN"}, {"rho0", 0.1}, {"rho1", 0.2}};
  } else if (name == "S6") {
    j = s1();
    j["shift"] = {{"kind", "OneSidedPD"}, {"psi", "affine(0.5,0)"}};
  } else if (name == "S7") {
    j = s7();
  } else {
    throw Error(ErrorKind::ScenarioFormat, "unknown built-in scenario '" + name + "'");
  }
  j["name"] = name;
  return j;
}

Scenario builtin_scenario(const std::string& name) { return scenario_from_json(builtin_scenario_json(name)); }

Scenario resolve_scenario(const std::string& reference) {
  std::string name = reference;
  if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
  for (const auto& b : builtin_scenario_names())
    if (b == name) return builtin_scenario(name);
  return load_scenario_file(reference);
}

}  // namespace cdr
