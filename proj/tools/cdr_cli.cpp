#include "cdr/error.hpp"
#include "cdr/experiment.hpp"
#include "cdr/gnp.hpp"
#include "cdr/scenario.hpp"
#include "cdr/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace cdr;
using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json set_summary(const JointDistribution& target, const Eigen::VectorXd& membership) {
  json j = {{"discovery_rate", discovery_rate(target, membership)},
            {"power", power(target, membership)},
            {"size", size(target, membership)}};
  if (target.domain().is_grid()) j["membership"] = vector_json(membership);
  return j;
}

struct FitOptions {
  std::string scenario;
  std::string method = "histogram";
  double alpha = 0.25;
  std::int64_t m = 1000;
  std::int64_t n = 1000;
  std::uint64_t seed = 1;
  double beta = kDefaultBeta;
  double gamma = kDefaultGamma;
  double deviation_constant = kDeviationConstant;
  std::string config;
};

void add_fit_options(CLI::App* app, FitOptions& o) {
  app->add_option("--scenario", o.scenario, "built-in name (S1..S7) or scenario JSON path")->required();
  app->add_option("--method", o.method, "histogram | klr")->check(CLI::IsMember({"histogram", "klr"}));
  app->add_option("--alpha", o.alpha, "discovery-rate level");
  app->add_option("--m", o.m, "labeled sample size (source)");
  app->add_option("--n", o.n, "unlabeled sample size (target)");
  app->add_option("--seed", o.seed, "master seed (CDR_SEED overrides)");
  app->add_option("--beta", o.beta, "threshold offset beta (klr)");
  app->add_option("--gamma", o.gamma, "mass slack gamma (klr)");
  app->add_option("--deviation-constant", o.deviation_constant,
                  "constant c in eps_n = c sqrt(log(n+1)/n); values other than 4 are non-standard");
  app->add_option("--config", o.config, "estimator config JSON (kernel, lambda, tol, max_iter)");
}

EstimatorConfig make_config(const FitOptions& o) {
  EstimatorConfig config;
  config.method = estimator_method_from_string(o.method);
  config.beta = o.beta;
  config.gamma = o.gamma;
  config.deviation_constant = o.deviation_constant;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    require(static_cast<bool>(in), ErrorKind::ScenarioFormat, "cannot open config '" + o.config + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ScenarioFormat, o.config + ": " + e.what());
    }
    config.klr = klr_config_from_json(j);
  }
  return config;
}

int run_oracle(const std::string& ref, double alpha, double theta0, double theta1) {
  const Scenario s = resolve_scenario(ref);
  json out = {{"scenario", s.name}, {"alpha", alpha}, {"prior_q", s.target.prior()}, {"prior_p", s.source.prior()},
              {"phi", s.phi.name()}};
  if (s.target.domain().is_grid()) out["eta_q"] = vector_json(s.target.posterior_table());
  if (s.target.domain().is_grid() && s.shift) out["eta_p"] = vector_json(s.source.posterior_table());

  auto level_set = [&](const JointDistribution& source) -> json {
    try {
      const LevelSet g = optimal_cdr_set(source, s.target, alpha);
      json j = set_summary(s.target, g.membership);
      j["threshold"] = g.threshold;
      return j;
    } catch (const Error& e) {
      return {{"error", e.what()}};
    }
  };
  out["G_Q"] = level_set(s.target);
  if (s.shift) out["G_PQ"] = level_set(s.source);

  const GnpProblem problem = theta1 > 0.0 ? GnpProblem(theta0, theta1, alpha) : GnpProblem::cdr(s.target.prior(), alpha);
  const ThresholdClassifier g = solve_gnp_threshold(s.target, problem);
  const Eigen::VectorXd table = g.on_nodes(s.target.domain());
  json gnp = set_summary(s.target, table);
  gnp["theta0"] = problem.theta0;
  gnp["theta1"] = problem.theta1;
  gnp["threshold"] = g.threshold;
  gnp["tie_probability"] = g.tie_probability;
  gnp["objective"] = gnp_objective(s.target, problem, table);
  if (s.target.domain().is_grid() && s.target.domain().size() <= kBruteForceMaxPoints)
    gnp["brute_force_objective"] = brute_force_gnp(s.target, problem).objective;
  out["gnp"] = gnp;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_fit(const FitOptions& o) {
  const Scenario s = resolve_scenario(o.scenario);
  const EstimatorConfig config = make_config(o);
  const std::uint64_t seed = replicate_seed(master_seed(o.seed), 0, 0);
  const auto labeled = s.source.sample_labeled(o.m, derive_seed(seed, 1));
  const auto unlabeled = s.target.sample_unlabeled(o.n, derive_seed(seed, 2));
  const SetEstimate est = estimate_cdr_set(labeled, unlabeled, o.alpha, config, s.target.domain());

  json out = {{"scenario", s.name}, {"method", o.method}, {"alpha", o.alpha}, {"m", o.m}, {"n", o.n},
              {"seed", seed},      {"beta", o.beta},     {"gamma", o.gamma}, {"threshold", est.threshold}};
  if (config.method == EstimatorMethod::KlrThreshold) {
    out["epsilon_n"] = est.epsilon_n;
    out["budget_exhausted"] = est.budget_exhausted;
    out["deviation_constant"] = config.deviation_constant;
    if (config.nonstandard_deviation_constant()) out["warning"] = "non-standard deviation constant";
    const auto& d = est.model->diagnostics();
    out["klr"] = {{"bandwidth", est.model->kernel().bandwidth}, {"lambda", est.model->lambda()},
                  {"iterations", d.iterations},             {"converged", d.converged},
                  {"hit_max_iter", d.hit_max_iter},         {"stalled", d.stalled},
                  {"objective", d.objective},               {"gradient_norm", d.gradient_norm}};
  }
  std::int64_t accepted = 0;
  for (const auto& u : unlabeled) accepted += est.contains(u.features);
  out["empirical_discovery_rate"] = static_cast<double>(accepted) / static_cast<double>(unlabeled.size());

  const Eigen::VectorXd membership = est.membership(s.target.domain());
  out["estimate"] = set_summary(s.target, membership);
  try {
    const EvalReport r = evaluate_membership(s.source, s.target, o.alpha, membership);
    out["sym_diff_risk"] = r.sym_diff_risk;
    out["power_gap"] = r.power_gap;
    out["constraint_violation"] = r.constraint_violation;
    out["mode"] = std::string(to_string(r.mode));
  } catch (const Error& e) {
    out["evaluation_error"] = e.what();
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_evaluate(const FitOptions& o, int replicates, const std::string& out_path) {
  require(replicates >= 1, ErrorKind::InvalidArgument, "--replicates must be >= 1");
  const Scenario s = resolve_scenario(o.scenario);
  const EstimatorConfig config = make_config(o);
  const std::uint64_t master = master_seed(o.seed);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    require(static_cast<bool>(file), ErrorKind::InvalidArgument, "cannot write '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << eval_csv_header() << '\n';
  for (int r = 0; r < replicates; ++r) {
    const std::uint64_t seed = replicate_seed(master, 0, r);
    const ReplicateResult result = run_replicate(s, config, {o.m, o.n}, o.alpha, seed);
    const EvalContext ctx{s.name, o.method, o.m, o.n, o.alpha, o.beta, o.gamma, seed};
    out << to_csv_row(ctx, result.report) << '\n' << std::flush;
  }
  return 0;
}

int run_sweep(const std::string& plan_path, int workers, const std::string& out_override) {
  ExperimentPlan plan = load_plan_file(plan_path);
  if (workers > 0) plan.workers = workers;
  if (!out_override.empty()) plan.out = out_override;
  std::ofstream file;
  if (!plan.out.empty()) {
    file.open(plan.out);
    require(static_cast<bool>(file), ErrorKind::InvalidArgument, "cannot write '" + plan.out + "'");
  }
  const auto records = run_plan(plan, plan.out.empty() ? &std::cout : &file);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.status != "ok";
  std::cerr << records.size() << " rows, " << failed << " failed cells" << (plan.out.empty() ? "" : ", wrote " + plan.out)
            << '\n';
  return 0;
}

int run_verify(const VerifyOptions& options, const std::string& out_path) {
  const VerifyReport report = run_verify_suite(options);
  if (out_path.empty()) {
    write_verify_csv(std::cout, report);
  } else {
    std::ofstream file(out_path);
    write_verify_csv(file, report);
  }
  for (const auto& c : report.checks)
    if (c.status != "pass") std::cerr << c.status << ": " << c.fixture << " " << c.property << " " << c.detail << '\n';
  std::cerr << (report.ok() ? "all checks passed" : "verification FAILED") << " in " << report.seconds << " s\n";
  return report.ok() ? 0 : 1;
}

int run_export(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& name : builtin_scenario_names()) {
    std::ofstream file(std::filesystem::path(dir) / (name + ".json"));
    file << builtin_scenario_json(name).dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled-discovery-rate classification under distribution shift"};
  app.require_subcommand(1);

  std::string oracle_scenario;
  double oracle_alpha = 0.25, theta0 = 0.0, theta1 = 0.0;
  auto* oracle = app.add_subcommand("oracle", "print optimal sets and thresholds for a scenario");
  oracle->add_option("--scenario", oracle_scenario, "built-in name or scenario JSON path")->required();
  oracle->add_option("--alpha", oracle_alpha, "level");
  oracle->add_option("--theta0", theta0, "GNP theta0 (default: CDR, theta0 = prior)");
  oracle->add_option("--theta1", theta1, "GNP theta1 (default: CDR, theta1 = 1)");

  FitOptions fit_options;
  auto* fit = app.add_subcommand("fit", "estimate the CDR set from one draw and report diagnostics");
  add_fit_options(fit, fit_options);

  FitOptions eval_options;
  int replicates = 1;
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "replicated fits scored against the exact oracle (CSV)");
  add_fit_options(evaluate, eval_options);
  evaluate->add_option("--replicates", replicates, "number of replicates");
  evaluate->add_option("--out", eval_out, "CSV output path (default stdout)");

  std::string plan_path, sweep_out;
  int workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run an experiment plan");
  sweep->add_option("--plan", plan_path, "plan JSON")->required();
  sweep->add_option("--workers", workers, "worker threads (overrides the plan)");
  sweep->add_option("--out", sweep_out, "CSV output path (overrides the plan)");

  VerifyOptions verify_options;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "run the consolidated verification suite");
  verify->add_option("--out", verify_out, "CSV output path (default stdout)");
  verify->add_option("--seed", verify_options.seed, "suite seed");
  verify->add_option("--fixtures", verify_options.random_fixtures, "random grid fixtures");
  verify->add_flag("--inject-corrupted-phi", verify_options.inject_corrupted_phi,
                   "add a fixture with a non-monotone phi (expected to fail)");

  std::string export_dir = "scenarios";
  auto* exporter = app.add_subcommand("export-scenarios", "write the built-in scenario library as JSON files");
  exporter->add_option("--dir", export_dir, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*oracle) return run_oracle(oracle_scenario, oracle_alpha, theta0, theta1);
    if (*fit) return run_fit(fit_options);
    if (*evaluate) return run_evaluate(eval_options, replicates, eval_out);
    if (*sweep) return run_sweep(plan_path, workers, sweep_out);
    if (*verify) return run_verify(verify_options, verify_out);
    if (*exporter) return run_export(export_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
