#include "cdr/experiment.hpp"

#include "cdr/error.hpp"
#include "cdr/random.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace cdr {

using nlohmann::json;

void ExperimentPlan::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, "plan: " + what); };
  if (scenario.empty()) fail("scenario is empty");
  if (methods.empty()) fail("methods is empty");
  if (ladder.empty()) fail("ladder is empty");
  if (alphas.empty()) fail("alphas is empty");
  if (betas.empty() || gammas.empty()) fail("betas/gammas empty");
  if (replicates < 1) fail("replicates must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  for (const auto& s : ladder)
    if (s.m < 1 || s.n < 1) fail("ladder sizes must be positive");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) fail("alpha outside (0,1)");
}

namespace {

std::vector<double> number_list(const json& j) {
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

}  // namespace

KlrConfig klr_config_from_json(const json& j) {
  KlrConfig config;
  try {
    if (j.contains("kernel")) {
      const json& k = j.at("kernel");
      const std::string kind = k.value("kind", std::string("gaussian"));
      require(kind == "gaussian" || kind == "Gaussian", ErrorKind::ScenarioFormat, "unknown kernel '" + kind + "'");
      if (k.contains("bandwidth")) {
        const json& h = k.at("bandwidth");
        if (h.is_string()) {
          require(h.get<std::string>() == "median", ErrorKind::ScenarioFormat, "bandwidth must be a number or \"median\"");
        } else {
          config.bandwidth = h.get<double>();
          require(*config.bandwidth > 0.0, ErrorKind::ScenarioFormat, "bandwidth must be positive");
        }
      }
    }
    if (j.contains("lambda")) {
      const json& l = j.at("lambda");
      if (l.is_string()) {
        require(l.get<std::string>() == "auto", ErrorKind::ScenarioFormat, "lambda must be a number or \"auto\"");
      } else {
        config.lambda = l.get<double>();
        require(*config.lambda > 0.0, ErrorKind::ScenarioFormat, "lambda must be positive");
      }
    }
    config.tol = j.value("tol", config.tol);
    config.max_iter = j.value("max_iter", config.max_iter);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ScenarioFormat, std::string("estimator config: ") + e.what());
  }
  return config;
}

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan plan;
  try {
    plan.scenario = j.at("scenario").get<std::string>();
    for (const auto& m : j.at("methods")) plan.methods.push_back(estimator_method_from_string(m.get<std::string>()));
    for (const auto& rung : j.at("ladder")) {
      if (rung.is_array()) {
        plan.ladder.push_back({rung.at(0).get<std::int64_t>(), rung.at(1).get<std::int64_t>()});
      } else if (rung.is_object()) {
        plan.ladder.push_back({rung.at("m").get<std::int64_t>(), rung.at("n").get<std::int64_t>()});
      } else {
        const auto k = rung.get<std::int64_t>();
        plan.ladder.push_back({k, k});
      }
    }
    plan.alphas = number_list(j.at("alphas"));
    plan.replicates = j.at("replicates").get<int>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.out = j.value("out", std::string());
    if (j.contains("betas")) plan.betas = number_list(j.at("betas"));
    if (j.contains("beta")) plan.betas = number_list(j.at("beta"));
    if (j.contains("gammas")) plan.gammas = number_list(j.at("gammas"));
    if (j.contains("gamma")) plan.gammas = number_list(j.at("gamma"));
    plan.deviation_constant = j.value("deviation_constant", kDeviationConstant);
    plan.workers = j.value("workers", 1);
    if (j.contains("klr")) plan.klr = klr_config_from_json(j.at("klr"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ScenarioFormat, std::string("plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::ScenarioFormat, "cannot open plan file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ScenarioFormat, path + ": " + e.what());
  }
  return plan_from_json(j);
}

std::uint64_t master_seed(std::uint64_t fallback) {
  const char* env = std::getenv("CDR_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  require(end != nullptr && *end == '\0', ErrorKind::InvalidArgument, "CDR_SEED must be a decimal integer");
  return static_cast<std::uint64_t>(v);
}

std::string record_csv_header() { return eval_csv_header() + ",cell,replicate,status,message,threshold,wall_time_s"; }

namespace {

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

std::string to_csv_row(const ExperimentRecord& r) {
  return to_csv_row(r.context, r.report) + ',' + std::to_string(r.cell) + ',' + std::to_string(r.replicate) + ',' +
         r.status + ',' + csv_escape(r.message) + ',' + format_number(r.threshold) + ',' +
         format_number(r.wall_time_seconds);
}

std::uint64_t replicate_seed(std::uint64_t master, std::int64_t cell, int replicate) {
  return derive_seed(master, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(replicate));
}

ReplicateResult run_replicate(const Scenario& scenario, const EstimatorConfig& config, SampleSize size,
                              double alpha, std::uint64_t seed) {
  const auto labeled = scenario.source.sample_labeled(size.m, derive_seed(seed, 1));
  const auto unlabeled = scenario.target.sample_unlabeled(size.n, derive_seed(seed, 2));
  ReplicateResult result{estimate_cdr_set(labeled, unlabeled, alpha, config, scenario.target.domain()), {}};
  result.report = evaluate_estimate(scenario.source, scenario.target, alpha, result.estimate);
  return result;
}

std::vector<ExperimentRecord> run_plan(const ExperimentPlan& plan, std::ostream* csv) {
  plan.validate();
  const Scenario scenario = resolve_scenario(plan.scenario);
  const std::uint64_t seed = master_seed(plan.seed);

  struct Cell {
    EstimatorConfig config;
    SampleSize size;
    double alpha;
  };
  std::vector<Cell> cells;
  for (auto method : plan.methods)
    for (const auto& size : plan.ladder)
      for (double alpha : plan.alphas)
        for (double beta : plan.betas)
          for (double gamma : plan.gammas) {
            EstimatorConfig config;
            config.method = method;
            config.beta = beta;
            config.gamma = gamma;
            config.deviation_constant = plan.deviation_constant;
            config.klr = plan.klr;
            cells.push_back({config, size, alpha});
          }

  const std::size_t total = cells.size() * static_cast<std::size_t>(plan.replicates);
  std::vector<ExperimentRecord> records(total);
  std::vector<char> done(total, 0);
  std::size_t next_to_write = 0;
  std::mutex mutex;
  std::atomic<std::size_t> next_item{0};

  if (csv) *csv << record_csv_header() << '\n' << std::flush;

  auto work = [&] {
    for (;;) {
      const std::size_t item = next_item.fetch_add(1);
      if (item >= total) return;
      const std::size_t cell_index = item / static_cast<std::size_t>(plan.replicates);
      const int rep = static_cast<int>(item % static_cast<std::size_t>(plan.replicates));
      const Cell& cell = cells[cell_index];

      ExperimentRecord rec;
      rec.cell = static_cast<std::int64_t>(cell_index);
      rec.replicate = rep;
      rec.context = {scenario.name,
                     std::string(to_string(cell.config.method)),
                     cell.size.m,
                     cell.size.n,
                     cell.alpha,
                     cell.config.beta,
                     cell.config.gamma,
                     replicate_seed(seed, rec.cell, rep)};
      const auto start = std::chrono::steady_clock::now();
      try {
        ReplicateResult r = run_replicate(scenario, cell.config, cell.size, cell.alpha, rec.context.seed);
        rec.report = r.report;
        rec.threshold = r.estimate.threshold;
        rec.status = "ok";
      } catch (const Error& e) {
        rec.status = std::string(to_string(e.kind()));
        rec.message = e.what();
      } catch (const std::exception& e) {
        rec.status = "Exception";
        rec.message = e.what();
      }
      if (rec.status != "ok") {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        rec.report.sym_diff_risk = rec.report.power_gap = rec.report.discovery_rate = nan;
        rec.report.size = rec.report.constraint_violation = nan;
        rec.threshold = nan;
      }
      rec.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      std::lock_guard lock(mutex);
      records[item] = std::move(rec);
      done[item] = 1;
      while (next_to_write < total && done[next_to_write]) {
        if (csv) *csv << to_csv_row(records[next_to_write]) << '\n' << std::flush;
        ++next_to_write;
      }
    }
  };

  const int workers = std::min<int>(plan.workers, static_cast<int>(std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

}  // namespace cdr
