#pragma once

#include "cdr/estimators.hpp"
#include "cdr/metrics.hpp"
#include "cdr/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdr {

struct SampleSize {
  std::int64_t m = 0;  // labeled draws from P
  std::int64_t n = 0;  // unlabeled draws from Q_X
};

struct ExperimentPlan {
  std::string scenario;
  std::vector<EstimatorMethod> methods;
  std::vector<SampleSize> ladder;
  std::vector<double> alphas;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::string out;

  // Optional knobs (JSON keys of the same name).
  std::vector<double> betas{kDefaultBeta};
  std::vector<double> gammas{kDefaultGamma};
  double deviation_constant = kDeviationConstant;
  KlrConfig klr;
  int workers = 1;

  void validate() const;
};

// {"kernel": {"kind": "gaussian", "bandwidth": h | "median"},
//  "lambda": x | "auto", "tol": 1e-8, "max_iter": 100}; all keys optional.
KlrConfig klr_config_from_json(const nlohmann::json& j);

ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan_file(const std::string& path);
// Master seed from CDR_SEED when set, otherwise `fallback`.
std::uint64_t master_seed(std::uint64_t fallback);

struct ExperimentRecord {
  EvalContext context;
  EvalReport report;
  std::int64_t cell = 0;
  int replicate = 0;
  std::string status;  // "ok" or the error kind
  std::string message;
  double threshold = 0.0;
  double wall_time_seconds = 0.0;
};

// EvalReport columns, then cell, replicate, status, message, threshold and
// wall_time_s (always last).
std::string record_csv_header();
std::string to_csv_row(const ExperimentRecord& record);

// One estimate and its evaluation: m labeled draws from the scenario's
// source, n unlabeled draws from its target marginal.
struct ReplicateResult {
  SetEstimate estimate;
  EvalReport report;
};
ReplicateResult run_replicate(const Scenario& scenario, const EstimatorConfig& config, SampleSize size,
                              double alpha, std::uint64_t seed);

std::uint64_t replicate_seed(std::uint64_t master, std::int64_t cell, int replicate);

// Every (method, size, alpha, beta, gamma) cell times every replicate.
// Records come back in plan order whatever the worker count; rows are
// streamed to `csv` (header first) as soon as all earlier rows are done.
std::vector<ExperimentRecord> run_plan(const ExperimentPlan& plan, std::ostream* csv = nullptr);

}  // namespace cdr
