#pragma once

#include "cdr/distribution.hpp"
#include "cdr/gnp.hpp"
#include "cdr/random.hpp"
#include "cdr/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdr {

// ---------------------------------------------------------------------------
// Measurements shared by the verify suite and the acceptance binary.

// |objective(threshold construction) - objective(brute force)|.
double threshold_vs_brute_force_gap(const JointDistribution& dist, const GnpProblem& problem);

// Pairs of grid points ranked in opposite strict order by eta and by the
// ratio alt/null, where (null, alt) are the contaminated densities for
// (theta0, theta1); (0, 1) gives the pure ratio q1/q0.
int ranking_inversions(const JointDistribution& dist, double theta0, double theta1, double tolerance = 1e-9);

struct ImmunityCheck {
  std::int64_t points = 0;
  std::int64_t disagreements = 0;  // outside the tolerance band
  double threshold_p = 0.0;
  double threshold_q = 0.0;
  bool agree() const { return disagreements == 0; }
};
// Compares G_{P,Q,alpha} with G_{Q,alpha}: every node on a DiscreteGrid; on a
// ContinuousBox a uniform probe grid of about `probe_points` points, where
// points whose Q-posterior lies within `level_tolerance` of the Q threshold
// are not counted.
ImmunityCheck immunity_check(const Scenario& scenario, double alpha, std::int64_t probe_points = 10'000,
                             double level_tolerance = 1e-6);

// sup_t | mass(score >= t) - fraction(sample score >= t) |, with the mass
// given per quadrature node.
double sup_threshold_deviation(const Eigen::VectorXd& node_scores, const Eigen::VectorXd& node_masses,
                               std::vector<double> sample_scores);

struct NoiseCheck {
  double pointwise_error = 0.0;  // max |eta_P - identity| over the grid
  double max_z = 0.0;            // max per-point |phat - eta_P| / sigma
};
// Label-noise identities of a shifted grid scenario, pointwise and from n
// noisy draws.
NoiseCheck noise_identity_check(const JointDistribution& target, const ShiftSpec& noise, std::int64_t n,
                                std::uint64_t seed);

struct KlrNumericsCheck {
  double max_gradient_error = 0.0;  // relative, over random states
  bool strictly_decreasing = true;  // every accepted Newton step
  bool converged = false;
  int convexity_violations = 0;
};
KlrNumericsCheck klr_numerics_check(std::uint64_t seed, int states = 50, int triples = 100, int m = 60);

// ---------------------------------------------------------------------------

struct CheckResult {
  std::string fixture;
  std::string property;
  std::string status;  // pass, fail, warn
  double max_error = 0.0;
  std::string detail;
  bool failed() const { return status == "fail"; }
};

struct VerifyOptions {
  std::uint64_t seed = 20241019;
  int random_fixtures = 200;
  // Adds a posterior-drift fixture with phi(u) = 4u(1-u); its construction
  // must then surface NonMonotoneMap as a failing check.
  bool inject_corrupted_phi = false;
  double runtime_budget_seconds = 600.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool ok() const;
};

VerifyReport run_verify_suite(const VerifyOptions& options = {});

// fixture,property,status,max_error
void write_verify_csv(std::ostream& out, const VerifyReport& report);

}  // namespace cdr
