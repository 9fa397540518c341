#pragma once

#include "cdr/distribution.hpp"
#include "cdr/estimators.hpp"
#include "cdr/gnp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace cdr {

// Q_X-mass of the symmetric difference of two node-membership vectors.
double sym_diff(const JointDistribution& target, const Eigen::VectorXd& set_a, const Eigen::VectorXd& set_b);

struct SymDiffBoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// |eps B(g) + (1-eps) A(g) - [eps B(g') + (1-eps) A(g')]|
//   <= (eps/pi + (1-eps)/(1-pi)) Q_X(G delta G')
// for deterministic g, g' given as node memberships.
SymDiffBoundCheck sym_diff_bound_check(const JointDistribution& target, double epsilon, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& g_prime);

enum class EvalMode { ExactGrid, Quadrature, MonteCarlo };

std::string_view to_string(EvalMode mode);

struct EvalReport {
  double sym_diff_risk = 0.0;
  double power_gap = 0.0;
  double discovery_rate = 0.0;
  double size = 0.0;
  double constraint_violation = 0.0;
  EvalMode mode = EvalMode::ExactGrid;
  std::int64_t monte_carlo_samples = 0;
  double sym_diff_standard_error = 0.0;  // MonteCarlo only
};

EvalReport evaluate_membership(const JointDistribution& source, const JointDistribution& target, double alpha,
                               const Eigen::VectorXd& estimate_membership);

// Scores the estimate against G_{P,Q,alpha} by exact summation (grid) or
// quadrature (box). Propagates AssumptionAViolated.
EvalReport evaluate_estimate(const JointDistribution& source, const JointDistribution& target, double alpha,
                             const SetEstimate& estimate);

inline constexpr std::int64_t kMonteCarloEvalSamples = 100'000;

// Same report from a fresh labeled sample of Q; the oracle set is still the
// exact one.
EvalReport evaluate_estimate_monte_carlo(const JointDistribution& source, const JointDistribution& target,
                                         double alpha, const SetEstimate& estimate, std::uint64_t seed,
                                         std::int64_t samples = kMonteCarloEvalSamples);

// Coordinates that identify a report in a CSV row.
struct EvalContext {
  std::string scenario;
  std::string method;
  std::int64_t m = 0;
  std::int64_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

// scenario,method,m,n,alpha,beta,gamma,seed,sym_diff_risk,power_gap,
// discovery_rate,size,constraint_violation,mode
std::string eval_csv_header();
std::string to_csv_row(const EvalContext& context, const EvalReport& report);
// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double value);

}  // namespace cdr
