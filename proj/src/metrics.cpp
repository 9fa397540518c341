#include "cdr/metrics.hpp"

#include "cdr/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

namespace cdr {

std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::ExactGrid: return "ExactGrid";
    case EvalMode::Quadrature: return "Quadrature";
    case EvalMode::MonteCarlo: return "MonteCarlo";
  }
  return "Unknown";
}

double sym_diff(const JointDistribution& target, const Eigen::VectorXd& set_a, const Eigen::VectorXd& set_b) {
  require(set_a.size() == target.domain().size() && set_b.size() == target.domain().size(),
          ErrorKind::InvalidArgument, "membership vectors must cover every node");
  const Eigen::VectorXd mass = target.marginal_mass();
  double total = 0.0;
  for (Eigen::Index i = 0; i < mass.size(); ++i)
    if ((set_a[i] > 0.5) != (set_b[i] > 0.5)) total += mass[i];
  return std::min(total, 1.0);
}

SymDiffBoundCheck sym_diff_bound_check(const JointDistribution& target, double epsilon, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& g_prime) {
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorKind::InvalidArgument, "epsilon must lie in [0,1]");
  const double pi = target.prior();
  const double mix_g = epsilon * power(target, g) + (1.0 - epsilon) * size(target, g);
  const double mix_h = epsilon * power(target, g_prime) + (1.0 - epsilon) * size(target, g_prime);
  SymDiffBoundCheck check;
  check.lhs = std::abs(mix_g - mix_h);
  check.rhs = (epsilon / pi + (1.0 - epsilon) / (1.0 - pi)) * sym_diff(target, g, g_prime);
  // floating-point slack only; the inequality itself is exact
  check.holds = check.lhs <= check.rhs * (1.0 + 1e-12) + 1e-15;
  return check;
}

EvalReport evaluate_membership(const JointDistribution& source, const JointDistribution& target, double alpha,
                               const Eigen::VectorXd& estimate_membership) {
  const LevelSet oracle = optimal_cdr_set(source, target, alpha);
  EvalReport report;
  report.mode = target.domain().is_grid() ? EvalMode::ExactGrid : EvalMode::Quadrature;
  report.sym_diff_risk = sym_diff(target, estimate_membership, oracle.membership);
  report.power_gap = power(target, oracle.membership) - power(target, estimate_membership);
  report.discovery_rate = std::clamp(discovery_rate(target, estimate_membership), 0.0, 1.0);
  report.size = std::clamp(size(target, estimate_membership), 0.0, 1.0);
  report.constraint_violation = std::max(0.0, report.discovery_rate - alpha);
  return report;
}

EvalReport evaluate_estimate(const JointDistribution& source, const JointDistribution& target, double alpha,
                             const SetEstimate& estimate) {
  return evaluate_membership(source, target, alpha, estimate.membership(target.domain()));
}

EvalReport evaluate_estimate_monte_carlo(const JointDistribution& source, const JointDistribution& target,
                                         double alpha, const SetEstimate& estimate, std::uint64_t seed,
                                         std::int64_t samples) {
  const LevelSet oracle = optimal_cdr_set(source, target, alpha);
  const auto draws = target.sample_labeled(samples, seed);
  Eigen::MatrixXd points(target.domain().dimension(), samples);
  for (std::int64_t i = 0; i < samples; ++i) points.col(i) = draws[static_cast<std::size_t>(i)].features;
  const Eigen::VectorXd est_scores = estimate.score->evaluate(points);
  const Eigen::VectorXd oracle_scores = oracle.score->evaluate(points);

  double disagree = 0.0, accepted = 0.0, ones = 0.0, zeros = 0.0, tp_est = 0.0, tp_oracle = 0.0, fp_est = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const bool in_est = est_scores[i] >= estimate.threshold;
    const bool in_oracle = oracle_scores[i] >= oracle.threshold;
    const int y = draws[static_cast<std::size_t>(i)].label;
    disagree += in_est != in_oracle;
    accepted += in_est;
    if (y == 1) {
      ones += 1.0;
      tp_est += in_est;
      tp_oracle += in_oracle;
    } else {
      zeros += 1.0;
      fp_est += in_est;
    }
  }
  const double n = static_cast<double>(samples);
  EvalReport report;
  report.mode = EvalMode::MonteCarlo;
  report.monte_carlo_samples = samples;
  report.sym_diff_risk = disagree / n;
  report.sym_diff_standard_error = std::sqrt(report.sym_diff_risk * (1.0 - report.sym_diff_risk) / n);
  report.power_gap = ones > 0.0 ? (tp_oracle - tp_est) / ones : 0.0;
  report.discovery_rate = accepted / n;
  report.size = zeros > 0.0 ? fp_est / zeros : 0.0;
  report.constraint_violation = std::max(0.0, report.discovery_rate - alpha);
  return report;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, end) : std::string();
}

std::string eval_csv_header() {
  return "scenario,method,m,n,alpha,beta,gamma,seed,sym_diff_risk,power_gap,discovery_rate,size,"
         "constraint_violation,mode";
}

std::string to_csv_row(const EvalContext& c, const EvalReport& r) {
  std::string row;
  row += c.scenario + ',' + c.method + ',' + std::to_string(c.m) + ',' + std::to_string(c.n) + ',';
  row += format_number(c.alpha) + ',' + format_number(c.beta) + ',' + format_number(c.gamma) + ',';
  row += std::to_string(c.seed) + ',';
  row += format_number(r.sym_diff_risk) + ',' + format_number(r.power_gap) + ',' + format_number(r.discovery_rate) +
         ',' + format_number(r.size) + ',' + format_number(r.constraint_violation) + ',';
  row += to_string(r.mode);
  return row;
}

}  // namespace cdr

