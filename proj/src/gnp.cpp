#include "cdr/gnp.hpp"

#include "cdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace cdr {

GnpProblem::GnpProblem(double theta0_, double theta1_, double alpha_)
    : theta0(theta0_), theta1(theta1_), alpha(alpha_) {
  require(theta0 >= 0.0 && theta0 < theta1 && theta1 <= 1.0, ErrorKind::InvalidArgument,
          "GNP parameters need 0 <= theta0 < theta1 <= 1");
  require(alpha > 0.0 && alpha < 1.0 + 1e-15, ErrorKind::InvalidArgument, "GNP level alpha must lie in (0,1]");
}

double ThresholdClassifier::acceptance(double s) const {
  if (s > threshold + kTieTolerance) return 1.0;
  if (s >= threshold - kTieTolerance) return tie_probability;
  return 0.0;
}

Eigen::VectorXd ThresholdClassifier::on_nodes(const FeatureDomain& domain) const {
  Eigen::VectorXd scores = score->on_nodes(domain);
  for (Eigen::Index i = 0; i < scores.size(); ++i) scores[i] = acceptance(scores[i]);
  return scores;
}

double power(const JointDistribution& dist, const Eigen::VectorXd& g) { return dist.mass1().dot(g); }
double size(const JointDistribution& dist, const Eigen::VectorXd& g) { return dist.mass0().dot(g); }
double discovery_rate(const JointDistribution& dist, const Eigen::VectorXd& g) {
  return dist.marginal_mass().dot(g);
}
double power(const JointDistribution& dist, const ThresholdClassifier& g) {
  return power(dist, g.on_nodes(dist.domain()));
}
double size(const JointDistribution& dist, const ThresholdClassifier& g) {
  return size(dist, g.on_nodes(dist.domain()));
}
double discovery_rate(const JointDistribution& dist, const ThresholdClassifier& g) {
  return discovery_rate(dist, g.on_nodes(dist.domain()));
}

double gnp_objective(const JointDistribution& dist, const GnpProblem& problem, const Eigen::VectorXd& g) {
  return problem.theta1 * power(dist, g) + (1.0 - problem.theta1) * size(dist, g);
}

double gnp_constraint(const JointDistribution& dist, const GnpProblem& problem, const Eigen::VectorXd& g) {
  return problem.theta0 * power(dist, g) + (1.0 - problem.theta0) * size(dist, g);
}

std::pair<double, double> contaminated_densities(const JointDistribution& dist, double theta0, double theta1,
                                                 const Feature& x) {
  const double q0 = (*dist.density0())(x);
  const double q1 = (*dist.density1())(x);
  return {theta0 * q1 + (1.0 - theta0) * q0, theta1 * q1 + (1.0 - theta1) * q0};
}

double lambda_gamma_map(double theta0, double theta1, double gamma) {
  require(gamma >= 0.0, ErrorKind::InvalidArgument, "gamma must be >= 0");
  if (std::isinf(gamma)) return theta0 > 0.0 ? theta1 / theta0 : std::numeric_limits<double>::infinity();
  return (1.0 - theta1 + gamma * theta1) / (1.0 - theta0 + gamma * theta0);
}

double inverse_lambda_gamma_map(double theta0, double theta1, double lambda) {
  const double lo = (1.0 - theta1) / (1.0 - theta0);
  const double hi = theta0 > 0.0 ? theta1 / theta0 : std::numeric_limits<double>::infinity();
  const double slack = 1e-14 * std::max(1.0, std::abs(lambda));
  if (!(lambda >= lo - slack) || (std::isfinite(hi) && lambda > hi + slack)) {
    throw Error(ErrorKind::OutOfRange, "lambda " + std::to_string(lambda) + " is outside [" + std::to_string(lo) +
                                           ", " + std::to_string(hi) + "]");
  }
  const double denominator = theta1 - lambda * theta0;
  if (denominator <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, (lambda * (1.0 - theta0) - (1.0 - theta1)) / denominator);
}

ThresholdClassifier solve_gnp_threshold(const JointDistribution& dist, const GnpProblem& problem) {
  const Eigen::VectorXd& eta = dist.posterior_table();
  const Eigen::VectorXd null_mass = problem.theta0 * dist.mass1() + (1.0 - problem.theta0) * dist.mass0();
  const Eigen::VectorXd support = dist.marginal_mass();

  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    if (support[i] > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return eta[a] > eta[b]; });

  ThresholdClassifier g{dist.posterior_score(), 0.0, 0.0};
  double above = 0.0;
  std::size_t begin = 0;
  while (begin < order.size()) {
    const double leader = eta[order[begin]];
    std::size_t end = begin;
    double atom = 0.0;
    while (end < order.size() && leader - eta[order[end]] <= kTieTolerance) atom += null_mass[order[end++]];
    g.threshold = eta[order[end - 1]];
    if (above + atom > problem.alpha) {
      const double q = (problem.alpha - above) / atom;
      g.tie_probability = std::clamp(q, 0.0, std::nextafter(1.0, 0.0));
      return g;
    }
    above += atom;
    begin = end;
  }
  // the constraint cannot bind: accept the whole support
  g.tie_probability = 1.0;
  return g;
}

RandomizedClassifierTable brute_force_gnp(const JointDistribution& dist, const GnpProblem& problem) {
  require(dist.domain().is_grid(), ErrorKind::UnsupportedDomain, "brute-force GNP needs a DiscreteGrid");
  if (dist.domain().size() > kBruteForceMaxPoints)
    throw Error(ErrorKind::GridTooLarge, "brute-force GNP is limited to 64 grid points");

  const Eigen::VectorXd& q0 = dist.density0_table();
  const Eigen::VectorXd& q1 = dist.density1_table();
  const Eigen::VectorXd null = problem.theta0 * q1 + (1.0 - problem.theta0) * q0;
  const Eigen::VectorXd alt = problem.theta1 * q1 + (1.0 - problem.theta1) * q0;

  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < q0.size(); ++i)
    if (null[i] + alt[i] > 0.0) order.push_back(i);
  // descending alt/null without dividing (null may vanish)
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return alt[a] * null[b] > alt[b] * null[a]; });

  RandomizedClassifierTable table{Eigen::VectorXd::Zero(q0.size()), 0.0};
  double budget = problem.alpha;
  for (Eigen::Index i : order) {
    if (null[i] <= budget) {
      table.acceptance[i] = 1.0;
      budget -= null[i];
    } else {
      table.acceptance[i] = std::max(0.0, budget) / null[i];
      break;
    }
  }
  table.objective = alt.dot(table.acceptance);
  return table;
}

LevelSet optimal_cdr_set(const JointDistribution& source, const JointDistribution& target, double alpha) {
  require(source.domain() == target.domain(), ErrorKind::InvalidArgument, "P and Q must share a domain");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  const Eigen::VectorXd& eta = source.posterior_table();
  const auto search = upper_level_set(eta, target.marginal_mass(), alpha, target.domain().kind());
  if (!search.found) throw Error(ErrorKind::AssumptionAViolated, search.reason);
  LevelSet set{source.posterior_score(), search.threshold, (eta.array() >= search.threshold).cast<double>()};
  return set;
}

LevelSet null_level_set(const JointDistribution& dist, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  const Eigen::VectorXd& eta = dist.posterior_table();
  const auto search = upper_level_set(eta, dist.mass0(), alpha, dist.domain().kind());
  if (!search.found) throw Error(ErrorKind::AssumptionAViolated, search.reason);
  return {dist.posterior_score(), search.threshold, (eta.array() >= search.threshold).cast<double>()};
}

bool is_threshold_form(const JointDistribution& dist, const GnpProblem& problem, const Eigen::VectorXd& g,
                       double tolerance) {
  const Eigen::VectorXd& q0 = dist.density0_table();
  const Eigen::VectorXd& q1 = dist.density1_table();
  const Eigen::VectorXd null = problem.theta0 * q1 + (1.0 - problem.theta0) * q0;
  const Eigen::VectorXd alt = problem.theta1 * q1 + (1.0 - problem.theta1) * q0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] >= 1.0 || null[i] + alt[i] <= 0.0) continue;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      if (g[j] <= 0.0) continue;
      const double lhs = alt[i] * null[j], rhs = alt[j] * null[i];
      if (lhs - rhs > tolerance * std::max(lhs, rhs)) return false;  // i outranks j yet j is preferred
    }
  }
  return true;
}

}  // namespace cdr

