#pragma once

#include "cdr/distribution.hpp"
#include "cdr/score.hpp"

#include <Eigen/Dense>

#include <utility>

namespace cdr {

// max theta1 B + (1 - theta1) A  s.t.  theta0 B + (1 - theta0) A <= alpha,
// with B the power and A the size of a (possibly randomized) classifier.
struct GnpProblem {
  double theta0 = 0.0;
  double theta1 = 1.0;
  double alpha = 0.1;

  GnpProblem(double theta0, double theta1, double alpha);

  static GnpProblem neyman_pearson(double alpha) { return {0.0, 1.0, alpha}; }
  // Controlled discovery rate: the constraint becomes D_Q(g) <= alpha.
  static GnpProblem cdr(double prior, double alpha) { return {prior, 1.0, alpha}; }
};

// Accepts with probability 1 above the threshold, tie_probability at it
// (within kTieTolerance) and 0 below.
struct ThresholdClassifier {
  ScorePtr score;
  double threshold = 0.0;
  double tie_probability = 0.0;

  double acceptance(double s) const;
  double operator()(const Feature& x) const { return acceptance((*score)(x)); }
  Eigen::VectorXd on_nodes(const FeatureDomain& domain) const;
};

// Per-grid-point acceptance probabilities.
struct RandomizedClassifierTable {
  Eigen::VectorXd acceptance;
  double objective = 0.0;
};

// Acceptance probabilities g(x_i) at quadrature nodes are the common
// currency of the functionals below.
double power(const JointDistribution& dist, const Eigen::VectorXd& g);
double size(const JointDistribution& dist, const Eigen::VectorXd& g);
double discovery_rate(const JointDistribution& dist, const Eigen::VectorXd& g);
double power(const JointDistribution& dist, const ThresholdClassifier& g);
double size(const JointDistribution& dist, const ThresholdClassifier& g);
double discovery_rate(const JointDistribution& dist, const ThresholdClassifier& g);

double gnp_objective(const JointDistribution& dist, const GnpProblem& problem, const Eigen::VectorXd& g);
double gnp_constraint(const JointDistribution& dist, const GnpProblem& problem, const Eigen::VectorXd& g);

// (q~0(x), q~1(x)) = (theta0 q1 + (1 - theta0) q0, theta1 q1 + (1 - theta1) q0).
std::pair<double, double> contaminated_densities(const JointDistribution& dist, double theta0, double theta1,
                                                 const Feature& x);

// Maps a pure likelihood-ratio level gamma to the contaminated level
// lambda; gamma = +inf maps to theta1/theta0 (+inf when theta0 = 0).
double lambda_gamma_map(double theta0, double theta1, double gamma);
// Inverse on [(1-theta1)/(1-theta0), theta1/theta0]; OutOfRange outside.
double inverse_lambda_gamma_map(double theta0, double theta1, double lambda);

// Threshold construction: threshold eta_Q under the contaminated null with
// a randomized tie at the boundary atom. When the constraint cannot bind
// (alpha at least the null mass of everything) every point is accepted:
// the threshold is the lowest posterior on the support and the tie
// probability is 1.
ThresholdClassifier solve_gnp_threshold(const JointDistribution& dist, const GnpProblem& problem);

inline constexpr Eigen::Index kBruteForceMaxPoints = 64;

// Exact LP optimum over per-point acceptance probabilities by the greedy
// ratio rule on q~1/q~0. DiscreteGrid only, at most 64 points.
RandomizedClassifierTable brute_force_gnp(const JointDistribution& dist, const GnpProblem& problem);

// G = {x : score(x) >= threshold} with its node membership.
struct LevelSet {
  ScorePtr score;
  double threshold = 0.0;
  Eigen::VectorXd membership;  // 0/1 per quadrature node

  bool contains(const Feature& x) const { return (*score)(x) >= threshold; }
};

// G_{P,Q,alpha} = {eta_P >= t} with Q_X-mass alpha; P = Q gives G_{Q,alpha}.
// Throws AssumptionAViolated when no such level set exists.
LevelSet optimal_cdr_set(const JointDistribution& source, const JointDistribution& target, double alpha);

// Upper level set of eta whose class-0 mass under `dist` equals alpha (the
// theta0 = 0 GNP optimum when it is deterministic).
LevelSet null_level_set(const JointDistribution& dist, double alpha);

// True when g accepts fully every point whose contaminated ratio
// q~1/q~0 strictly exceeds that of some point g accepts at all; ratios
// within a relative `tolerance` form one tie group and are not compared.
bool is_threshold_form(const JointDistribution& dist, const GnpProblem& problem, const Eigen::VectorXd& g,
                       double tolerance = 1e-12);

}  // namespace cdr

