#pragma once

#include "cdr/density.hpp"
#include "cdr/domain.hpp"
#include "cdr/score.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cdr {

struct LabeledSample {
  Feature features;
  int label = 0;
};

struct UnlabeledSample {
  Feature features;
};

// Joint law of (X, Y) on domain x {0,1}: prior pi = P(Y = 1) and the two
// class-conditional densities. The posterior is always derived from these
// fields by Bayes' rule. Quadrature tables of every density and of the
// posterior are computed once at construction; copies share them.
class JointDistribution {
 public:
  JointDistribution(double prior, DensityPtr density0, DensityPtr density1);

  // Builds the joint law with feature marginal `marginal` and posterior
  // `posterior`; the class-conditionals are the marginal tilted by eta and
  // 1 - eta. Throws DegeneratePrior when the implied prior leaves
  // [1e-9, 1 - 1e-9].
  static JointDistribution from_marginal_and_posterior(DensityPtr marginal,
                                                       std::function<double(const Feature&)> posterior,
                                                       const Eigen::VectorXd& posterior_on_nodes);

  const FeatureDomain& domain() const { return impl_->density0->domain(); }
  double prior() const { return impl_->prior; }
  const DensityPtr& density0() const { return impl_->density0; }
  const DensityPtr& density1() const { return impl_->density1; }
  DensityPtr marginal_density() const { return impl_->marginal; }

  double posterior(const Feature& x) const;
  double marginal(const Feature& x) const;
  // Posterior extended off the support of the marginal by the prior (the
  // value Bayes' rule gives for equal class-conditional densities).
  double posterior_or_prior(const Feature& x) const;

  const Eigen::VectorXd& density0_table() const { return impl_->density0_table; }
  const Eigen::VectorXd& density1_table() const { return impl_->density1_table; }
  const Eigen::VectorXd& marginal_table() const { return impl_->marginal_table; }
  const Eigen::VectorXd& posterior_table() const { return impl_->posterior_table; }
  // Quadrature masses: weight_i * density(node_i).
  Eigen::VectorXd mass0() const { return domain().weights().cwiseProduct(density0_table()); }
  Eigen::VectorXd mass1() const { return domain().weights().cwiseProduct(density1_table()); }
  Eigen::VectorXd marginal_mass() const { return domain().weights().cwiseProduct(marginal_table()); }

  ScorePtr posterior_score() const;

  std::vector<LabeledSample> sample_labeled(std::int64_t count, std::uint64_t seed) const;
  std::vector<UnlabeledSample> sample_unlabeled(std::int64_t count, std::uint64_t seed) const;

 private:
  struct Impl {
    double prior = 0.5;
    DensityPtr density0;
    DensityPtr density1;
    DensityPtr marginal;
    Eigen::VectorXd density0_table;
    Eigen::VectorXd density1_table;
    Eigen::VectorXd marginal_table;
    Eigen::VectorXd posterior_table;
  };

  std::shared_ptr<const Impl> impl_;
};

// Exact posterior of a distribution as a ScoreFunction.
class PosteriorScore final : public ScoreFunction {
 public:
  explicit PosteriorScore(JointDistribution dist) : dist_(std::move(dist)) {}
  double operator()(const Feature& x) const override { return dist_.posterior_or_prior(x); }
  Eigen::VectorXd on_nodes(const FeatureDomain& domain) const override;

 private:
  JointDistribution dist_;
};

// F(t) = Q_X({x : score(x) <= t}); exact on a DiscreteGrid, midpoint
// quadrature on a ContinuousBox.
double cdf_of_score(const JointDistribution& dist_for_marginal, const ScoreFunction& score, double t);
double cdf_of_score(const JointDistribution& dist_for_marginal, const Eigen::VectorXd& score_on_nodes, double t);

// ---------------------------------------------------------------------------
// Upper level sets {score >= t} with a prescribed mass.

struct LevelSetSearch {
  bool found = false;
  double threshold = 0.0;
  double mass_above = 0.0;     // mass of {score > threshold}
  double mass_at = 0.0;        // mass of the atom {score == threshold}
  Eigen::Index atom_size = 0;  // nodes in that atom
  std::string reason;
};

inline constexpr double kTieTolerance = 1e-12;
inline constexpr double kMassTolerance = 1e-12;

// Searches for t with mass({score >= t}) == level. On a DiscreteGrid the
// level must be hit exactly (up to kMassTolerance) by a union of tie
// groups. On a ContinuousBox each quadrature cell stands for a continuum,
// so the search succeeds unless the straddling atom spans several cells
// (a genuinely flat score).
LevelSetSearch upper_level_set(const Eigen::VectorXd& scores, const Eigen::VectorXd& masses, double level,
                               DomainKind kind);

struct AssumptionAResult {
  bool holds = false;
  double threshold = 0.0;
  std::string reason;
};

AssumptionAResult check_assumption_A(const JointDistribution& source, const JointDistribution& target,
                                     double alpha);

struct AssumptionBResult {
  bool holds = false;
  double kappa = 0.0;        // max of the one-sided estimates
  double kappa_upper = 0.0;  // from delta > 0 probes
  double kappa_lower = 0.0;  // from delta < 0 probes
  double b1 = 0.0;
  double b2 = 0.0;
  std::string reason;
};

AssumptionBResult check_assumption_B(const JointDistribution& source, const JointDistribution& target,
                                     double alpha, const std::vector<double>& probes);

}  // namespace cdr
