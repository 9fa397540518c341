#pragma once

#include "cdr/distribution.hpp"
#include "cdr/klr_estimator.hpp"
#include "cdr/score.hpp"

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace cdr {

enum class EstimatorMethod { OrderStatistic, KlrThreshold };

std::string_view to_string(EstimatorMethod method);
// Accepts "histogram"/"OrderStatistic" and "klr"/"KlrThreshold".
EstimatorMethod estimator_method_from_string(std::string_view name);

inline constexpr double kDefaultBeta = 0.05;
inline constexpr double kDefaultGamma = 0.02;
inline constexpr double kDeviationConstant = 4.0;

struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::OrderStatistic;
  double beta = kDefaultBeta;
  double gamma = kDefaultGamma;
  // Constant c in eps_n = c (log(n+1)/n)^{1/2}. Anything but 4 is
  // non-standard and reported as such.
  double deviation_constant = kDeviationConstant;
  KlrConfig klr;
  double histogram_smoothing = 1.0;

  bool nonstandard_deviation_constant() const { return deviation_constant != kDeviationConstant; }
};

struct SetEstimate {
  ScorePtr score;
  double threshold = 0.0;
  EstimatorMethod provenance = EstimatorMethod::OrderStatistic;
  EstimatorConfig config;
  double epsilon_n = 0.0;        // KlrThreshold only
  bool budget_exhausted = false;  // KlrThreshold: budget admits no observed point
  std::shared_ptr<const KlrModel> model;

  bool contains(const Feature& x) const { return (*score)(x) >= threshold; }
  Eigen::VectorXd membership(const FeatureDomain& domain) const;
};

// Laplace-smoothed per-point label frequency on a DiscreteGrid:
// (ones + a) / (count + 2a). UnsupportedDomain on a ContinuousBox.
std::shared_ptr<const GridTableScore> fit_posterior_histogram(const std::vector<LabeledSample>& data,
                                                              const FeatureDomain& domain,
                                                              double smoothing = 1.0);

// The floor(n(1-alpha))-th smallest score (1-indexed). RankOutOfRange when
// that rank is < 1.
double threshold_order_statistic(std::vector<double> scores, double alpha);

inline double deviation_epsilon(std::size_t n, double constant = kDeviationConstant) {
  return constant * std::sqrt(std::log(static_cast<double>(n) + 1.0) / static_cast<double>(n));
}

struct DeviationThreshold {
  double threshold = 0.0;
  double epsilon_n = 0.0;
  bool budget_exhausted = false;
};

// t^ = inf{ t >= -beta : Qhat({score >= t + beta}) <= alpha + gamma + eps_n },
// computed exactly from the sorted scores.
DeviationThreshold threshold_deviation_rule(std::vector<double> scores, double alpha, double beta, double gamma,
                                            double deviation_constant = kDeviationConstant);

DeviationThreshold threshold_klr(const KlrModel& model, const std::vector<UnlabeledSample>& unlabeled, double alpha,
                                 double beta, double gamma, double deviation_constant = kDeviationConstant);

// Full pipeline; the histogram route needs the grid domain.
SetEstimate estimate_cdr_set(const std::vector<LabeledSample>& labeled, const std::vector<UnlabeledSample>& unlabeled,
                             double alpha, const EstimatorConfig& config, const FeatureDomain& domain);

}  // namespace cdr
