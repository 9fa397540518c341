#include "cdr/estimators.hpp"

#include "cdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdr {

std::string_view to_string(EstimatorMethod method) {
  return method == EstimatorMethod::OrderStatistic ? "histogram" : "klr";
}

EstimatorMethod estimator_method_from_string(std::string_view name) {
  if (name == "histogram" || name == "OrderStatistic") return EstimatorMethod::OrderStatistic;
  if (name == "klr" || name == "KlrThreshold") return EstimatorMethod::KlrThreshold;
  throw Error(ErrorKind::InvalidArgument, "unknown estimator method \"" + std::string(name) + "\"");
}

Eigen::VectorXd SetEstimate::membership(const FeatureDomain& domain) const {
  return (score->on_nodes(domain).array() >= threshold).cast<double>();
}

std::shared_ptr<const GridTableScore> fit_posterior_histogram(const std::vector<LabeledSample>& data,
                                                              const FeatureDomain& domain, double smoothing) {
  require(domain.is_grid(), ErrorKind::UnsupportedDomain, "the histogram estimator needs a DiscreteGrid domain");
  require(smoothing > 0.0, ErrorKind::InvalidArgument, "smoothing must be positive");
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(domain.size());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(domain.size());
  for (const auto& s : data) {
    const auto index = domain.index_of(s.features);
    require(index.has_value(), ErrorKind::InvalidArgument, "labeled sample lies off the grid");
    counts[*index] += 1.0;
    ones[*index] += s.label;
  }
  Eigen::VectorXd eta = (ones.array() + smoothing) / (counts.array() + 2.0 * smoothing);
  return std::make_shared<GridTableScore>(domain, std::move(eta), 0.5);
}

double threshold_order_statistic(std::vector<double> scores, double alpha) {
  require(!scores.empty(), ErrorKind::InvalidArgument, "need at least one unlabeled score");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  const double n = static_cast<double>(scores.size());
  // the small slack keeps exact products such as 10 * 0.7 on the right side of the floor
  const auto rank = static_cast<std::ptrdiff_t>(std::floor(n * (1.0 - alpha) + 1e-9));
  if (rank < 1) {
    throw Error(ErrorKind::RankOutOfRange,
                "floor(n(1-alpha)) = " + std::to_string(rank) + " for n = " + std::to_string(scores.size()));
  }
  const auto nth = scores.begin() + (rank - 1);
  std::nth_element(scores.begin(), nth, scores.end());
  return *nth;
}

DeviationThreshold threshold_deviation_rule(std::vector<double> scores, double alpha, double beta, double gamma,
                                            double deviation_constant) {
  require(!scores.empty(), ErrorKind::InvalidArgument, "need at least one unlabeled score");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  require(beta > 0.0 && gamma > 0.0, ErrorKind::InvalidArgument, "beta and gamma must be positive");
  require(deviation_constant >= 0.0, ErrorKind::InvalidArgument, "deviation constant must be nonnegative");

  const std::size_t n = scores.size();
  DeviationThreshold out;
  out.epsilon_n = deviation_epsilon(n, deviation_constant);
  const double budget = alpha + gamma + out.epsilon_n;
  // At most `allowed` scores may satisfy score >= t + beta.
  const double allowed_real = std::floor(budget * static_cast<double>(n) + 1e-9);
  if (allowed_real >= static_cast<double>(n)) {
    out.threshold = -beta;
    return out;
  }
  const auto allowed = static_cast<std::size_t>(allowed_real);
  std::sort(scores.begin(), scores.end(), std::greater<>());
  // count(score >= t + beta) <= allowed  <=>  t + beta > scores[allowed]
  out.threshold = std::max(scores[allowed] - beta, -beta);
  out.budget_exhausted = allowed == 0;
  return out;
}

DeviationThreshold threshold_klr(const KlrModel& model, const std::vector<UnlabeledSample>& unlabeled, double alpha,
                                 double beta, double gamma, double deviation_constant) {
  require(!unlabeled.empty(), ErrorKind::InvalidArgument, "need at least one unlabeled sample");
  Eigen::MatrixXd points(model.training().rows(), static_cast<Eigen::Index>(unlabeled.size()));
  for (std::size_t i = 0; i < unlabeled.size(); ++i) points.col(static_cast<Eigen::Index>(i)) = unlabeled[i].features;
  const Eigen::VectorXd scores = model.posterior(points);
  return threshold_deviation_rule({scores.data(), scores.data() + scores.size()}, alpha, beta, gamma,
                                  deviation_constant);
}

SetEstimate estimate_cdr_set(const std::vector<LabeledSample>& labeled, const std::vector<UnlabeledSample>& unlabeled,
                             double alpha, const EstimatorConfig& config, const FeatureDomain& domain) {
  require(!labeled.empty(), ErrorKind::InvalidArgument, "need labeled data");
  require(!unlabeled.empty(), ErrorKind::InvalidArgument, "need unlabeled data");
  SetEstimate estimate;
  estimate.provenance = config.method;
  estimate.config = config;

  if (config.method == EstimatorMethod::OrderStatistic) {
    auto histogram = fit_posterior_histogram(labeled, domain, config.histogram_smoothing);
    std::vector<double> scores;
    scores.reserve(unlabeled.size());
    for (const auto& u : unlabeled) scores.push_back((*histogram)(u.features));
    estimate.threshold = threshold_order_statistic(std::move(scores), alpha);
    estimate.score = std::move(histogram);
    return estimate;
  }

  auto model = std::make_shared<const KlrModel>(fit_klr(labeled, config.klr));
  const auto rule = threshold_klr(*model, unlabeled, alpha, config.beta, config.gamma, config.deviation_constant);
  estimate.threshold = rule.threshold;
  estimate.epsilon_n = rule.epsilon_n;
  estimate.budget_exhausted = rule.budget_exhausted;
  estimate.model = model;
  estimate.score = std::make_shared<KlrScore>(model);
  return estimate;
}

}  // namespace cdr
