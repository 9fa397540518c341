#include "cdr/klr_estimator.hpp"

#include <cmath>

namespace cdr {

double auto_lambda(std::size_t m) { return 1.0 / std::sqrt(static_cast<double>(m)); }

KlrModel fit_klr(const std::vector<LabeledSample>& data, const KlrConfig& config) {
  require(data.size() >= 2, ErrorKind::InvalidArgument, "kernel logistic regression needs at least two samples");
  const auto m = static_cast<Eigen::Index>(data.size());
  const Eigen::Index d = data.front().features.size();
  Eigen::MatrixXd features(d, m);
  Eigen::VectorXi labels(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    features.col(i) = data[static_cast<std::size_t>(i)].features;
    labels[i] = data[static_cast<std::size_t>(i)].label;
  }
  klr::KernelSpec<double> kernel{config.kernel, config.bandwidth.value_or(0.0)};
  if (!config.bandwidth) kernel.bandwidth = klr::median_pairwise_distance<double>(features);
  const double lambda = config.lambda.value_or(auto_lambda(data.size()));
  return klr::fit_klr<double>(features, labels, kernel, lambda, config.tol, config.max_iter);
}

}  // namespace cdr
