#include "cdr/fixtures.hpp"

#include <random>

namespace cdr {

JointDistribution random_grid_fixture(Rng& rng, int max_points) {
  const int k = std::uniform_int_distribution<int>(2, std::max(2, max_points))(rng);
  std::vector<Feature> points;
  for (int i = 0; i < k; ++i) points.push_back(scalar_feature(i));
  const FeatureDomain domain = FeatureDomain::discrete_grid(points);

  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd q0(k), q1(k);
  for (int i = 0; i < k; ++i) {
    q0[i] = expo(rng);
    q1[i] = expo(rng);
  }
  if (bernoulli(rng, 1.0 / 3.0)) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    const int from = pick(rng), to = pick(rng);
    const double scale = 0.25 + 2.0 * uniform01(rng);
    q0[to] = scale * q0[from];
    q1[to] = scale * q1[from];
  }
  q0 /= q0.sum();
  q1 /= q1.sum();
  const double prior = 0.05 + 0.9 * uniform01(rng);
  return JointDistribution(prior, std::make_shared<TablePmf>(domain, q0), std::make_shared<TablePmf>(domain, q1));
}

GnpProblem random_gnp_problem(Rng& rng) {
  double a = uniform01(rng), b = uniform01(rng);
  if (a > b) std::swap(a, b);
  if (b - a < 1e-3) b = std::min(1.0, a + 0.1);
  if (b - a < 1e-3) a = b - 0.1;
  const double alpha = 0.01 + 0.98 * uniform01(rng);
  return {a, b, alpha};
}

Eigen::VectorXd random_membership(Rng& rng, Eigen::Index size) {
  Eigen::VectorXd g(size);
  for (Eigen::Index i = 0; i < size; ++i) g[i] = bernoulli(rng, 0.5) ? 1.0 : 0.0;
  return g;
}

}  // namespace cdr
