#pragma once

#include "cdr/domain.hpp"
#include "cdr/random.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace cdr {

enum class DensityFamily { TablePmf, GaussianMixture, Derived };

// A probability density on a FeatureDomain with respect to that domain's
// dominating measure. Immutable; shared through DensityPtr.
class Density {
 public:
  explicit Density(FeatureDomain domain) : domain_(std::move(domain)) {}
  virtual ~Density() = default;

  virtual DensityFamily family() const = 0;
  virtual double operator()(const Feature& x) const = 0;
  virtual Feature sample(Rng& rng) const = 0;
  // Density values at the domain's quadrature nodes.
  virtual Eigen::VectorXd on_nodes() const;

  const FeatureDomain& domain() const { return domain_; }

 private:
  FeatureDomain domain_;
};

using DensityPtr = std::shared_ptr<const Density>;

class TablePmf final : public Density {
 public:
  TablePmf(FeatureDomain domain, Eigen::VectorXd probabilities);

  DensityFamily family() const override { return DensityFamily::TablePmf; }
  double operator()(const Feature& x) const override;
  Feature sample(Rng& rng) const override;
  Eigen::VectorXd on_nodes() const override { return table_; }
  Eigen::Index sample_index(Rng& rng) const;

  const Eigen::VectorXd& table() const { return table_; }

 private:
  Eigen::VectorXd table_;
  std::vector<double> cumulative_;
};

struct GaussianComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // diagonal of the covariance
};

// Diagonal-covariance Gaussian mixture truncated to a ContinuousBox and
// renormalized. The truncation constant is exact (products of normal CDF
// differences) and cached at construction.
class GaussianMixture final : public Density {
 public:
  GaussianMixture(FeatureDomain domain, std::vector<GaussianComponent> components);

  DensityFamily family() const override { return DensityFamily::GaussianMixture; }
  double operator()(const Feature& x) const override;
  Feature sample(Rng& rng) const override;

  const std::vector<GaussianComponent>& components() const { return components_; }
  double truncation_mass() const { return normalizer_; }

 private:
  double untruncated(const Feature& x) const;

  std::vector<GaussianComponent> components_;
  std::vector<double> cumulative_weights_;
  double normalizer_ = 1.0;
};

// weight * first + (1 - weight) * second
class MixtureDensity final : public Density {
 public:
  MixtureDensity(double weight, DensityPtr first, DensityPtr second);

  DensityFamily family() const override { return DensityFamily::Derived; }
  double operator()(const Feature& x) const override;
  Feature sample(Rng& rng) const override;
  Eigen::VectorXd on_nodes() const override;

 private:
  double weight_;
  DensityPtr first_;
  DensityPtr second_;
};

// tilt(x) * base(x) / normalizer with tilt(x) in [0, 1]; sampled by
// rejection from the base density.
class TiltedDensity final : public Density {
 public:
  using Tilt = std::function<double(const Feature&)>;

  TiltedDensity(DensityPtr base, Tilt tilt, Eigen::VectorXd tilt_on_nodes, double normalizer);

  DensityFamily family() const override { return DensityFamily::Derived; }
  double operator()(const Feature& x) const override;
  Feature sample(Rng& rng) const override;
  Eigen::VectorXd on_nodes() const override;

  static constexpr int kMaxRejections = 1'000'000;

 private:
  DensityPtr base_;
  Tilt tilt_;
  Eigen::VectorXd tilt_on_nodes_;
  double normalizer_;
};

// Quadrature integral of a density over its domain.
double total_mass(const Density& density);

}  // namespace cdr
