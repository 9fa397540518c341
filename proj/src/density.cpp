#include "cdr/density.hpp"

#include "cdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cdr {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::size_t pick(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

Eigen::VectorXd Density::on_nodes() const {
  const auto& nodes = domain_.nodes();
  Eigen::VectorXd values(nodes.cols());
  for (Eigen::Index i = 0; i < nodes.cols(); ++i) values[i] = (*this)(nodes.col(i));
  return values;
}

double total_mass(const Density& density) { return density.domain().weights().dot(density.on_nodes()); }

// ---------------------------------------------------------------------------

TablePmf::TablePmf(FeatureDomain domain, Eigen::VectorXd probabilities)
    : Density(std::move(domain)), table_(std::move(probabilities)) {
  require(this->domain().is_grid(), ErrorKind::UnsupportedDomain, "TablePmf needs a DiscreteGrid domain");
  require(table_.size() == this->domain().size(), ErrorKind::InvalidArgument,
          "TablePmf has " + std::to_string(table_.size()) + " entries for " +
              std::to_string(this->domain().size()) + " grid points");
  require(table_.allFinite() && (table_.array() >= 0.0).all(), ErrorKind::InvalidArgument,
          "TablePmf entries must be finite and nonnegative");
  require(std::abs(table_.sum() - 1.0) <= 1e-9, ErrorKind::InvalidArgument,
          "TablePmf must sum to 1 (got " + std::to_string(table_.sum()) + ")");
  cumulative_.resize(static_cast<std::size_t>(table_.size()));
  double running = 0.0;
  for (Eigen::Index i = 0; i < table_.size(); ++i) {
    running += table_[i];
    cumulative_[static_cast<std::size_t>(i)] = running;
  }
}

double TablePmf::operator()(const Feature& x) const {
  const auto index = domain().index_of(x);
  return index ? table_[*index] : 0.0;
}

Eigen::Index TablePmf::sample_index(Rng& rng) const {
  return static_cast<Eigen::Index>(pick(cumulative_, uniform01(rng)));
}

Feature TablePmf::sample(Rng& rng) const { return domain().node(sample_index(rng)); }

// ---------------------------------------------------------------------------

GaussianMixture::GaussianMixture(FeatureDomain domain, std::vector<GaussianComponent> components)
    : Density(std::move(domain)), components_(std::move(components)) {
  require(!this->domain().is_grid(), ErrorKind::UnsupportedDomain, "GaussianMixture needs a ContinuousBox domain");
  require(!components_.empty(), ErrorKind::InvalidArgument, "GaussianMixture needs at least one component");
  const Eigen::Index d = this->domain().dimension();
  double weight_sum = 0.0;
  for (const auto& c : components_) {
    require(c.mean.size() == d && c.variance.size() == d, ErrorKind::InvalidArgument,
            "mixture component dimension does not match the domain");
    require(c.weight > 0.0 && std::isfinite(c.weight), ErrorKind::InvalidArgument,
            "mixture weights must be positive");
    require((c.variance.array() > 0.0).all(), ErrorKind::InvalidArgument, "mixture variances must be positive");
    weight_sum += c.weight;
  }
  require(std::abs(weight_sum - 1.0) <= 1e-9, ErrorKind::InvalidArgument, "mixture weights must sum to 1");

  const auto& lo = this->domain().lower();
  const auto& hi = this->domain().upper();
  normalizer_ = 0.0;
  double running = 0.0;
  for (const auto& c : components_) {
    double inside = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double sd = std::sqrt(c.variance[k]);
      inside *= normal_cdf((hi[k] - c.mean[k]) / sd) - normal_cdf((lo[k] - c.mean[k]) / sd);
    }
    normalizer_ += c.weight * inside;
    running += c.weight;
    cumulative_weights_.push_back(running);
  }
  require(normalizer_ > 1e-12, ErrorKind::InvalidArgument, "mixture puts no mass inside the box");
}

double GaussianMixture::untruncated(const Feature& x) const {
  double value = 0.0;
  for (const auto& c : components_) {
    const Eigen::ArrayXd z = (x - c.mean).array() / c.variance.array().sqrt();
    const double log_norm = -0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) -
                            0.5 * c.variance.array().log().sum();
    value += c.weight * std::exp(log_norm - 0.5 * z.square().sum());
  }
  return value;
}

double GaussianMixture::operator()(const Feature& x) const {
  if (!domain().contains(x)) return 0.0;
  return untruncated(x) / normalizer_;
}

Feature GaussianMixture::sample(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index d = domain().dimension();
  for (int attempt = 0; attempt < TiltedDensity::kMaxRejections; ++attempt) {
    const auto& c = components_[pick(cumulative_weights_, uniform01(rng))];
    Feature x(d);
    for (Eigen::Index k = 0; k < d; ++k) x[k] = c.mean[k] + std::sqrt(c.variance[k]) * normal(rng);
    if (domain().contains(x)) return x;
  }
  throw Error(ErrorKind::SamplerExhausted, "truncated Gaussian mixture rejection sampler gave up");
}

// ---------------------------------------------------------------------------

MixtureDensity::MixtureDensity(double weight, DensityPtr first, DensityPtr second)
    : Density(first->domain()), weight_(weight), first_(std::move(first)), second_(std::move(second)) {
  require(weight_ >= 0.0 && weight_ <= 1.0, ErrorKind::InvalidArgument, "mixture weight must lie in [0,1]");
  require(first_->domain() == second_->domain(), ErrorKind::InvalidArgument, "mixed densities need one domain");
}

double MixtureDensity::operator()(const Feature& x) const {
  return weight_ * (*first_)(x) + (1.0 - weight_) * (*second_)(x);
}

Feature MixtureDensity::sample(Rng& rng) const {
  return bernoulli(rng, weight_) ? first_->sample(rng) : second_->sample(rng);
}

Eigen::VectorXd MixtureDensity::on_nodes() const {
  return weight_ * first_->on_nodes() + (1.0 - weight_) * second_->on_nodes();
}

// ---------------------------------------------------------------------------

TiltedDensity::TiltedDensity(DensityPtr base, Tilt tilt, Eigen::VectorXd tilt_on_nodes, double normalizer)
    : Density(base->domain()),
      base_(std::move(base)),
      tilt_(std::move(tilt)),
      tilt_on_nodes_(std::move(tilt_on_nodes)),
      normalizer_(normalizer) {
  require(normalizer_ > 0.0, ErrorKind::InvalidArgument, "tilted density normalizer must be positive");
  require(tilt_on_nodes_.size() == domain().size(), ErrorKind::InvalidArgument, "tilt table size mismatch");
}

double TiltedDensity::operator()(const Feature& x) const {
  const double base = (*base_)(x);
  return base == 0.0 ? 0.0 : tilt_(x) * base / normalizer_;
}

Feature TiltedDensity::sample(Rng& rng) const {
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    Feature x = base_->sample(rng);
    if (bernoulli(rng, tilt_(x))) return x;
  }
  throw Error(ErrorKind::SamplerExhausted, "tilted density rejection sampler gave up");
}

Eigen::VectorXd TiltedDensity::on_nodes() const {
  return (tilt_on_nodes_.array() * base_->on_nodes().array() / normalizer_).matrix();
}

}  // namespace cdr
