#include "cdr/domain.hpp"

#include "cdr/error.hpp"

#include <string>

namespace cdr {

namespace {

std::vector<double> key_of(const Feature& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace

FeatureDomain FeatureDomain::discrete_grid(const std::vector<Feature>& points) {
  require(!points.empty(), ErrorKind::InvalidArgument, "grid needs at least one point");
  const Eigen::Index d = points.front().size();
  require(d >= 1, ErrorKind::InvalidArgument, "grid points must have dimension >= 1");

  auto impl = std::make_shared<Impl>();
  impl->kind = DomainKind::DiscreteGrid;
  impl->nodes.resize(d, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].size() == d, ErrorKind::InvalidArgument, "grid points have mixed dimensions");
    require(points[i].allFinite(), ErrorKind::InvalidArgument, "grid point is not finite");
    const auto [it, inserted] = impl->index.emplace(key_of(points[i]), static_cast<Eigen::Index>(i));
    require(inserted, ErrorKind::InvalidArgument, "duplicate grid point at index " + std::to_string(i));
    impl->nodes.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  require(points.size() >= 2, ErrorKind::InvalidArgument, "grid needs at least two distinct points");
  impl->weights = Eigen::VectorXd::Ones(impl->nodes.cols());
  impl->lower = impl->nodes.rowwise().minCoeff();
  impl->upper = impl->nodes.rowwise().maxCoeff();
  return FeatureDomain(std::move(impl));
}

FeatureDomain FeatureDomain::continuous_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                            const Eigen::VectorXi& resolution) {
  const Eigen::Index d = lower.size();
  require(d >= 1 && upper.size() == d && resolution.size() == d, ErrorKind::InvalidArgument,
          "box bounds and resolution must share one dimension >= 1");
  for (Eigen::Index k = 0; k < d; ++k) {
    require(lower[k] < upper[k], ErrorKind::InvalidArgument, "box needs lower < upper in every dimension");
    require(resolution[k] >= 2, ErrorKind::InvalidArgument, "evaluation-grid resolution must be >= 2");
  }

  auto impl = std::make_shared<Impl>();
  impl->kind = DomainKind::ContinuousBox;
  impl->lower = lower;
  impl->upper = upper;
  impl->resolution = resolution;

  const Eigen::ArrayXd step = (upper - lower).array() / resolution.cast<double>().array();
  Eigen::Index total = 1;
  for (Eigen::Index k = 0; k < d; ++k) total *= resolution[k];
  impl->nodes.resize(d, total);
  impl->weights = Eigen::VectorXd::Constant(total, step.prod());

  // First coordinate varies fastest.
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rest = i;
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::Index cell = rest % resolution[k];
      rest /= resolution[k];
      impl->nodes(k, i) = lower[k] + (static_cast<double>(cell) + 0.5) * step[k];
    }
  }
  return FeatureDomain(std::move(impl));
}

bool FeatureDomain::contains(const Feature& x) const {
  if (x.size() != dimension()) return false;
  if (is_grid()) return impl_->index.count(key_of(x)) > 0;
  return (x.array() >= impl_->lower.array()).all() && (x.array() <= impl_->upper.array()).all();
}

std::optional<Eigen::Index> FeatureDomain::index_of(const Feature& x) const {
  if (!is_grid() || x.size() != dimension()) return std::nullopt;
  const auto it = impl_->index.find(key_of(x));
  if (it == impl_->index.end()) return std::nullopt;
  return it->second;
}

bool operator==(const FeatureDomain& a, const FeatureDomain& b) {
  if (a.impl_ == b.impl_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.is_grid())
    return a.nodes().rows() == b.nodes().rows() && a.nodes().cols() == b.nodes().cols() &&
           a.nodes() == b.nodes();
  return a.dimension() == b.dimension() && a.lower() == b.lower() && a.upper() == b.upper() && a.resolution() == b.resolution();
}

}  // namespace cdr
