#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace cdr {

using Feature = Eigen::VectorXd;

enum class DomainKind { DiscreteGrid, ContinuousBox };

// Feature space X together with the quadrature rule used to integrate over
// it. On a DiscreteGrid the nodes are the grid points with unit weights
// (counting measure); on a ContinuousBox they are the midpoints of a
// tensor-product grid with the cell volume as weight (Lebesgue measure).
class FeatureDomain {
 public:
  static FeatureDomain discrete_grid(const std::vector<Feature>& points);
  static FeatureDomain continuous_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                      const Eigen::VectorXi& resolution);

  DomainKind kind() const { return impl_->kind; }
  bool is_grid() const { return impl_->kind == DomainKind::DiscreteGrid; }
  Eigen::Index dimension() const { return impl_->nodes.rows(); }

  // Quadrature nodes, one column per node.
  const Eigen::MatrixXd& nodes() const { return impl_->nodes; }
  const Eigen::VectorXd& weights() const { return impl_->weights; }
  Eigen::Index size() const { return impl_->nodes.cols(); }
  Feature node(Eigen::Index i) const { return impl_->nodes.col(i); }

  bool contains(const Feature& x) const;
  // Grid membership lookup; nullopt for non-members and on a ContinuousBox.
  std::optional<Eigen::Index> index_of(const Feature& x) const;

  const Eigen::VectorXd& lower() const { return impl_->lower; }
  const Eigen::VectorXd& upper() const { return impl_->upper; }
  const Eigen::VectorXi& resolution() const { return impl_->resolution; }

  friend bool operator==(const FeatureDomain& a, const FeatureDomain& b);

 private:
  struct Impl {
    DomainKind kind = DomainKind::DiscreteGrid;
    Eigen::MatrixXd nodes;
    Eigen::VectorXd weights;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXi resolution;
    std::map<std::vector<double>, Eigen::Index> index;
  };

  explicit FeatureDomain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

inline Feature scalar_feature(double x) { return Feature::Constant(1, x); }

}  // namespace cdr
