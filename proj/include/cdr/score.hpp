#pragma once

#include "cdr/domain.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace cdr {

// A real-valued score x -> [0,1] (an exact posterior or a fitted one).
class ScoreFunction {
 public:
  virtual ~ScoreFunction() = default;

  virtual double operator()(const Feature& x) const = 0;
  // One value per column of points.
  virtual Eigen::VectorXd evaluate(const Eigen::MatrixXd& points) const;
  virtual Eigen::VectorXd on_nodes(const FeatureDomain& domain) const { return evaluate(domain.nodes()); }
};

using ScorePtr = std::shared_ptr<const ScoreFunction>;

class LambdaScore final : public ScoreFunction {
 public:
  explicit LambdaScore(std::function<double(const Feature&)> fn) : fn_(std::move(fn)) {}
  double operator()(const Feature& x) const override { return fn_(x); }

 private:
  std::function<double(const Feature&)> fn_;
};

// Score given by a table over a DiscreteGrid; points off the grid get
// the fallback value.
class GridTableScore final : public ScoreFunction {
 public:
  GridTableScore(FeatureDomain domain, Eigen::VectorXd table, double fallback);
  double operator()(const Feature& x) const override;
  Eigen::VectorXd on_nodes(const FeatureDomain& domain) const override;
  const Eigen::VectorXd& table() const { return table_; }

 private:
  FeatureDomain domain_;
  Eigen::VectorXd table_;
  double fallback_;
};

inline Eigen::VectorXd ScoreFunction::evaluate(const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) out[i] = (*this)(points.col(i));
  return out;
}

inline GridTableScore::GridTableScore(FeatureDomain domain, Eigen::VectorXd table, double fallback)
    : domain_(std::move(domain)), table_(std::move(table)), fallback_(fallback) {}

inline double GridTableScore::operator()(const Feature& x) const {
  const auto index = domain_.index_of(x);
  return index ? table_[*index] : fallback_;
}

inline Eigen::VectorXd GridTableScore::on_nodes(const FeatureDomain& domain) const {
  if (domain == domain_) return table_;
  return evaluate(domain.nodes());
}

}  // namespace cdr
