#pragma once

#include "cdr/distribution.hpp"
#include "cdr/klr.hpp"
#include "cdr/score.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace cdr {

using KlrModel = klr::KlrModel<double>;

struct KlrConfig {
  klr::KernelKind kernel = klr::KernelKind::Gaussian;
  std::optional<double> bandwidth;  // nullopt: median pairwise training distance
  std::optional<double> lambda;     // nullopt: m^{-1/2}
  double tol = 1e-8;
  int max_iter = 100;
};

double auto_lambda(std::size_t m);

KlrModel fit_klr(const std::vector<LabeledSample>& data, const KlrConfig& config);

inline double predict_posterior(const KlrModel& model, const Feature& x) { return model.posterior(x)[0]; }

class KlrScore final : public ScoreFunction {
 public:
  explicit KlrScore(std::shared_ptr<const KlrModel> model) : model_(std::move(model)) {}
  double operator()(const Feature& x) const override { return predict_posterior(*model_, x); }
  Eigen::VectorXd evaluate(const Eigen::MatrixXd& points) const override { return model_->posterior(points); }
  const KlrModel& model() const { return *model_; }

 private:
  std::shared_ptr<const KlrModel> model_;
};

}  // namespace cdr
