#pragma once

// Kernel logistic regression in the representer (dual) form
//
//   J(c) = lambda/2 c'Kc + 1/m sum_i log(1 + exp(-s_i (Kc)_i)),  s_i = 2 y_i - 1,
//
// minimized by Newton's method with Armijo backtracking. The Newton system
// H d = -grad with H = K (lambda I + 1/m W K) is solved through the SPD
// matrix B = I + 1/(lambda m) D K D, D = W^{1/2}, so K itself is never
// factorized.

#include "cdr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace cdr::klr {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class KernelKind { Gaussian };

template <typename Scalar>
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  Scalar bandwidth = Scalar(1);
};

// exp(-|a_i - b_j|^2 / (2 h^2)) for columns a_i of a and b_j of b.
template <typename Scalar, typename DerivedA, typename DerivedB>
Matrix<Scalar> kernel_matrix(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                             const KernelSpec<Scalar>& kernel) {
  const Vector<Scalar> na = a.colwise().squaredNorm().transpose();
  const Vector<Scalar> nb = b.colwise().squaredNorm().transpose();
  Matrix<Scalar> k = Scalar(-2) * (a.transpose() * b);
  k.colwise() += na;
  k.rowwise() += nb.transpose();
  const Scalar scale = Scalar(-1) / (Scalar(2) * kernel.bandwidth * kernel.bandwidth);
  return (k.array().max(Scalar(0)) * scale).exp().matrix();
}

template <typename Scalar>
Scalar median_pairwise_distance(const Matrix<Scalar>& points) {
  const Eigen::Index m = points.cols();
  std::vector<Scalar> distances;
  distances.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index j = 1; j < m; ++j)
    for (Eigen::Index i = 0; i < j; ++i) distances.push_back((points.col(i) - points.col(j)).norm());
  if (distances.empty()) return Scalar(1);
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  return *mid > Scalar(0) ? *mid : Scalar(1);
}

template <typename Scalar>
Scalar logistic(Scalar z) {
  using std::exp;
  return z >= Scalar(0) ? Scalar(1) / (Scalar(1) + exp(-z)) : exp(z) / (Scalar(1) + exp(z));
}

// log(1 + exp(-z)) without overflow.
template <typename Scalar>
Scalar logistic_loss(Scalar z) {
  using std::abs;
  using std::exp;
  using std::log1p;
  return log1p(exp(-abs(z))) + std::max(-z, Scalar(0));
}

template <typename Scalar>
class KlrObjective {
 public:
  KlrObjective(Matrix<Scalar> gram, Vector<Scalar> signs, Scalar lambda)
      : gram_(std::move(gram)), signs_(std::move(signs)), lambda_(lambda) {}

  Eigen::Index size() const { return signs_.size(); }
  const Matrix<Scalar>& gram() const { return gram_; }
  const Vector<Scalar>& signs() const { return signs_; }
  Scalar lambda() const { return lambda_; }

  Scalar value(const Vector<Scalar>& c) const { return value_from(c, gram_ * c); }

  Scalar value_from(const Vector<Scalar>& c, const Vector<Scalar>& f) const {
    Scalar loss(0);
    for (Eigen::Index i = 0; i < f.size(); ++i) loss += logistic_loss(signs_[i] * f[i]);
    return lambda_ / Scalar(2) * c.dot(f) + loss / Scalar(size());
  }

  // r = lambda c + v/m with v_i = -s_i sigma(-s_i f_i); the gradient is K r.
  Vector<Scalar> residual(const Vector<Scalar>& c, const Vector<Scalar>& f) const {
    Vector<Scalar> r(size());
    for (Eigen::Index i = 0; i < size(); ++i)
      r[i] = lambda_ * c[i] - signs_[i] * logistic(-signs_[i] * f[i]) / Scalar(size());
    return r;
  }

  std::pair<Scalar, Vector<Scalar>> value_and_gradient(const Vector<Scalar>& c) const {
    const Vector<Scalar> f = gram_ * c;
    return {value_from(c, f), gram_ * residual(c, f)};
  }

  Vector<Scalar> gradient(const Vector<Scalar>& c) const { return value_and_gradient(c).second; }

 private:
  Matrix<Scalar> gram_;
  Vector<Scalar> signs_;
  Scalar lambda_;
};

template <typename Scalar>
struct FitDiagnostics {
  int iterations = 0;
  Scalar objective = Scalar(0);
  Scalar gradient_norm = Scalar(0);
  bool converged = false;
  bool hit_max_iter = false;
  // the line search found no representable decrease before the gradient
  // reached tol (ill-conditioned K near the optimum)
  bool stalled = false;
  int gradient_fallbacks = 0;
  std::vector<Scalar> objective_trace;  // J at c = 0 and after every accepted step
};

template <typename Scalar>
class KlrModel {
 public:
  KlrModel(Matrix<Scalar> training, Vector<Scalar> coefficients, KernelSpec<Scalar> kernel, Scalar lambda,
           FitDiagnostics<Scalar> diagnostics)
      : training_(std::move(training)),
        coefficients_(std::move(coefficients)),
        kernel_(kernel),
        lambda_(lambda),
        diagnostics_(std::move(diagnostics)) {}

  const Matrix<Scalar>& training() const { return training_; }
  const Vector<Scalar>& coefficients() const { return coefficients_; }
  const KernelSpec<Scalar>& kernel() const { return kernel_; }
  Scalar lambda() const { return lambda_; }
  const FitDiagnostics<Scalar>& diagnostics() const { return diagnostics_; }

  // f(x) = sum_i c_i k(x, X_i) for each column of points.
  template <typename Derived>
  Vector<Scalar> decision(const Eigen::MatrixBase<Derived>& points) const {
    constexpr Eigen::Index kChunk = 1024;
    Vector<Scalar> out(points.cols());
    for (Eigen::Index start = 0; start < points.cols(); start += kChunk) {
      const Eigen::Index len = std::min(kChunk, points.cols() - start);
      out.segment(start, len) =
          kernel_matrix<Scalar>(points.middleCols(start, len), training_, kernel_) * coefficients_;
    }
    return out;
  }

  template <typename Derived>
  Vector<Scalar> posterior(const Eigen::MatrixBase<Derived>& points) const {
    return decision(points).unaryExpr([](Scalar z) { return logistic(z); });
  }

  // c' K c
  Scalar rkhs_norm_squared() const {
    const Matrix<Scalar> gram = kernel_matrix<Scalar>(training_, training_, kernel_);
    return coefficients_.dot(gram * coefficients_);
  }

 private:
  Matrix<Scalar> training_;
  Vector<Scalar> coefficients_;
  KernelSpec<Scalar> kernel_;
  Scalar lambda_;
  FitDiagnostics<Scalar> diagnostics_;
};

inline constexpr double kKernelJitter = 1e-10;

// Fits on features (one column per sample) and labels in {0,1}.
template <typename Scalar>
KlrModel<Scalar> fit_klr(const Matrix<Scalar>& features, const Eigen::VectorXi& labels,
                         const KernelSpec<Scalar>& kernel, Scalar lambda, Scalar tol, int max_iter) {
  using std::sqrt;
  const Eigen::Index m = features.cols();
  require(m >= 2, ErrorKind::InvalidArgument, "kernel logistic regression needs at least two samples");
  require(labels.size() == m, ErrorKind::InvalidArgument, "one label per training column is required");
  require(kernel.bandwidth > Scalar(0), ErrorKind::InvalidArgument, "kernel bandwidth must be positive");
  require(lambda > Scalar(0), ErrorKind::InvalidArgument, "lambda must be positive");
  require(tol > Scalar(0) && max_iter >= 1, ErrorKind::InvalidArgument, "tol and max_iter must be positive");

  Matrix<Scalar> gram = kernel_matrix<Scalar>(features, features, kernel);
  gram.diagonal().array() += Scalar(kKernelJitter);
  if (!gram.allFinite()) throw Error(ErrorKind::SingularKernelMatrix, "kernel matrix has non-finite entries");
  Vector<Scalar> signs = (Scalar(2) * labels.cast<Scalar>().array() - Scalar(1)).matrix();
  const KlrObjective<Scalar> objective(std::move(gram), std::move(signs), lambda);
  const Matrix<Scalar>& k = objective.gram();
  const Scalar lambda_m = lambda * Scalar(m);

  FitDiagnostics<Scalar> diag;
  Vector<Scalar> c = Vector<Scalar>::Zero(m);
  Vector<Scalar> f = Vector<Scalar>::Zero(m);
  Scalar value = objective.value_from(c, f);
  diag.objective_trace.push_back(value);
  Matrix<Scalar> system(m, m);

  for (int iter = 0;; ++iter) {
    const Vector<Scalar> r = objective.residual(c, f);
    const Vector<Scalar> grad = k * r;
    diag.gradient_norm = grad.norm();
    diag.iterations = iter;
    if (diag.gradient_norm <= tol) {
      diag.converged = true;
      break;
    }
    if (iter >= max_iter) {
      diag.hit_max_iter = true;
      break;
    }

    Vector<Scalar> d(m);
    for (Eigen::Index i = 0; i < m; ++i) d[i] = sqrt(logistic(f[i]) * logistic(-f[i]));
    for (Eigen::Index j = 0; j < m; ++j)
      system.col(j) = (d[j] / lambda_m) * d.cwiseProduct(k.col(j));
    system.diagonal().array() += Scalar(1);
    Eigen::LLT<Eigen::Ref<Matrix<Scalar>>> llt(system);

    Vector<Scalar> step;
    if (llt.info() == Eigen::Success) {
      const Vector<Scalar> inner = llt.solve(d.cwiseProduct(grad));
      step = -(r - d.cwiseProduct(inner) / lambda_m) / lambda;
    }
    Scalar slope = step.size() ? grad.dot(step) : Scalar(0);
    if (!step.size() || !step.allFinite() || !(slope < Scalar(0))) {
      step = -grad;
      slope = -grad.squaredNorm();
      ++diag.gradient_fallbacks;
    }

    // Armijo backtracking; accept only strict decrease.
    Scalar t(1);
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t /= Scalar(2)) {
      const Vector<Scalar> c_new = c + t * step;
      const Vector<Scalar> f_new = k * c_new;
      const Scalar value_new = objective.value_from(c_new, f_new);
      if (value_new <= value + Scalar(1e-4) * t * slope && value_new < value) {
        c = c_new;
        f = f_new;
        value = value_new;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      diag.stalled = true;
      break;
    }
    diag.objective_trace.push_back(value);
  }
  diag.objective = value;
  return KlrModel<Scalar>(features, std::move(c), kernel, lambda, std::move(diag));
}

}  // namespace cdr::klr
