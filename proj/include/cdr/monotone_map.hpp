#pragma once

#include <functional>
#include <string>

namespace cdr {

// A map [0,1] -> [0,1] relating two posteriors, eta_P = phi(eta_Q).
class MonotoneMap {
 public:
  MonotoneMap(std::string name, std::function<double(double)> fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  static MonotoneMap identity();
  static MonotoneMap square();
  static MonotoneMap affine(double slope, double intercept);
  // u -> r u / (r u + 1 - u): multiplies the posterior odds by r.
  static MonotoneMap lr_scale(double ratio);
  // Parses "identity", "square", "affine(a,b)", "lr_scale(r)".
  static MonotoneMap parse(const std::string& text);

  double operator()(double u) const { return fn_(u); }
  const std::string& name() const { return name_; }

  // Bisection inverse on [0,1]; values outside the range clamp to the
  // nearest endpoint.
  double inverse(double value, double tolerance = 1e-14) const;

 private:
  std::string name_;
  std::function<double(double)> fn_;
};

// (then(first, second))(u) == second(first(u)).
MonotoneMap then(const MonotoneMap& first, const MonotoneMap& second);

inline constexpr int kMonotoneGridPoints = 1001;

// Strictly increasing with values in [0,1] on the uniform 1001-point grid.
// Throws NonMonotoneMap otherwise.
void validate_strictly_increasing(const MonotoneMap& map);
// Weakly increasing with values in [0,1); used for one-sided noise rates.
void validate_noise_rate_map(const MonotoneMap& map);

}  // namespace cdr
