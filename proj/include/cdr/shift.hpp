#pragma once

#include "cdr/density.hpp"
#include "cdr/distribution.hpp"
#include "cdr/monotone_map.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace cdr {

enum class ShiftKind {
  CovariateShift,
  PosteriorDrift,
  CSPD,
  TargetShift,
  LDLN,
  SymmetricNoise,
  OneSidedPD,
  Composition,
};

std::string_view to_string(ShiftKind kind);
ShiftKind shift_kind_from_string(std::string_view name);

// A recipe turning a target Q into a source P. Parameters not used by the
// kind are left at their defaults.
struct ShiftSpec {
  ShiftKind kind = ShiftKind::CovariateShift;
  std::optional<MonotoneMap> drift;  // phi for PosteriorDrift / CSPD
  std::optional<MonotoneMap> psi;    // rho0 = psi(eta_Q) for OneSidedPD
  DensityPtr new_marginal;           // CovariateShift / CSPD
  double new_prior = 0.5;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double nu = 0.0;
  std::vector<ShiftSpec> parts;  // Composition, applied in order

  static ShiftSpec covariate_shift(DensityPtr marginal);
  static ShiftSpec posterior_drift(MonotoneMap phi);
  static ShiftSpec cspd(MonotoneMap phi, DensityPtr marginal);
  static ShiftSpec target_shift(double prior);
  static ShiftSpec ldln(double rho0, double rho1);
  static ShiftSpec symmetric_noise(double nu);
  static ShiftSpec one_sided_pd(MonotoneMap psi);
  static ShiftSpec composition(std::vector<ShiftSpec> parts);

  bool is_label_noise() const;
};

// P together with the monotone map phi satisfying eta_P = phi(eta_Q).
struct ShiftResult {
  JointDistribution source;
  MonotoneMap phi;
};

ShiftResult apply_covariate_shift(const JointDistribution& target, const DensityPtr& new_marginal);
ShiftResult apply_posterior_drift(const JointDistribution& target, const MonotoneMap& phi);
ShiftResult apply_cspd(const JointDistribution& target, const MonotoneMap& phi, const DensityPtr& new_marginal);
ShiftResult apply_target_shift(const JointDistribution& target, double new_prior);
ShiftResult apply_ldln(const JointDistribution& target, double rho0, double rho1);
ShiftResult apply_symmetric_noise(const JointDistribution& target, double nu);
ShiftResult apply_one_sided_pd(const JointDistribution& target, const MonotoneMap& psi);
ShiftResult apply_shift(const JointDistribution& target, const ShiftSpec& spec);

// Posterior after one-sided noise: 1 - (1 - rho0)(1 - eta).
inline double one_sided_noise_posterior(double eta, double rho0) { return 1.0 - (1.0 - rho0) * (1.0 - eta); }

// Draws (X, Y) from Q and flips Y with the label-dependent (and, for
// OneSidedPD, feature-dependent) rate rho_Y(X). The clean draw is exactly
// target.sample_labeled(count, seed).
std::vector<LabeledSample> sample_noisy_labels(const JointDistribution& target, const ShiftSpec& noise,
                                               std::int64_t count, std::uint64_t seed);

}  // namespace cdr
