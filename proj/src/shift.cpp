#include "cdr/shift.hpp"

#include "cdr/error.hpp"

#include <cmath>
#include <string>

namespace cdr {

namespace {

constexpr std::pair<ShiftKind, std::string_view> kKindNames[] = {
    {ShiftKind::CovariateShift, "CovariateShift"}, {ShiftKind::PosteriorDrift, "PosteriorDrift"},
    {ShiftKind::CSPD, "CSPD"},                     {ShiftKind::TargetShift, "TargetShift"},
    {ShiftKind::LDLN, "LDLN"},                     {ShiftKind::SymmetricNoise, "SymmetricNoise"},
    {ShiftKind::OneSidedPD, "OneSidedPD"},         {ShiftKind::Composition, "Composition"},
};

Eigen::VectorXd map_table(const MonotoneMap& phi, const Eigen::VectorXd& values) {
  Eigen::VectorXd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) out[i] = phi(values[i]);
  return out;
}

// P with the given feature marginal and eta_P = phi(eta_Q).
JointDistribution remap(const JointDistribution& target, const MonotoneMap& phi, const DensityPtr& marginal) {
  auto posterior = [target, phi](const Feature& x) { return phi(target.posterior_or_prior(x)); };
  return JointDistribution::from_marginal_and_posterior(marginal, posterior,
                                                        map_table(phi, target.posterior_table()));
}

void check_support(const JointDistribution& target, const DensityPtr& new_marginal) {
  require(new_marginal != nullptr, ErrorKind::InvalidArgument, "new marginal is required");
  require(new_marginal->domain() == target.domain(), ErrorKind::InvalidArgument,
          "new marginal lives on a different domain");
  const Eigen::VectorXd values = new_marginal->on_nodes();
  require((values.array() >= 0.0).all(), ErrorKind::InvalidArgument, "new marginal must be nonnegative");
  const Eigen::VectorXd& q = target.marginal_table();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0 && !(values[i] > 0.0)) {
      throw Error(ErrorKind::SupportViolation,
                  "support of Q_X is not contained in the support of the new marginal (node " + std::to_string(i) +
                      ")");
    }
  }
}

}  // namespace

std::string_view to_string(ShiftKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "Unknown";
}

ShiftKind shift_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw Error(ErrorKind::ScenarioFormat, "unknown shift kind \"" + std::string(name) + "\"");
}

ShiftSpec ShiftSpec::covariate_shift(DensityPtr marginal) {
  ShiftSpec s;
  s.kind = ShiftKind::CovariateShift;
  s.new_marginal = std::move(marginal);
  return s;
}

ShiftSpec ShiftSpec::posterior_drift(MonotoneMap phi) {
  ShiftSpec s;
  s.kind = ShiftKind::PosteriorDrift;
  s.drift = std::move(phi);
  return s;
}

ShiftSpec ShiftSpec::cspd(MonotoneMap phi, DensityPtr marginal) {
  ShiftSpec s;
  s.kind = ShiftKind::CSPD;
  s.drift = std::move(phi);
  s.new_marginal = std::move(marginal);
  return s;
}

ShiftSpec ShiftSpec::target_shift(double prior) {
  ShiftSpec s;
  s.kind = ShiftKind::TargetShift;
  s.new_prior = prior;
  return s;
}

ShiftSpec ShiftSpec::ldln(double rho0, double rho1) {
  ShiftSpec s;
  s.kind = ShiftKind::LDLN;
  s.rho0 = rho0;
  s.rho1 = rho1;
  return s;
}

ShiftSpec ShiftSpec::symmetric_noise(double nu) {
  ShiftSpec s;
  s.kind = ShiftKind::SymmetricNoise;
  s.nu = nu;
  return s;
}

ShiftSpec ShiftSpec::one_sided_pd(MonotoneMap psi) {
  ShiftSpec s;
  s.kind = ShiftKind::OneSidedPD;
  s.psi = std::move(psi);
  return s;
}

ShiftSpec ShiftSpec::composition(std::vector<ShiftSpec> parts) {
  ShiftSpec s;
  s.kind = ShiftKind::Composition;
  s.parts = std::move(parts);
  return s;
}

bool ShiftSpec::is_label_noise() const {
  return kind == ShiftKind::LDLN || kind == ShiftKind::SymmetricNoise || kind == ShiftKind::OneSidedPD;
}

// ---------------------------------------------------------------------------

ShiftResult apply_covariate_shift(const JointDistribution& target, const DensityPtr& new_marginal) {
  check_support(target, new_marginal);
  const MonotoneMap phi = MonotoneMap::identity();
  return {remap(target, phi, new_marginal), phi};
}

ShiftResult apply_posterior_drift(const JointDistribution& target, const MonotoneMap& phi) {
  validate_strictly_increasing(phi);
  return {remap(target, phi, target.marginal_density()), phi};
}

ShiftResult apply_cspd(const JointDistribution& target, const MonotoneMap& phi, const DensityPtr& new_marginal) {
  validate_strictly_increasing(phi);
  check_support(target, new_marginal);
  return {remap(target, phi, new_marginal), phi};
}

ShiftResult apply_target_shift(const JointDistribution& target, double new_prior) {
  require(new_prior > 0.0 && new_prior < 1.0, ErrorKind::InvalidArgument, "new prior must lie in (0,1)");
  const double q = target.prior();
  const double ratio = (new_prior / (1.0 - new_prior)) / (q / (1.0 - q));
  return {JointDistribution(new_prior, target.density0(), target.density1()),
          ratio == 1.0 ? MonotoneMap::identity() : MonotoneMap::lr_scale(ratio)};
}

ShiftResult apply_ldln(const JointDistribution& target, double rho0, double rho1) {
  require(rho0 >= 0.0 && rho1 >= 0.0, ErrorKind::InvalidArgument, "flip rates must be nonnegative");
  if (!(rho0 + rho1 < 1.0))
    throw Error(ErrorKind::NoiseTooLarge, "label-dependent noise needs rho0 + rho1 < 1");
  if (rho0 == 0.0 && rho1 == 0.0) return {target, MonotoneMap::identity()};
  return apply_posterior_drift(target, MonotoneMap::affine(1.0 - rho0 - rho1, rho0));
}

ShiftResult apply_symmetric_noise(const JointDistribution& target, double nu) {
  return apply_ldln(target, nu, nu);
}

ShiftResult apply_one_sided_pd(const JointDistribution& target, const MonotoneMap& psi) {
  validate_noise_rate_map(psi);
  const MonotoneMap phi("one_sided(" + psi.name() + ")",
                        [psi](double u) { return one_sided_noise_posterior(u, psi(u)); });
  return apply_posterior_drift(target, phi);
}

ShiftResult apply_shift(const JointDistribution& target, const ShiftSpec& spec) {
  switch (spec.kind) {
    case ShiftKind::CovariateShift: return apply_covariate_shift(target, spec.new_marginal);
    case ShiftKind::PosteriorDrift:
      require(spec.drift.has_value(), ErrorKind::InvalidArgument, "posterior drift needs phi");
      return apply_posterior_drift(target, *spec.drift);
    case ShiftKind::CSPD:
      require(spec.drift.has_value(), ErrorKind::InvalidArgument, "CSPD needs phi");
      return apply_cspd(target, *spec.drift, spec.new_marginal);
    case ShiftKind::TargetShift: return apply_target_shift(target, spec.new_prior);
    case ShiftKind::LDLN: return apply_ldln(target, spec.rho0, spec.rho1);
    case ShiftKind::SymmetricNoise: return apply_symmetric_noise(target, spec.nu);
    case ShiftKind::OneSidedPD:
      require(spec.psi.has_value(), ErrorKind::InvalidArgument, "one-sided noise needs psi");
      return apply_one_sided_pd(target, *spec.psi);
    case ShiftKind::Composition: {
      require(!spec.parts.empty(), ErrorKind::InvalidArgument, "composition needs at least one part");
      ShiftResult result{target, MonotoneMap::identity()};
      bool first = true;
      for (const auto& part : spec.parts) {
        ShiftResult step = apply_shift(result.source, part);
        result.phi = first ? step.phi : then(result.phi, step.phi);
        result.source = std::move(step.source);
        first = false;
      }
      return result;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unhandled shift kind");
}

std::vector<LabeledSample> sample_noisy_labels(const JointDistribution& target, const ShiftSpec& noise,
                                               std::int64_t count, std::uint64_t seed) {
  require(noise.is_label_noise(), ErrorKind::InvalidArgument, "sample_noisy_labels needs a label-noise spec");
  // validates the parameters exactly as the distributional construction does
  (void)apply_shift(target, noise);

  auto samples = target.sample_labeled(count, seed);
  Rng rng(derive_seed(seed, 0x6e6f697365ULL));
  for (auto& s : samples) {
    double rate = 0.0;
    switch (noise.kind) {
      case ShiftKind::LDLN: rate = s.label == 0 ? noise.rho0 : noise.rho1; break;
      case ShiftKind::SymmetricNoise: rate = noise.nu; break;
      case ShiftKind::OneSidedPD: rate = s.label == 0 ? (*noise.psi)(target.posterior_or_prior(s.features)) : 0.0; break;
      default: break;
    }
    if (bernoulli(rng, rate)) s.label = 1 - s.label;
  }
  return samples;
}

}  // namespace cdr
