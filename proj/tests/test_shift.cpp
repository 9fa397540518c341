#include "cdr/error.hpp"
#include "cdr/monotone_map.hpp"
#include "cdr/shift.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cdr;

namespace {

FeatureDomain grid5() {
  std::vector<Feature> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(scalar_feature(i));
  return FeatureDomain::discrete_grid(pts);
}

const double kEta[] = {0.1, 0.2, 0.3, 0.5, 0.8};

Eigen::VectorXd eta_table() {
  Eigen::VectorXd e(5);
  e << 0.1, 0.2, 0.3, 0.5, 0.8;
  return e;
}

JointDistribution with_marginal(const Eigen::VectorXd& m) {
  const auto d = grid5();
  return JointDistribution::from_marginal_and_posterior(
      std::make_shared<TablePmf>(d, m), [](const Feature& x) { return kEta[static_cast<int>(x[0])]; }, eta_table());
}

JointDistribution uniform_fixture() { return with_marginal(Eigen::VectorXd::Constant(5, 0.2)); }

JointDistribution s1_fixture() {
  Eigen::VectorXd m(5);
  m << 0.3, 0.2, 0.25, 0.15, 0.1;
  return with_marginal(m);
}

DensityPtr reweighted() {
  Eigen::VectorXd m(5);
  m << 0.4, 0.3, 0.15, 0.1, 0.05;
  return std::make_shared<TablePmf>(grid5(), m);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

void expect_same_law(const JointDistribution& a, const JointDistribution& b, double tol = 1e-12) {
  EXPECT_NEAR(a.prior(), b.prior(), tol);
  EXPECT_LE((a.density0_table() - b.density0_table()).cwiseAbs().maxCoeff(), tol);
  EXPECT_LE((a.density1_table() - b.density1_table()).cwiseAbs().maxCoeff(), tol);
}

}  // namespace

TEST(MonotoneMap, ParsesTheBuiltInLibrary) {
  EXPECT_DOUBLE_EQ(MonotoneMap::parse("identity")(0.3), 0.3);
  EXPECT_DOUBLE_EQ(MonotoneMap::parse("square")(0.3), 0.09);
  EXPECT_NEAR(MonotoneMap::parse("affine(0.7, 0.1)")(0.5), 0.45, 1e-15);
  EXPECT_NEAR(MonotoneMap::parse("lr_scale(3)")(0.5), 0.75, 1e-15);
  for (const char* bad : {"", "cube", "affine(1)", "lr_scale(x)", "affine(1,2", "square()"})
    EXPECT_EQ(kind_of([&] { (void)MonotoneMap::parse(bad); }), ErrorKind::ScenarioFormat) << bad;
}

TEST(MonotoneMap, InverseByBisection) {
  const auto phi = MonotoneMap::lr_scale(3.0);
  for (double u : {0.0, 0.01, 0.3, 0.77, 1.0}) EXPECT_NEAR(phi.inverse(phi(u)), u, 1e-12);
}

TEST(MonotoneMap, ValidationRejectsFlatAndOutOfRangeMaps) {
  EXPECT_EQ(kind_of([] { validate_strictly_increasing(MonotoneMap("half", [](double) { return 0.5; })); }),
            ErrorKind::NonMonotoneMap);
  EXPECT_EQ(kind_of([] { validate_strictly_increasing(MonotoneMap::affine(2.0, 0.0)); }), ErrorKind::NonMonotoneMap);
  EXPECT_NO_THROW(validate_strictly_increasing(MonotoneMap::square()));
}

TEST(MonotoneMap, ThenComposesInApplicationOrder) {
  const auto f = then(MonotoneMap::square(), MonotoneMap::affine(0.5, 0.25));
  EXPECT_NEAR(f(0.4), 0.5 * 0.16 + 0.25, 1e-15);
}

TEST(CovariateShift, IdentityShiftReturnsQ) {
  const auto q = s1_fixture();
  const auto r = apply_covariate_shift(q, q.marginal_density());
  expect_same_law(r.source, q);
}

TEST(CovariateShift, ReweightedFivePointFixture) {
  const auto q = uniform_fixture();
  const auto r = apply_covariate_shift(q, reweighted());
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.source.posterior(scalar_feature(i)), kEta[i], 1e-14);
  // 0.4*0.1 + 0.3*0.2 + 0.15*0.3 + 0.1*0.5 + 0.05*0.8
  EXPECT_NEAR(r.source.prior(), 0.235, 1e-14);
  EXPECT_NEAR(r.source.marginal(scalar_feature(0)), 0.4, 1e-14);
}

TEST(CovariateShift, SupportViolation) {
  Eigen::VectorXd m(5);
  m << 0.5, 0.5, 0, 0, 0;
  const auto narrow = std::make_shared<TablePmf>(grid5(), m);
  EXPECT_EQ(kind_of([&] { (void)apply_covariate_shift(s1_fixture(), narrow); }), ErrorKind::SupportViolation);
}

TEST(PosteriorDrift, SquareMapOnFixture) {
  const auto q = s1_fixture();
  const auto r = apply_posterior_drift(q, MonotoneMap::square());
  const double m[] = {0.3, 0.2, 0.25, 0.15, 0.1};
  double prior = 0.0;
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(r.source.posterior(scalar_feature(i)), kEta[i] * kEta[i], 1e-14);
    EXPECT_NEAR(r.source.marginal(scalar_feature(i)), m[i], 1e-14);
    prior += m[i] * kEta[i] * kEta[i];
  }
  EXPECT_NEAR(r.source.prior(), prior, 1e-14);  // 0.1215
}

TEST(PosteriorDrift, IdentityReturnsQAndConstantIsRejected) {
  const auto q = s1_fixture();
  expect_same_law(apply_posterior_drift(q, MonotoneMap::identity()).source, q);
  EXPECT_EQ(kind_of([&] { (void)apply_posterior_drift(q, MonotoneMap("half", [](double) { return 0.5; })); }),
            ErrorKind::NonMonotoneMap);
}

TEST(PosteriorDrift, DegeneratePrior) {
  EXPECT_EQ(kind_of([] { (void)apply_posterior_drift(s1_fixture(), MonotoneMap::affine(1e-11, 0.0)); }),
            ErrorKind::DegeneratePrior);
}

TEST(Cspd, LikelihoodRatioMapWithReweightedMarginal) {
  const auto q = uniform_fixture();
  const auto phi = MonotoneMap("lr3", [](double u) { return u / (u + (1 - u) * 3); });
  const auto r = apply_cspd(q, phi, reweighted());
  const double m[] = {0.4, 0.3, 0.15, 0.1, 0.05};
  double prior = 0.0;
  for (int i = 0; i < 5; ++i) prior += m[i] * kEta[i] / (kEta[i] + (1 - kEta[i]) * 3);
  EXPECT_NEAR(r.source.prior(), prior, 1e-14);
  for (int i = 0; i < 5; ++i) {
    const double ep = kEta[i] / (kEta[i] + (1 - kEta[i]) * 3);
    EXPECT_NEAR(r.source.density1_table()[i], m[i] * ep / prior, 1e-13);
    EXPECT_NEAR(r.source.density0_table()[i], m[i] * (1 - ep) / (1 - prior), 1e-13);
  }
}

TEST(Cspd, IdentityAndSameMarginalReturnsQ) {
  const auto q = s1_fixture();
  expect_same_law(apply_cspd(q, MonotoneMap::identity(), q.marginal_density()).source, q);
}

TEST(Cspd, TargetShiftThenNoiseIsOneCspd) {
  const auto q = s1_fixture();
  const auto spec = ShiftSpec::composition({ShiftSpec::target_shift(0.6), ShiftSpec::ldln(0.1, 0.2)});
  const auto composed = apply_shift(q, spec);
  const auto single = apply_cspd(q, composed.phi, apply_target_shift(q, 0.6).source.marginal_density());
  expect_same_law(composed.source, single.source, 1e-12);
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(composed.source.posterior_table()[i], composed.phi(q.posterior_table()[i]), 1e-12);
}

TEST(TargetShift, OddsRatioMap) {
  const auto d = grid5();
  Eigen::VectorXd q0(5), q1(5);
  q0 << 0.4, 0.3, 0.1, 0.1, 0.1;
  q1 << 0.1, 0.1, 0.2, 0.3, 0.3;
  JointDistribution q(0.5, std::make_shared<TablePmf>(d, q0), std::make_shared<TablePmf>(d, q1));
  const auto r = apply_target_shift(q, 0.8);
  EXPECT_NEAR(r.phi(0.5), 0.8, 1e-15);  // r = 4
  EXPECT_EQ(r.source.density0(), q.density0());
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.source.posterior_table()[i], r.phi(q.posterior_table()[i]), 1e-12);
  EXPECT_NO_THROW(validate_strictly_increasing(r.phi));
  EXPECT_EQ(apply_target_shift(q, 0.5).phi.name(), "identity");
}

TEST(Ldln, AffineMapAndLimits) {
  const auto q = s1_fixture();
  expect_same_law(apply_ldln(q, 0.0, 0.0).source, q);
  const auto r = apply_ldln(q, 0.1, 0.2);
  EXPECT_NEAR(r.source.posterior(scalar_feature(3)), 0.45, 1e-14);
  EXPECT_LE((r.source.marginal_table() - q.marginal_table()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(kind_of([&] { (void)apply_ldln(q, 0.6, 0.4); }), ErrorKind::NoiseTooLarge);
}

TEST(Ldln, SymmetricNoiseContractsAroundOneHalf) {
  const auto q = s1_fixture();
  const double nu = 0.15;
  const auto r = apply_symmetric_noise(q, nu);
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(r.source.posterior_table()[i] - 0.5, (1 - 2 * nu) * (kEta[i] - 0.5), 1e-14);
}

TEST(OneSidedNoise, Examples) {
  const auto q = s1_fixture();
  const auto none = apply_one_sided_pd(q, MonotoneMap("zero", [](double) { return 0.0; }));
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(none.source.posterior_table()[i], kEta[i], 1e-14);
  EXPECT_NEAR(one_sided_noise_posterior(0.6, 0.3), 0.72, 1e-15);
  EXPECT_DOUBLE_EQ(one_sided_noise_posterior(1.0, 0.9), 1.0);
  const auto half = apply_one_sided_pd(q, MonotoneMap::affine(0.5, 0.0));
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(half.source.posterior_table()[i], 1 - (1 - kEta[i] / 2) * (1 - kEta[i]), 1e-14);
}

TEST(OneSidedNoise, InducesStrictlyIncreasingPosteriorMap) {
  const auto r = apply_one_sided_pd(s1_fixture(), MonotoneMap::affine(0.5, 0.0));
  EXPECT_NO_THROW(validate_strictly_increasing(r.phi));
  const auto& ep = r.source.posterior_table();
  for (int i = 1; i < 5; ++i) EXPECT_GT(ep[i], ep[i - 1]);
}

TEST(OneSidedNoise, RejectsRatesOutsideUnitInterval) {
  EXPECT_THROW((void)apply_one_sided_pd(s1_fixture(), MonotoneMap::affine(1.0, 0.0)), Error);
  EXPECT_THROW((void)apply_one_sided_pd(s1_fixture(), MonotoneMap::affine(-0.5, 0.5)), Error);
}

TEST(NoisySampling, ZeroNoiseEqualsCleanSampling) {
  const auto q = s1_fixture();
  const auto noisy = sample_noisy_labels(q, ShiftSpec::ldln(0.0, 0.0), 1000, 77);
  const auto clean = q.sample_labeled(1000, 77);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_EQ(noisy[i].label, clean[i].label);
    EXPECT_EQ(noisy[i].features[0], clean[i].features[0]);
  }
}

TEST(NoisySampling, LabelDependentFlipRates) {
  const auto q = s1_fixture();
  const int n = 100000;
  const auto noisy = sample_noisy_labels(q, ShiftSpec::ldln(0.1, 0.2), n, 5);
  const auto clean = q.sample_labeled(n, 5);
  double n0 = 0, n1 = 0, f0 = 0, f1 = 0;
  for (int i = 0; i < n; ++i) {
    (clean[i].label ? n1 : n0) += 1;
    (clean[i].label ? f1 : f0) += noisy[i].label != clean[i].label;
  }
  EXPECT_LE(std::abs(f0 / n0 - 0.1), 4 * std::sqrt(0.1 * 0.9 / n0));
  EXPECT_LE(std::abs(f1 / n1 - 0.2), 4 * std::sqrt(0.2 * 0.8 / n1));
}

TEST(NoisySampling, EmpiricalPosteriorMatchesAffineMap) {
  const auto q = s1_fixture();
  const int n = 100000;
  const auto noisy = sample_noisy_labels(q, ShiftSpec::ldln(0.1, 0.2), n, 6);
  double count[5] = {}, ones[5] = {};
  for (const auto& s : noisy) {
    count[static_cast<int>(s.features[0])] += 1;
    ones[static_cast<int>(s.features[0])] += s.label;
  }
  for (int i = 0; i < 5; ++i) {
    const double p = 0.7 * kEta[i] + 0.1;
    EXPECT_LE(std::abs(ones[i] / count[i] - p), 4 * std::sqrt(p * (1 - p) / count[i])) << i;
  }
}

TEST(NoisySampling, RequiresNoiseKind) {
  EXPECT_THROW((void)sample_noisy_labels(s1_fixture(), ShiftSpec::target_shift(0.5), 10, 1), Error);
}

TEST(ShiftInvariants, PhiConsistencyOnEveryKind) {
  const auto q = s1_fixture();
  const std::vector<ShiftSpec> specs = {
      ShiftSpec::covariate_shift(reweighted()),
      ShiftSpec::posterior_drift(MonotoneMap::square()),
      ShiftSpec::cspd(MonotoneMap::lr_scale(3), reweighted()),
      ShiftSpec::target_shift(0.6),
      ShiftSpec::ldln(0.1, 0.2),
      ShiftSpec::symmetric_noise(0.2),
      ShiftSpec::one_sided_pd(MonotoneMap::affine(0.5, 0.0)),
      ShiftSpec::composition({ShiftSpec::posterior_drift(MonotoneMap::square()), ShiftSpec::ldln(0.05, 0.1)}),
  };
  for (const auto& spec : specs) {
    const auto r = apply_shift(q, spec);
    for (int i = 0; i < 5; ++i)
      EXPECT_LT(std::abs(r.source.posterior_table()[i] - r.phi(q.posterior_table()[i])), 1e-9)
          << to_string(spec.kind);
    if (spec.kind == ShiftKind::CovariateShift) {
      EXPECT_LE((r.source.posterior_table() - q.posterior_table()).cwiseAbs().maxCoeff(), 1e-14);
    }
    if (spec.is_label_noise() || spec.kind == ShiftKind::PosteriorDrift) {
      EXPECT_LE((r.source.marginal_table() - q.marginal_table()).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(ShiftInvariants, ContinuousCspdKeepsPhiRelation) {
  const auto box = FeatureDomain::continuous_box(Eigen::VectorXd::Constant(1, -4), Eigen::VectorXd::Constant(1, 4),
                                                 Eigen::VectorXi::Constant(1, 400));
  auto g = [&](double mu, double var) {
    return std::make_shared<GaussianMixture>(
        box, std::vector<GaussianComponent>{{1.0, Eigen::VectorXd::Constant(1, mu), Eigen::VectorXd::Constant(1, var)}});
  };
  JointDistribution q(0.5, g(-1, 1), g(1, 1));
  const auto r = apply_cspd(q, MonotoneMap::lr_scale(3), g(0.5, 2.25));
  for (double x : {-3.9, -1.0, 0.0, 0.7, 3.9}) {
    const Feature f = scalar_feature(x);
    EXPECT_NEAR(r.source.posterior(f), MonotoneMap::lr_scale(3)(q.posterior(f)), 1e-9);
    EXPECT_NEAR(r.source.marginal(f), (*g(0.5, 2.25))(f), 1e-9);
  }
  const auto draws = r.source.sample_labeled(2000, 3);
  for (const auto& s : draws) EXPECT_TRUE(box.contains(s.features));
}
