#include "cdr/metrics.hpp"
#include "cdr/scenario.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cdr;

namespace {

Eigen::VectorXd set_of(std::initializer_list<double> v) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) g[i++] = x;
  return g;
}

}  // namespace

TEST(SymDiff, HandMasses) {
  const auto s1 = builtin_scenario("S1");  // Q_X = (0.3, 0.2, 0.25, 0.15, 0.1)
  EXPECT_NEAR(sym_diff(s1.target, set_of({1, 0, 0, 1, 1}), set_of({0, 0, 0, 1, 1})), 0.3, 1e-15);
  EXPECT_NEAR(sym_diff(s1.target, set_of({1, 1, 0, 0, 0}), set_of({0, 0, 1, 1, 1})), 1.0, 1e-12);
  EXPECT_EQ(sym_diff(s1.target, set_of({0, 1, 0, 1, 0}), set_of({0, 1, 0, 1, 0})), 0.0);
  EXPECT_THROW((void)sym_diff(s1.target, set_of({1}), set_of({0})), Error);
}

TEST(SymDiffBound, HandExampleAndRandomPairs) {
  const auto s1 = builtin_scenario("S1");
  // G = {3,4}, G' = {4}: B gap 0.075/0.3, A gap 0.075/0.7, mass 0.15
  const auto c = sym_diff_bound_check(s1.target, 0.5, set_of({0, 0, 0, 1, 1}), set_of({0, 0, 0, 0, 1}));
  EXPECT_NEAR(c.lhs, 0.5 * 0.25 + 0.5 * 0.075 / 0.7, 1e-14);
  EXPECT_NEAR(c.rhs, (0.5 / 0.3 + 0.5 / 0.7) * 0.15, 1e-14);
  EXPECT_TRUE(c.holds);

  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    Eigen::VectorXd g(5), h(5);
    for (int i = 0; i < 5; ++i) {
      g[i] = coin(rng);
      h[i] = coin(rng);
    }
    EXPECT_TRUE(sym_diff_bound_check(s1.target, u(rng), g, h).holds);
  }
  EXPECT_THROW((void)sym_diff_bound_check(s1.target, 1.5, set_of({0, 0, 0, 0, 0}), set_of({0, 0, 0, 0, 0})), Error);
}

TEST(Evaluate, OracleSetScoresPerfectly) {
  const auto s1 = builtin_scenario("S1");
  const LevelSet oracle = optimal_cdr_set(s1.source, s1.target, 0.25);
  const auto r = evaluate_membership(s1.source, s1.target, 0.25, oracle.membership);
  EXPECT_EQ(r.mode, EvalMode::ExactGrid);
  EXPECT_EQ(r.sym_diff_risk, 0.0);
  EXPECT_EQ(r.power_gap, 0.0);
  EXPECT_NEAR(r.discovery_rate, 0.25, 1e-12);
  EXPECT_NEAR(r.size, (0.15 * 0.5 + 0.1 * 0.2) / 0.7, 1e-12);
  EXPECT_LE(r.constraint_violation, 1e-12);
}

TEST(Evaluate, HandCheckedWrongSet) {
  const auto s1 = builtin_scenario("S1");
  // accept points {2,3,4}: extra mass 0.25 in the symmetric difference
  const auto r = evaluate_membership(s1.source, s1.target, 0.25, set_of({0, 0, 1, 1, 1}));
  EXPECT_NEAR(r.sym_diff_risk, 0.25, 1e-12);
  EXPECT_NEAR(r.power_gap, -0.075 / 0.3, 1e-12);
  EXPECT_NEAR(r.discovery_rate, 0.5, 1e-12);
  EXPECT_NEAR(r.constraint_violation, 0.25, 1e-12);
}

TEST(Evaluate, QuadratureOnBox) {
  const auto s2 = builtin_scenario("S2");
  const LevelSet oracle = optimal_cdr_set(s2.source, s2.target, 0.25);
  const auto r = evaluate_membership(s2.source, s2.target, 0.25, oracle.membership);
  EXPECT_EQ(r.mode, EvalMode::Quadrature);
  EXPECT_NEAR(r.discovery_rate, 0.25, 1e-3);
  EXPECT_EQ(r.sym_diff_risk, 0.0);
}

TEST(Evaluate, MonteCarloMatchesExact) {
  const auto s1 = builtin_scenario("S1");
  SetEstimate est;
  est.score = std::make_shared<GridTableScore>(s1.target.domain(), set_of({0.1, 0.2, 0.9, 0.5, 0.8}), 0.0);
  est.threshold = 0.5;
  const auto exact = evaluate_estimate(s1.source, s1.target, 0.25, est);
  const auto mc = evaluate_estimate_monte_carlo(s1.source, s1.target, 0.25, est, 7);
  EXPECT_EQ(mc.mode, EvalMode::MonteCarlo);
  EXPECT_EQ(mc.monte_carlo_samples, kMonteCarloEvalSamples);
  EXPECT_NEAR(mc.sym_diff_risk, exact.sym_diff_risk, 5 * mc.sym_diff_standard_error);
  EXPECT_NEAR(mc.discovery_rate, exact.discovery_rate, 0.01);
  EXPECT_NEAR(mc.size, exact.size, 0.01);
  EXPECT_NEAR(mc.power_gap, exact.power_gap, 0.02);
}

TEST(Evaluate, PropagatesAssumptionA) {
  const auto s1 = builtin_scenario("S1");
  try {
    (void)evaluate_membership(s1.source, s1.target, 0.2, set_of({0, 0, 0, 0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AssumptionAViolated);
  }
}

TEST(Csv, HeaderAndRow) {
  EXPECT_EQ(eval_csv_header(),
            "scenario,method,m,n,alpha,beta,gamma,seed,sym_diff_risk,power_gap,discovery_rate,size,"
            "constraint_violation,mode");
  EvalContext ctx{"S1", "OrderStatistic", 500, 600, 0.25, 0.05, 0.02, 42};
  EvalReport r;
  r.sym_diff_risk = 0.1;
  r.power_gap = -0.5;
  r.discovery_rate = 0.25;
  r.size = 1.0 / 3.0;
  r.constraint_violation = 0.0;
  EXPECT_EQ(to_csv_row(ctx, r), "S1,OrderStatistic,500,600,0.25,0.05,0.02,42,0.1,-0.5,0.25,0.3333333333333333,0,ExactGrid");
  EXPECT_EQ(format_number(std::nan("")), "");
  EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
}
