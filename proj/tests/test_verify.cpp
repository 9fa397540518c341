#include "cdr/scenario.hpp"
#include "cdr/verify.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace cdr;

TEST(Verify, SuitePasses) {
  const auto report = run_verify_suite();
  EXPECT_TRUE(report.ok());
  EXPECT_GT(report.checks.size(), 10u);
  for (const auto& c : report.checks) EXPECT_FALSE(c.failed()) << c.fixture << " " << c.property << " " << c.detail;
}

TEST(Verify, CorruptedMapIsReported) {
  VerifyOptions options;
  options.random_fixtures = 5;
  options.inject_corrupted_phi = true;
  const auto report = run_verify_suite(options);
  EXPECT_FALSE(report.ok());
  bool found = false;
  for (const auto& c : report.checks)
    if (c.failed()) {
      found = true;
      EXPECT_NE(c.detail.find("NonMonotoneMap"), std::string::npos) << c.detail;
    }
  EXPECT_TRUE(found);
}

TEST(Verify, CsvLayout) {
  VerifyOptions options;
  options.random_fixtures = 3;
  std::ostringstream out;
  write_verify_csv(out, run_verify_suite(options));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "fixture,property,status,max_error");
  while (std::getline(in, line)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3) << line;
}

TEST(Verify, SupDeviationHandExample) {
  Eigen::VectorXd scores(3), mass(3);
  scores << 0.2, 0.5, 0.9;
  mass << 0.5, 0.3, 0.2;
  // sample all at 0.9: at t just above 0.5 mass 0.2 vs fraction 1
  EXPECT_NEAR(sup_threshold_deviation(scores, mass, {0.9, 0.9}), 0.8, 1e-15);
  EXPECT_NEAR(sup_threshold_deviation(scores, mass, {0.2, 0.2, 0.2, 0.2, 0.2, 0.5, 0.5, 0.5, 0.9, 0.9}), 0.0, 1e-15);
}

TEST(Verify, ImmunityOnShiftedGrids) {
  for (const char* name : {"S4", "S5", "S6"}) {
    const auto c = immunity_check(builtin_scenario(name), 0.25);
    EXPECT_TRUE(c.agree()) << name;
    EXPECT_EQ(c.points, 5);
  }
}

TEST(Verify, RankingInversionsZeroForPureRatio) {
  EXPECT_EQ(ranking_inversions(builtin_scenario("S1").target, 0.0, 1.0), 0);
  EXPECT_EQ(ranking_inversions(builtin_scenario("S1").target, 0.3, 1.0), 0);
}
