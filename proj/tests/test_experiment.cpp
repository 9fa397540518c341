#include "cdr/experiment.hpp"
#include "cdr/random.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace cdr;
using nlohmann::json;

namespace {

ExperimentPlan small_plan() {
  return plan_from_json(json::parse(R"({"scenario":"S1","methods":["OrderStatistic"],
    "ladder":[[50,60],{"m":200,"n":100}],"alphas":[0.25,0.5],"replicates":3,"seed":11,"out":""})"));
}

// drops the trailing wall-time column
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

struct SeedGuard {
  SeedGuard() { ::unsetenv("CDR_SEED"); }
  ~SeedGuard() { ::unsetenv("CDR_SEED"); }
};

}  // namespace

TEST(Plan, ParsesAllLadderForms) {
  const auto plan = plan_from_json(json::parse(R"({"scenario":"S2","methods":["klr","histogram"],
    "ladder":[[1,2],{"m":3,"n":4},5],"alphas":0.1,"replicates":2,"seed":7,"out":"x.csv",
    "betas":[0.01,0.02],"gamma":0.03,"workers":2,"deviation_constant":1.5,"klr":{"lambda":0.2}})"));
  ASSERT_EQ(plan.ladder.size(), 3u);
  EXPECT_EQ(plan.ladder[0].m, 1);
  EXPECT_EQ(plan.ladder[1].n, 4);
  EXPECT_EQ(plan.ladder[2].m, 5);
  EXPECT_EQ(plan.ladder[2].n, 5);
  EXPECT_EQ(plan.methods[0], EstimatorMethod::KlrThreshold);
  EXPECT_EQ(plan.alphas, std::vector<double>{0.1});
  EXPECT_EQ(plan.betas.size(), 2u);
  EXPECT_EQ(plan.gammas, std::vector<double>{0.03});
  EXPECT_EQ(plan.workers, 2);
  EXPECT_EQ(plan.deviation_constant, 1.5);
  EXPECT_EQ(*plan.klr.lambda, 0.2);
  EXPECT_EQ(plan.out, "x.csv");
}

TEST(Plan, RejectsBadPlans) {
  EXPECT_THROW(plan_from_json(json::parse(R"({"scenario":"S1"})")), Error);
  EXPECT_THROW(plan_from_json(json::parse(R"({"scenario":"S1","methods":[],"ladder":[1],"alphas":[0.1],
    "replicates":1,"seed":1})")), Error);
  EXPECT_THROW(plan_from_json(json::parse(R"({"scenario":"S1","methods":["klr"],"ladder":[0],"alphas":[0.1],
    "replicates":1,"seed":1})")), Error);
  EXPECT_THROW(plan_from_json(json::parse(R"({"scenario":"S1","methods":["klr"],"ladder":[1],"alphas":[1.0],
    "replicates":1,"seed":1})")), Error);
  EXPECT_THROW(load_plan_file("/nonexistent/plan.json"), Error);
}

TEST(Seeds, EnvironmentOverride) {
  SeedGuard guard;
  EXPECT_EQ(master_seed(5), 5u);
  ::setenv("CDR_SEED", "123", 1);
  EXPECT_EQ(master_seed(5), 123u);
  ::setenv("CDR_SEED", "12x", 1);
  EXPECT_THROW(master_seed(5), Error);
}

TEST(Seeds, ReplicateSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (int cell = 0; cell < 20; ++cell)
    for (int rep = 0; rep < 50; ++rep) seen.insert(replicate_seed(9, cell, rep));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(replicate_seed(9, 3, 4), derive_seed(9, 3, 4));
}

TEST(Run, RecordsComeInPlanOrder) {
  SeedGuard guard;
  const auto plan = small_plan();
  std::ostringstream csv;
  const auto records = run_plan(plan, &csv);
  ASSERT_EQ(records.size(), 2u * 2u * 3u);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].cell, static_cast<std::int64_t>(i / 3));
    EXPECT_EQ(records[i].replicate, static_cast<int>(i % 3));
    EXPECT_EQ(records[i].context.seed, replicate_seed(11, records[i].cell, records[i].replicate));
  }
  EXPECT_EQ(records[0].context.m, 50);
  EXPECT_EQ(records[0].context.n, 60);
  EXPECT_EQ(records[3].context.alpha, 0.5);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, record_csv_header());
  EXPECT_EQ(header.rfind("wall_time_s"), header.size() - 11);
}

TEST(Run, ReplicateMatchesDirectCall) {
  SeedGuard guard;
  const auto records = run_plan(small_plan());
  const auto& r = records[4];
  ASSERT_EQ(r.status, "ok");
  EstimatorConfig config;
  const auto direct = run_replicate(builtin_scenario("S1"), config, {50, 60}, 0.5, r.context.seed);
  EXPECT_EQ(direct.report.sym_diff_risk, r.report.sym_diff_risk);
  EXPECT_EQ(direct.estimate.threshold, r.threshold);
}

TEST(Run, DeterministicAcrossWorkerCounts) {
  SeedGuard guard;
  auto plan = small_plan();
  std::ostringstream a, b, c;
  run_plan(plan, &a);
  run_plan(plan, &b);
  plan.workers = 3;
  run_plan(plan, &c);
  EXPECT_EQ(without_wall_time(a.str()), without_wall_time(b.str()));
  EXPECT_EQ(without_wall_time(a.str()), without_wall_time(c.str()));
}

TEST(Run, EnvironmentSeedChangesResults) {
  SeedGuard guard;
  const auto plan = small_plan();
  const auto base = run_plan(plan);
  ::setenv("CDR_SEED", "11", 1);
  const auto same = run_plan(plan);
  ::setenv("CDR_SEED", "12", 1);
  const auto other = run_plan(plan);
  EXPECT_EQ(base[0].context.seed, same[0].context.seed);
  EXPECT_NE(base[0].context.seed, other[0].context.seed);
}

TEST(Run, ErrorsBecomeRows) {
  SeedGuard guard;
  // alpha = 0.2 on S1 has no level set of that mass; histogram on a box is unsupported
  auto plan = plan_from_json(json::parse(R"({"scenario":"S1","methods":["histogram"],"ladder":[[20,20]],
    "alphas":[0.2],"replicates":2,"seed":1,"out":""})"));
  auto records = run_plan(plan);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].status, "AssumptionAViolated");
  EXPECT_TRUE(std::isnan(records[0].report.sym_diff_risk));
  EXPECT_NE(to_csv_row(records[0]).find(",,"), std::string::npos);

  plan.scenario = "S2";
  plan.alphas = {0.25};
  records = run_plan(plan);
  EXPECT_EQ(records[0].status, "UnsupportedDomain");

  // rank floor(n(1-alpha)) = 0 with n = 1
  plan = plan_from_json(json::parse(R"({"scenario":"S1","methods":["histogram"],"ladder":[[5,1]],
    "alphas":[0.5],"replicates":1,"seed":1,"out":""})"));
  EXPECT_EQ(run_plan(plan)[0].status, "RankOutOfRange");
}

TEST(Run, UnknownScenarioThrows) {
  SeedGuard guard;
  auto plan = small_plan();
  plan.scenario = "S42";
  EXPECT_THROW(run_plan(plan), Error);
}

TEST(Csv, MessagesAreQuoted) {
  ExperimentRecord r;
  r.context = {"S1", "KlrThreshold", 1, 2, 0.1, 0.05, 0.02, 3};
  r.status = "InvalidArgument";
  r.message = "bad, \"very\" bad";
  r.wall_time_seconds = 0.5;
  const auto row = to_csv_row(r);
  EXPECT_NE(row.find(",\"bad, \"\"very\"\" bad\","), std::string::npos);
  EXPECT_EQ(row.substr(row.rfind(',') + 1), "0.5");
}

TEST(Plan, ShippedPlansParse) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(CDR_PLAN_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto plan = load_plan_file(entry.path().string());
    EXPECT_NO_THROW((void)resolve_scenario(plan.scenario)) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 1);
}
