#include <gtest/gtest.h>

#include <cmath>

#include "hyoc/bench.hpp"

using namespace hyoc;

namespace {

BenchRecord rec(int system, const std::string& method, double time, double objective,
                const std::string& status = "Optimal") {
  BenchRecord r;
  r.system = system;
  r.N = 2;
  r.x0 = VectorXd::Constant(1, 0.25);
  r.method = method;
  r.status = status;
  r.time_s = time;
  r.objective = objective;
  return r;
}

BenchConfig small_config() {
  BenchConfig c;
  c.n_systems = 2;
  c.dims = {{1, 1}};
  c.pieces_min = 2;
  c.pieces_max = 2;
  c.horizons = {2, 4};
  c.n_states = 5;
  c.starts = 2;
  c.include_example = false;
  return c;
}

}  // namespace

TEST(PerformanceProfile, SingleMethod) {
  const auto prof = performance_profile({rec(0, "a", 1.0, 1), rec(1, "a", 3.0, 1)}, {"a"});
  ASSERT_FALSE(prof.empty());
  EXPECT_DOUBLE_EQ(prof.front().tau, 1.0);
  EXPECT_DOUBLE_EQ(prof.front().rho.at("a"), 1.0);
}

TEST(PerformanceProfile, TwoMethodsHandComputed) {
  const std::vector<BenchRecord> rs{rec(0, "a", 1, 1), rec(0, "b", 2, 1), rec(1, "a", 2, 1), rec(1, "b", 1, 1)};
  const auto prof = performance_profile(rs, {"a", "b"});
  ASSERT_EQ(prof.size(), 2u);
  EXPECT_DOUBLE_EQ(prof[0].tau, 1.0);
  EXPECT_DOUBLE_EQ(prof[0].rho.at("a"), 0.5);
  EXPECT_DOUBLE_EQ(prof[0].rho.at("b"), 0.5);
  EXPECT_DOUBLE_EQ(prof[1].tau, 2.0);
  EXPECT_DOUBLE_EQ(prof[1].rho.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(prof[1].rho.at("b"), 1.0);
}

TEST(PerformanceProfile, FailedRunsNeverCount) {
  const std::vector<BenchRecord> rs{rec(0, "a", 1, 1), rec(0, "b", 0.5, 1, "IterationLimit")};
  const auto prof = performance_profile(rs, {"a", "b"});
  EXPECT_DOUBLE_EQ(prof.back().rho.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(prof.back().rho.at("b"), 0.0);
}

TEST(PerformanceProfile, MissingRecords) {
  try {
    performance_profile({rec(0, "a", 1, 1), rec(0, "b", 1, 1), rec(1, "a", 1, 1)}, {"a", "b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingRecords);
  }
}

TEST(GapStats, Definitions) {
  const std::vector<BenchRecord> rs{rec(0, "oracle", 1, 1.0), rec(0, "local", 1, 1.0), rec(1, "oracle", 1, 1.0),
                                    rec(1, "local", 1, 1.1), rec(2, "oracle", 1, 0.0), rec(2, "local", 1, 0.3)};
  const auto g = gap_stats(rs);
  ASSERT_EQ(g.gaps.size(), 3u);
  EXPECT_DOUBLE_EQ(g.gaps[0].gap, 0.0);
  EXPECT_NEAR(g.gaps[1].gap, 10.0, 1e-12);
  EXPECT_TRUE(g.gaps[2].absolute);
  EXPECT_NEAR(g.gaps[2].gap, 0.3, 1e-15);
  EXPECT_NEAR(g.fraction_global.at("local"), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(g.fraction_within_10.at("local"), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(g.instances.at("local"), 3);
}

TEST(GapStats, MissingOracle) {
  EXPECT_THROW(gap_stats({rec(0, "local", 1, 1)}), Error);
}

TEST(Csv, RoundTrip) {
  std::vector<BenchRecord> rs{rec(0, "oracle", 0.125, 1.0 / 3.0), rec(1, "local-sparse", 1e-7, INFINITY, "TimedOut")};
  rs[1].x0 = VectorXd(2);
  rs[1].x0 << -1.0 / 7.0, 2.5e-300;
  rs[0].s_stationary = true;
  rs[0].global_cert = true;
  const std::string text = emit_csv(rs);
  EXPECT_EQ(text.substr(0, text.find('\n')), "system,N,x0,method,status,time_s,objective,s_stationary,global_cert");
  const auto back = parse_csv(text);
  ASSERT_EQ(back.size(), rs.size());
  for (size_t i = 0; i < rs.size(); ++i) {
    EXPECT_TRUE(back[i].same_except_time(rs[i]));
    EXPECT_EQ(back[i].time_s, rs[i].time_s);
  }
  EXPECT_THROW(parse_csv("bad,header\n"), Error);
}

TEST(BenchConfig, Validation) {
  BenchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_states = 0;
  EXPECT_THROW(c.validate(), Error);
  c = BenchConfig{};
  c.pieces_max = 4;
  c.horizons = {6};
  EXPECT_THROW(c.validate(), Error);
  c = BenchConfig{};
  c.methods = {"ipopt"};
  EXPECT_THROW(c.validate(), Error);
}

TEST(RunBench, RecordCountAndDeterminism) {
  const auto cfg = small_config();
  const auto a = run_bench(cfg);
  EXPECT_EQ(a.size(), 2u * 2u * 5u * cfg.methods.size());
  const auto b = run_bench(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].same_except_time(b[i])) << i;
    EXPECT_GT(a[i].time_s, 0.0);
  }
  const auto g = gap_stats(a);
  EXPECT_LE(g.worst_violation, 1e-6);
  const auto prof = performance_profile(a, cfg.methods);
  for (size_t i = 1; i < prof.size(); ++i)
    for (const auto& m : cfg.methods) {
      EXPECT_GE(prof[i].rho.at(m), prof[i - 1].rho.at(m));
      EXPECT_LE(prof[i].rho.at(m), 1.0);
      EXPECT_GE(prof[i].rho.at(m), 0.0);
    }
}

TEST(RunBench, IncludedExample) {
  BenchConfig c = small_config();
  c.n_systems = 1;
  c.horizons = {2};
  c.n_states = 1;
  c.include_example = true;
  const auto rs = run_bench(c);
  bool found = false;
  for (const auto& r : rs)
    if (r.system == 1 && r.method == "oracle") {
      found = true;
      EXPECT_EQ(r.N, 1);
      EXPECT_EQ(r.x0, VectorXd::Zero(1));
      EXPECT_NEAR(r.objective, 0.5, 1e-9);
    }
  EXPECT_TRUE(found);
}
