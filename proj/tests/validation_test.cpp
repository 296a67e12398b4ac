#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "greenlb/engine.hpp"
#include "greenlb/error.hpp"
#include "greenlb/validation.hpp"

namespace greenlb {
namespace {

TEST(Delta, Basics) {
  EXPECT_EQ(delta(3.0, 3.0), 0.0);
  EXPECT_EQ(delta(1.0, 2.0), 1.0);
  EXPECT_EQ(delta(2.0, 1.0), 1.0);
  EXPECT_THROW(delta(0.0, 1.0), DataError);
  EXPECT_THROW(delta(1.0, -1.0), DataError);
}

TEST(Delta, SymmetryAndPowerOfTwoScaling) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.01, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(g), b = u(g);
    EXPECT_EQ(delta(a, b), delta(b, a));
    EXPECT_EQ(delta(a, a), 0.0);
    // Scaling by a power of two is exact in binary floating point.
    EXPECT_EQ(delta(8.0 * a, 8.0 * b), delta(a, b));
    EXPECT_GE(delta(a, b), 0.0);
  }
}

TEST(Delta, TriangleInequalityFails) {
  EXPECT_GT(delta(1.0, 4.0), delta(1.0, 2.0) + delta(2.0, 4.0));
}

TEST(Md1, ClosedForm) {
  EXPECT_EQ(md1_mean_latency(0.5, 1.0), 1.5);
  EXPECT_EQ(md1_mean_latency(0.0, 1.0), 1.0);
  EXPECT_NEAR(md1_mean_latency(0.8, 1.0), 3.0, 1e-12);
  EXPECT_THROW(md1_mean_latency(1.0, 1.0), DataError);
}

TEST(Md1, SimulationAgrees) {
  for (double lambda : {0.3, 0.5, 0.8}) {
    SimConfig c;
    c.num_servers = 1;
    c.initial_state = PowerState::On;
    c.power.timeout = kNever;
    c.policy = policy::lit(0);
    c.arrival_rate = lambda;
    c.stop = StopAfterRequests{1'000'000};
    c.warmup = 1000.0;
    c.seed = 42;
    const auto r = run(c);
    const double expected = md1_mean_latency(lambda, 1.0);
    EXPECT_NEAR(r.avg_latency, expected, 0.02 * expected) << "lambda " << lambda;
  }
}

const std::vector<Seconds> kTrace{0.87, 0.91, 1.46, 2.03, 3.54, 4.68, 5.42, 5.52,
                                  5.66, 7.26, 9.61, 10.34, 12.01, 13.04, 13.52};
const std::vector<int> kServer{3, 0, 3, 2, 0, 2, 0, 3, 2, 2, 1, 0, 3, 1, 1};

TEST(ReplayOracle, IllustrativeTraceByHand) {
  const auto r = replay_oracle(kTrace, kServer, ReplayConfig{});
  // Server 0 wakes at 0.91, is On at 10.91 and then serves back to back.
  EXPECT_NEAR(r.latencies[1], 11.0, 1e-12);
  EXPECT_NEAR(r.latencies[4], 9.37, 1e-12);
  EXPECT_NEAR(r.latencies[6], 8.49, 1e-12);
  EXPECT_NEAR(r.latencies[11], 4.57, 1e-12);
}

TEST(ReplayOracle, MatchesEngineOnIllustrativeTrace) {
  SimConfig c;
  c.warmup = 0.0;
  c.stop = StopAfterRequests{kTrace.size()};
  c.arrival_times = kTrace;
  c.forced_assignments = kServer;
  const auto sim = simulate(c);
  const auto oracle = replay_oracle(kTrace, kServer, ReplayConfig{});
  for (std::size_t i = 0; i < kTrace.size(); ++i) {
    EXPECT_EQ(*sim.requests[i].latency(), oracle.latencies[i]) << i;
  }
  EXPECT_EQ(sim.horizon, oracle.horizon);
}

TEST(ReplayOracle, EmptyTraceSleepsThroughout) {
  ReplayConfig cfg;
  cfg.horizon = 100.0;
  const auto r = replay_oracle({}, {}, cfg);
  EXPECT_TRUE(r.latencies.empty());
  EXPECT_EQ(r.energy, 4 * 14.0 * 100.0);
}

TEST(ReplayOracle, RejectsInconsistentTraces) {
  const std::vector<Seconds> t{1.0, 2.0};
  EXPECT_THROW(replay_oracle(t, std::vector<int>{0}, ReplayConfig{}), DataError);
  EXPECT_THROW(replay_oracle(t, std::vector<int>{0, 4}, ReplayConfig{}), DataError);
  const std::vector<Seconds> back{2.0, 1.0};
  EXPECT_THROW(replay_oracle(back, std::vector<int>{0, 0}, ReplayConfig{}), DataError);
}

ResultsTable table(const std::string& csv) {
  std::istringstream in(csv);
  return read_csv(in);
}

TEST(Compare, SharesBelowThresholds) {
  const auto a = table(
      "q,TO,nd,status,AL,AP_total\n"
      "1,1,random,ok,1.0,100\n"
      "1,1,random,ok,3.0,300\n"
      "5,1,random,ok,2.0,100\n"
      "9,1,random,ok,2.0,100\n");
  const auto b = table(
      "q,TO,nd,status,AL,AP_total\n"
      "1,1,random,ok,2.0,210\n"
      "5,1,random,ok,2.5,100\n"
      "7,1,random,ok,2.0,100\n");
  const auto r = compare(a, b);
  ASSERT_EQ(r.designs.size(), 2u);
  EXPECT_EQ(r.designs[0].delta_latency, 0.0);
  EXPECT_NEAR(r.designs[0].delta_power, 0.05, 1e-12);
  EXPECT_EQ(r.designs[1].delta_latency, 0.25);
  EXPECT_EQ(r.unmatched, 2u);
  EXPECT_EQ(r.latency_below[0], 0.5);  // < 0.06
  EXPECT_EQ(r.latency_below[4], 1.0);  // < 0.3
  EXPECT_EQ(r.power_below[0], 1.0);
}

}  // namespace
}  // namespace greenlb
