#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "greenlb/engine.hpp"
#include "greenlb/error.hpp"

namespace greenlb {
namespace {

SimConfig explicit_trace(std::vector<Seconds> arrivals, std::optional<std::vector<int>> forced = {}) {
  SimConfig c;
  c.warmup = 0.0;
  c.stop = StopAfterRequests{arrivals.size()};
  c.arrival_times = std::move(arrivals);
  c.forced_assignments = std::move(forced);
  return c;
}

TEST(Interarrival, InversionOfTheExponentialCdf) {
  ScriptedUniforms draws({1.0 - std::exp(-1.0)});
  EXPECT_NEAR(generate_interarrival(draws, 1.0), 1.0, 1e-15);
  ScriptedUniforms half({0.5});
  EXPECT_NEAR(generate_interarrival(half, 2.0), std::log(2.0) / 2.0, 1e-15);
}

TEST(Interarrival, ZeroDrawIsRedrawn) {
  ScriptedUniforms draws({0.0, 0.0, 0.5});
  EXPECT_EQ(generate_interarrival(draws, 1.0), std::log(2.0));
  EXPECT_EQ(draws.consumed(), 3u);
}

TEST(Interarrival, SampleMeanMatchesRate) {
  RandomStream rng(99);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += generate_interarrival(rng, 1.0);
  EXPECT_NEAR(sum / n, 1.0, 0.01);
}

TEST(Engine, SingleRequestOnSleepingClusterWaitsForWakeup) {
  const auto sim = simulate(explicit_trace({3.7}));
  ASSERT_EQ(sim.requests.size(), 1u);
  EXPECT_EQ(*sim.requests[0].service_start, 13.7);
  EXPECT_NEAR(*sim.requests[0].latency(), 11.0, 1e-12);
}

TEST(Engine, ConstantArgmaxSendsEverythingToOneServer) {
  SimConfig c;
  c.policy = policy::parse_policy("0 - ID");
  c.arrival_rate = 5.0;
  c.stop = StopAfterRequests{400};
  const auto sim = simulate(c);
  EXPECT_EQ(sim.assignments, (std::vector<std::size_t>{400, 0, 0, 0}));
}

TEST(Engine, RequestBudgetIsExactAndEverythingDrains) {
  SimConfig c;
  const auto r = run(c);
  EXPECT_EQ(r.requests_arrived, 1500u);
  EXPECT_EQ(r.requests_completed, 1500u);
  std::size_t total = 0;
  for (auto a : r.assignments) total += a;
  EXPECT_EQ(total, 1500u);
}

TEST(Engine, TimeBudgetCutsAtHorizon) {
  SimConfig c;
  c.stop = StopAtTime{2000.0};
  const auto sim = simulate(c);
  EXPECT_EQ(sim.horizon, 2000.0);
  for (const auto& r : sim.requests) EXPECT_LE(r.arrival, 2000.0);
}

TEST(Engine, TimeoutBeatsArrivalAtTheSameInstant) {
  // Served 10..11, idle timeout fires at 16 just before the second arrival.
  auto c = explicit_trace({0.0, 16.0}, std::vector<int>{0, 0});
  c.power.timeout = 5.0;
  const auto sim = simulate(c);
  EXPECT_EQ(*sim.requests[0].completion, 11.0);
  EXPECT_EQ(*sim.requests[1].service_start, 36.0);
  EXPECT_EQ(*sim.requests[1].latency(), 21.0);
}

TEST(Engine, CompletionBeatsArrivalAtTheSameInstant) {
  const auto sim = simulate(explicit_trace({0.0, 11.0}, std::vector<int>{0, 0}));
  EXPECT_EQ(*sim.requests[1].service_start, 11.0);
  EXPECT_EQ(*sim.requests[1].latency(), 1.0);
}

TEST(Engine, PolicyFailureNamesTheRequest) {
  SimConfig c;
  c.policy = policy::parse_policy("1 / queueSize");
  try {
    simulate(c);
    FAIL() << "expected EvalError";
  } catch (const EvalError& e) {
    EXPECT_NE(std::string(e.what()).find("request #0"), std::string::npos) << e.what();
  }
}

TEST(Engine, ConfigValidation) {
  SimConfig c;
  c.num_servers = 0;
  EXPECT_THROW(simulate(c), ConfigError);
  c = SimConfig{};
  c.policy = policy::parse_policy("dspace(\"q\")");
  EXPECT_THROW(simulate(c), ConfigError);
  c = explicit_trace({2.0, 1.0});
  EXPECT_THROW(simulate(c), ConfigError);
  c = explicit_trace({1.0}, std::vector<int>{4});
  EXPECT_THROW(simulate(c), ConfigError);
}

std::vector<TraceRecord> traced(const SimConfig& c, Simulation* sim = nullptr) {
  std::vector<TraceRecord> out;
  auto s = simulate(c, [&](const TraceRecord& r) { out.push_back(r); });
  if (sim) *sim = std::move(s);
  return out;
}

bool same(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].time != b[i].time || a[i].server != b[i].server || a[i].event != b[i].event ||
        a[i].state != b[i].state || a[i].queue_size != b[i].queue_size) {
      return false;
    }
  }
  return true;
}

SimConfig threshold_policy_run(std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.policy = policy::parse_policy("-queueSize - dspace(\"q\") * (1 - stateOn)");
  c.design_params = {{"q", 5.0}};
  c.stop = StopAfterRequests{300};
  c.warmup = 0.0;
  return c;
}

TEST(EngineProperties, ReplayIsDeterministic) {
  for (std::uint64_t seed : {1u, 2u, 77u}) {
    const auto c = threshold_policy_run(seed);
    EXPECT_TRUE(same(traced(c), traced(c)));
  }
}

TEST(EngineProperties, ArrivalsDoNotDependOnThePolicy) {
  auto a = threshold_policy_run(5);
  auto b = a;
  b.nd = NdResolution::FixedOrder;
  b.policy = policy::parse_policy("random");
  const auto sa = simulate(a), sb = simulate(b);
  ASSERT_EQ(sa.requests.size(), sb.requests.size());
  for (std::size_t i = 0; i < sa.requests.size(); ++i) {
    EXPECT_EQ(sa.requests[i].arrival, sb.requests[i].arrival);
  }
}

TEST(EngineProperties, ServerInvariantsHoldOnRandomRuns) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto c = threshold_policy_run(seed);
    c.arrival_rate = 0.2 + 0.1 * static_cast<double>(seed % 10);
    c.power.timeout = 1.0 + static_cast<double>(seed % 4) * 5.0;
    Simulation sim;
    const auto trace = traced(c, &sim);

    // Conservation: queue size equals assigned minus completed after every event.
    std::map<int, std::pair<std::size_t, std::size_t>> counts;
    Seconds last = 0.0;
    for (const auto& r : trace) {
      EXPECT_GE(r.time, last);
      last = r.time;
      auto& [assigned, completed] = counts[r.server];
      if (r.event == TraceEvent::Arrival) ++assigned;
      if (r.event == TraceEvent::ServiceComplete) ++completed;
      EXPECT_EQ(r.queue_size, assigned - completed);
      if (r.event == TraceEvent::ServiceStart) EXPECT_EQ(r.state, PowerState::On);
    }

    for (const auto& tl : sim.timelines) {
      ASSERT_FALSE(tl.empty());
      EXPECT_EQ(tl.front().start, 0.0);
      for (std::size_t i = 1; i < tl.size(); ++i) {
        EXPECT_GT(tl[i].start, tl[i - 1].start);
        EXPECT_NE(tl[i].state, tl[i - 1].state);
        const Seconds prev_len = tl[i].start - tl[i - 1].start;
        if (tl[i].state == PowerState::Sleep) {
          EXPECT_EQ(tl[i - 1].state, PowerState::Suspend);
          EXPECT_NEAR(prev_len, c.power.t_suspend, 1e-9);
        }
        if (tl[i].state == PowerState::On) {
          EXPECT_EQ(tl[i - 1].state, PowerState::Wakeup);
          EXPECT_NEAR(prev_len, c.power.t_wakeup, 1e-9);
        }
        if (tl[i].state == PowerState::Suspend) EXPECT_EQ(tl[i - 1].state, PowerState::On);
      }
    }

    // FIFO, non-preemptive, deterministic service.
    std::map<int, Seconds> last_start;
    for (const auto& r : sim.requests) {
      ASSERT_TRUE(r.completion);
      EXPECT_GE(*r.service_start, r.arrival);
      EXPECT_EQ(*r.completion, *r.service_start + c.service_time);
      if (auto it = last_start.find(r.server); it != last_start.end()) {
        EXPECT_GE(*r.service_start, it->second + c.service_time);
      }
      last_start[r.server] = *r.service_start;
    }
  }
}

TEST(EngineProperties, TraceLatenciesAgreeWithTheSummary) {
  auto c = threshold_policy_run(11);
  c.warmup = 50.0;
  Simulation sim;
  const auto trace = traced(c, &sim);
  std::map<int, std::vector<Seconds>> arrivals;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : trace) {
    if (r.event == TraceEvent::Arrival) arrivals[r.server].push_back(r.time);
    if (r.event == TraceEvent::ServiceComplete) {
      auto& pending = arrivals[r.server];
      const Seconds a = pending.front();
      pending.erase(pending.begin());
      if (a >= c.warmup) {
        sum += r.time - a;
        ++n;
      }
    }
  }
  const auto result = summarize(sim, c);
  EXPECT_EQ(result.latency_samples, n);
  EXPECT_NEAR(result.avg_latency, sum / static_cast<double>(n), 1e-12);
}

}  // namespace
}  // namespace greenlb
