#include <gtest/gtest.h>

#include "greenlb/cluster.hpp"
#include "greenlb/error.hpp"

namespace greenlb {
namespace {

const PowerModel kDefaults{};

TEST(Server, SleepingServerWakesBeforeService) {
  Server s(0, PowerState::Sleep, kDefaults, 1.0);
  EXPECT_FALSE(s.start(0.0).timer);
  auto step = s.assign(0, 3.0);
  EXPECT_EQ(s.state(), PowerState::Wakeup);
  ASSERT_TRUE(step.timer);
  EXPECT_EQ(step.timer->kind, TimerKind::WakeupDone);
  EXPECT_EQ(step.timer->at, 13.0);
  EXPECT_FALSE(step.started);

  step = s.wakeup_done(13.0);
  EXPECT_EQ(s.state(), PowerState::On);
  ASSERT_TRUE(step.started);
  EXPECT_EQ(*step.started, 0u);
  EXPECT_EQ(step.timer->kind, TimerKind::ServiceComplete);
  EXPECT_EQ(step.timer->at, 14.0);
}

TEST(Server, IdleOnServerCancelsItsTimeout) {
  Server s(0, PowerState::On, kDefaults, 1.0);
  const auto idle = s.start(0.0);
  ASSERT_TRUE(idle.timer);
  EXPECT_EQ(idle.timer->kind, TimerKind::Timeout);
  EXPECT_EQ(idle.timer->at, 10.0);

  const auto step = s.assign(0, 5.0);
  ASSERT_TRUE(step.started);
  EXPECT_EQ(step.timer->at, 6.0);
  EXPECT_FALSE(s.timeout(10.0, idle.timer->epoch).timer);
  EXPECT_EQ(s.state(), PowerState::On);
}

TEST(Server, FullPowerCycle) {
  Server s(0, PowerState::On, kDefaults, 1.0);
  s.start(0.0);
  s.assign(0, 0.0);
  auto step = s.complete_service(1.0);
  EXPECT_EQ(*step.completed, 0u);
  ASSERT_TRUE(step.timer);
  EXPECT_EQ(step.timer->kind, TimerKind::Timeout);
  EXPECT_EQ(step.timer->at, 11.0);
  EXPECT_EQ(s.idle_since(), 1.0);

  step = s.timeout(11.0, step.timer->epoch);
  EXPECT_EQ(s.state(), PowerState::Suspend);
  EXPECT_EQ(step.timer->kind, TimerKind::SuspendDone);
  EXPECT_EQ(step.timer->at, 21.0);

  step = s.suspend_done(21.0);
  EXPECT_EQ(s.state(), PowerState::Sleep);
  EXPECT_FALSE(step.timer);

  const StateTimeline expected{{0.0, PowerState::On}, {11.0, PowerState::Suspend}, {21.0, PowerState::Sleep}};
  ASSERT_EQ(s.timeline().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(s.timeline()[i].start, expected[i].start);
    EXPECT_EQ(s.timeline()[i].state, expected[i].state);
  }
}

TEST(Server, ArrivalDuringSuspendFinishesSuspendThenWakes) {
  Server s(0, PowerState::On, kDefaults, 1.0);
  auto step = s.start(0.0);
  step = s.timeout(10.0, step.timer->epoch);
  ASSERT_EQ(s.state(), PowerState::Suspend);
  EXPECT_FALSE(s.assign(0, 14.0).timer);
  EXPECT_FALSE(s.assign(1, 15.0).timer);
  EXPECT_TRUE(s.pending_wakeup());
  EXPECT_EQ(s.queue_size(), 2u);

  step = s.suspend_done(20.0);
  EXPECT_EQ(s.state(), PowerState::Wakeup);
  EXPECT_EQ(step.timer->kind, TimerKind::WakeupDone);
  EXPECT_EQ(step.timer->at, 30.0);
  step = s.wakeup_done(30.0);
  EXPECT_EQ(*step.started, 0u);
  step = s.complete_service(31.0);
  EXPECT_EQ(*step.completed, 0u);
  EXPECT_EQ(*step.started, 1u);
  EXPECT_EQ(step.timer->at, 32.0);
}

TEST(Server, QueuedRequestStartsAtCompletion) {
  Server s(0, PowerState::On, kDefaults, 2.0);
  s.start(0.0);
  s.assign(0, 0.0);
  EXPECT_FALSE(s.assign(1, 0.5).started);
  EXPECT_EQ(s.queue_size(), 2u);
  const auto step = s.complete_service(2.0);
  EXPECT_EQ(*step.completed, 0u);
  EXPECT_EQ(*step.started, 1u);
  EXPECT_EQ(step.timer->at, 4.0);
  EXPECT_EQ(s.queue_size(), 1u);
}

TEST(Server, InfiniteTimeoutNeverSuspends) {
  PowerModel m;
  m.timeout = kNever;
  Server s(0, PowerState::On, m, 1.0);
  EXPECT_FALSE(s.start(0.0).timer);
  s.assign(0, 0.0);
  EXPECT_FALSE(s.complete_service(1.0).timer);
}

TEST(Server, RejectsTransitionsOutOfState) {
  Server s(0, PowerState::Sleep, kDefaults, 1.0);
  EXPECT_THROW(s.complete_service(0.0), LogicError);
  EXPECT_THROW(s.suspend_done(0.0), LogicError);
  EXPECT_THROW(s.wakeup_done(0.0), LogicError);
  Server on(1, PowerState::On, kDefaults, 1.0);
  on.start(0.0);
  EXPECT_THROW(on.suspend_done(0.0), LogicError);
  EXPECT_THROW(Server(2, PowerState::Suspend, kDefaults, 1.0), ConfigError);
}

TEST(Power, StateConstants) {
  EXPECT_EQ(power_of(PowerState::On, kDefaults), 200.0);
  EXPECT_EQ(power_of(PowerState::Sleep, kDefaults), 14.0);
  EXPECT_EQ(power_of(PowerState::Suspend, kDefaults), 200.0);
  EXPECT_EQ(power_of(PowerState::Wakeup, kDefaults), 200.0);
  EXPECT_EQ(power_of(Server(0, PowerState::Sleep, kDefaults, 1.0)), 14.0);
}

TEST(Power, Validation) {
  PowerModel m;
  m.p_sleep = -1;
  EXPECT_THROW(validate(m), ConfigError);
  m = PowerModel{};
  m.t_wakeup = kNever;
  EXPECT_THROW(validate(m), ConfigError);
  EXPECT_EQ(parse_power_state("suspend"), PowerState::Suspend);
  EXPECT_FALSE(parse_power_state("off"));
}

}  // namespace
}  // namespace greenlb
