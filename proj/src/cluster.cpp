#include "greenlb/cluster.hpp"

#include <string>

#include "greenlb/error.hpp"

namespace greenlb {

namespace {

[[noreturn]] void mismatch(int id, const char* what, PowerState s) {
  throw LogicError("server " + std::to_string(id) + ": " + what + " in state " +
                   std::string(to_string(s)));
}

}  // namespace

Server::Server(int id, PowerState initial, const PowerModel& model, Seconds service_time)
    : id_(id), model_(model), service_time_(service_time), state_(initial) {
  if (initial != PowerState::On && initial != PowerState::Sleep) {
    throw ConfigError("initial power state must be on or sleep");
  }
  timeline_.push_back({0.0, initial});
}

Step Server::start(Seconds now) {
  if (state_ == PowerState::On && !in_service_ && queue_.empty()) return go_idle(now);
  return {};
}

Step Server::assign(RequestId req, Seconds now) {
  ++assigned_;
  queue_.push_back(req);
  switch (state_) {
    case PowerState::On:
      if (in_service_) return {};
      return begin_service(now);
    case PowerState::Sleep:
      enter(PowerState::Wakeup, now);
      return {Timer{TimerKind::WakeupDone, now + model_.t_wakeup}, {}, {}};
    case PowerState::Suspend:
      pending_arrival_during_suspend_ = true;
      return {};
    case PowerState::Wakeup:
      return {};
  }
  return {};
}

Step Server::complete_service(Seconds now) {
  if (!in_service_ || state_ != PowerState::On) mismatch(id_, "service completion while idle", state_);
  const RequestId done = *in_service_;
  in_service_.reset();
  ++completed_;
  Step step = queue_.empty() ? go_idle(now) : begin_service(now);
  step.completed = done;
  return step;
}

Step Server::timeout(Seconds now, std::uint64_t epoch) {
  if (epoch != timeout_epoch_) return {};
  if (state_ != PowerState::On || in_service_ || !queue_.empty()) mismatch(id_, "timeout", state_);
  idle_since_.reset();
  enter(PowerState::Suspend, now);
  return {Timer{TimerKind::SuspendDone, now + model_.t_suspend}, {}, {}};
}

Step Server::suspend_done(Seconds now) {
  if (state_ != PowerState::Suspend) mismatch(id_, "suspend-done", state_);
  if (!pending_arrival_during_suspend_) {
    enter(PowerState::Sleep, now);
    return {};
  }
  pending_arrival_during_suspend_ = false;
  enter(PowerState::Wakeup, now);
  return {Timer{TimerKind::WakeupDone, now + model_.t_wakeup}, {}, {}};
}

Step Server::wakeup_done(Seconds now) {
  if (state_ != PowerState::Wakeup) mismatch(id_, "wakeup-done", state_);
  enter(PowerState::On, now);
  return queue_.empty() ? go_idle(now) : begin_service(now);
}

void Server::enter(PowerState s, Seconds now) {
  state_ = s;
  state_entered_at_ = now;
  if (timeline_.back().start == now) {
    timeline_.pop_back();
    if (!timeline_.empty() && timeline_.back().state == s) return;
  }
  timeline_.push_back({now, s});
}

Step Server::begin_service(Seconds now) {
  // Any pending idle countdown is void once work starts.
  ++timeout_epoch_;
  idle_since_.reset();
  in_service_ = queue_.front();
  queue_.pop_front();
  return {Timer{TimerKind::ServiceComplete, now + service_time_}, in_service_, {}};
}

Step Server::go_idle(Seconds now) {
  idle_since_ = now;
  ++timeout_epoch_;
  if (model_.timeout == kNever) return {};
  return {Timer{TimerKind::Timeout, now + model_.timeout, timeout_epoch_}, {}, {}};
}

}  // namespace greenlb
