#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "greenlb/power.hpp"

namespace greenlb {

using RequestId = std::size_t;

struct Request {
  Seconds arrival = 0.0;
  int server = -1;
  std::optional<Seconds> service_start;
  std::optional<Seconds> completion;

  std::optional<Seconds> latency() const {
    if (!completion) return std::nullopt;
    return *completion - arrival;
  }
};

/// One constant-state stretch of a server's power timeline.
struct StateSegment {
  Seconds start;
  PowerState state;
};

/// Piecewise-constant power-state history starting at t = 0. Each segment
/// lasts until the next one starts; the last is open-ended.
using StateTimeline = std::vector<StateSegment>;

/// Timers a server asks the event loop to fire.
enum class TimerKind : std::uint8_t { ServiceComplete, SuspendDone, WakeupDone, Timeout };

struct Timer {
  TimerKind kind;
  Seconds at;
  /// Only meaningful for Timeout; a timeout whose epoch no longer matches
  /// the server's was cancelled by an arrival.
  std::uint64_t epoch = 0;
};

/// Effect of one server transition.
struct Step {
  std::optional<Timer> timer;
  std::optional<RequestId> started;
  std::optional<RequestId> completed;
};

/// Dynamic state of one server: FIFO queue, the request in service, the
/// power state and the bookkeeping needed for timeouts.
///
/// Transition rules:
///  - idle in On for `timeout` seconds -> Suspend for t_suspend -> Sleep
///  - arrival in Sleep -> Wakeup for t_wakeup -> On
///  - arrival in Suspend -> finish suspending, then Wakeup straight away
///  - entering On with an empty queue restarts the idle countdown
/// Every method throws LogicError when called in a state it does not apply to.
class Server {
 public:
  /// `initial` must be On or Sleep.
  Server(int id, PowerState initial, const PowerModel& model, Seconds service_time);

  /// Timers needed at t = 0 (an idle On server starts its countdown).
  Step start(Seconds now);

  Step assign(RequestId req, Seconds now);
  Step complete_service(Seconds now);
  /// Returns an empty step for a cancelled timeout.
  Step timeout(Seconds now, std::uint64_t epoch);
  Step suspend_done(Seconds now);
  Step wakeup_done(Seconds now);

  int id() const noexcept { return id_; }
  PowerState state() const noexcept { return state_; }
  /// Queued plus in service.
  std::size_t queue_size() const noexcept { return queue_.size() + (in_service_ ? 1 : 0); }
  std::optional<RequestId> in_service() const noexcept { return in_service_; }
  bool pending_wakeup() const noexcept { return pending_arrival_during_suspend_; }
  std::optional<Seconds> idle_since() const noexcept { return idle_since_; }
  Seconds state_entered_at() const noexcept { return state_entered_at_; }
  std::size_t assigned() const noexcept { return assigned_; }
  std::size_t completed() const noexcept { return completed_; }
  const StateTimeline& timeline() const noexcept { return timeline_; }
  const PowerModel& model() const noexcept { return model_; }

 private:
  void enter(PowerState s, Seconds now);
  Step begin_service(Seconds now);
  Step go_idle(Seconds now);

  int id_;
  PowerModel model_;
  Seconds service_time_;
  PowerState state_;
  std::deque<RequestId> queue_;
  std::optional<RequestId> in_service_;
  bool pending_arrival_during_suspend_ = false;
  Seconds state_entered_at_ = 0.0;
  std::optional<Seconds> idle_since_;
  std::uint64_t timeout_epoch_ = 0;
  std::size_t assigned_ = 0;
  std::size_t completed_ = 0;
  StateTimeline timeline_;
};

inline Watts power_of(const Server& s) noexcept { return power_of(s.state(), s.model()); }

}  // namespace greenlb
