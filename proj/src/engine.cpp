#include "greenlb/engine.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "greenlb/error.hpp"

namespace greenlb {

namespace {

// Lower rank fires first among events at the same instant; timer kinds keep
// their enum order and arrivals come last.
constexpr std::uint8_t kArrivalRank = 4;

struct Event {
  Seconds time;
  std::uint8_t rank;
  std::uint64_t sequence;
  int server;
  std::uint64_t epoch;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.sequence > b.sequence;
  }
};

TraceEvent trace_event_for(TimerKind k) {
  switch (k) {
    case TimerKind::ServiceComplete: return TraceEvent::ServiceComplete;
    case TimerKind::SuspendDone: return TraceEvent::SuspendDone;
    case TimerKind::WakeupDone: return TraceEvent::WakeupDone;
    case TimerKind::Timeout: return TraceEvent::Timeout;
  }
  return TraceEvent::Timeout;
}

class EventLoop {
 public:
  EventLoop(const SimConfig& cfg, const TraceSink& trace)
      : cfg_(cfg),
        trace_(trace),
        arrivals_rng_(RandomStream::derive(cfg.seed, {stream_label::kArrivals})),
        policy_rng_(RandomStream::derive(cfg.seed, {stream_label::kPolicy})) {
    servers_.reserve(static_cast<std::size_t>(cfg.num_servers));
    for (int i = 0; i < cfg.num_servers; ++i) {
      servers_.emplace_back(i, cfg.initial_state, cfg.power, cfg.service_time);
    }
    snaps_.resize(servers_.size());
    for (int i = 0; i < cfg.num_servers; ++i) {
      auto& s = snaps_[static_cast<std::size_t>(i)];
      s.id = i;
      s.num_servers = cfg.num_servers;
      s.power = cfg.power;
      s.design_params = &cfg.design_params;
    }
    if (const auto* stop = std::get_if<StopAtTime>(&cfg.stop)) time_limit_ = stop->horizon;
    if (const auto* stop = std::get_if<StopAfterRequests>(&cfg.stop)) request_limit_ = stop->count;
  }

  Simulation run() {
    for (auto& s : servers_) apply(s, s.start(0.0));
    schedule_next_arrival(0.0);

    while (!queue_.empty()) {
      const Event ev = queue_.top();
      if (ev.time > time_limit_) break;
      queue_.pop();
      if (ev.time < clock_) throw LogicError("event scheduled in the past");
      clock_ = ev.time;
      ++events_;
      if (ev.rank == kArrivalRank) {
        on_arrival();
      } else {
        on_timer(static_cast<TimerKind>(ev.rank), ev);
      }
    }

    Simulation sim;
    sim.requests = std::move(requests_);
    sim.events_processed = events_;
    if (std::isfinite(time_limit_)) {
      sim.horizon = time_limit_;
    } else {
      for (const auto& r : sim.requests) {
        if (r.completion && *r.completion > sim.horizon) sim.horizon = *r.completion;
      }
    }
    for (const auto& s : servers_) {
      sim.timelines.push_back(s.timeline());
      sim.assignments.push_back(s.assigned());
    }
    return sim;
  }

 private:
  void push(Seconds time, std::uint8_t rank, int server, std::uint64_t epoch = 0) {
    queue_.push(Event{time, rank, sequence_++, server, epoch});
  }

  void schedule_next_arrival(Seconds now) {
    if (requests_.size() >= request_limit_) return;
    Seconds at = 0.0;
    if (cfg_.arrival_times) {
      if (requests_.size() >= cfg_.arrival_times->size()) return;
      at = (*cfg_.arrival_times)[requests_.size()];
    } else {
      at = now + generate_interarrival(arrivals_rng_, cfg_.arrival_rate);
    }
    if (at > time_limit_) return;
    pending_arrival_ = at;
    push(at, kArrivalRank, -1);
  }

  void on_arrival() {
    const RequestId id = requests_.size();
    int target = 0;
    if (cfg_.forced_assignments) {
      target = (*cfg_.forced_assignments)[id];
    } else {
      for (std::size_t i = 0; i < servers_.size(); ++i) {
        snaps_[i].queue_size = static_cast<std::int64_t>(servers_[i].queue_size());
        snaps_[i].power_state = servers_[i].state();
      }
      try {
        target = policy::select_server(cfg_.policy, snaps_, cfg_.nd, policy_rng_).server;
      } catch (const EvalError& e) {
        throw EvalError("request #" + std::to_string(id) + " at t=" + std::to_string(clock_) +
                        ": " + e.what());
      } catch (const ConfigError& e) {
        throw ConfigError("request #" + std::to_string(id) + ": " + e.what());
      }
    }
    requests_.push_back(Request{pending_arrival_, target, std::nullopt, std::nullopt});
    auto& server = servers_[static_cast<std::size_t>(target)];
    const Step step = server.assign(id, clock_);
    emit(server, TraceEvent::Arrival);
    apply(server, step);
    schedule_next_arrival(clock_);
  }

  void on_timer(TimerKind kind, const Event& ev) {
    auto& server = servers_[static_cast<std::size_t>(ev.server)];
    Step step;
    switch (kind) {
      case TimerKind::ServiceComplete: step = server.complete_service(clock_); break;
      case TimerKind::SuspendDone: step = server.suspend_done(clock_); break;
      case TimerKind::WakeupDone: step = server.wakeup_done(clock_); break;
      case TimerKind::Timeout:
        step = server.timeout(clock_, ev.epoch);
        if (!step.timer) return;  // cancelled
        break;
    }
    if (step.completed) requests_[*step.completed].completion = clock_;
    emit(server, trace_event_for(kind));
    apply(server, step);
  }

  void apply(const Server& server, const Step& step) {
    if (step.started) {
      requests_[*step.started].service_start = clock_;
      emit(server, TraceEvent::ServiceStart);
    }
    if (step.timer) {
      push(step.timer->at, static_cast<std::uint8_t>(step.timer->kind), server.id(), step.timer->epoch);
    }
  }

  void emit(const Server& server, TraceEvent e) {
    if (trace_) trace_(TraceRecord{clock_, server.id(), e, server.state(), server.queue_size()});
  }

  const SimConfig& cfg_;
  const TraceSink& trace_;
  RandomStream arrivals_rng_;
  RandomStream policy_rng_;
  std::vector<Server> servers_;
  std::vector<ServerSnapshot> snaps_;
  std::vector<Request> requests_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t sequence_ = 0;
  std::size_t events_ = 0;
  Seconds clock_ = 0.0;
  Seconds pending_arrival_ = 0.0;
  Seconds time_limit_ = kNever;
  std::size_t request_limit_ = static_cast<std::size_t>(-1);
};

}  // namespace

std::string_view to_string(TraceEvent e) noexcept {
  switch (e) {
    case TraceEvent::Arrival: return "arrival";
    case TraceEvent::ServiceStart: return "start";
    case TraceEvent::ServiceComplete: return "complete";
    case TraceEvent::Timeout: return "timeout";
    case TraceEvent::SuspendDone: return "suspend_done";
    case TraceEvent::WakeupDone: return "wakeup_done";
  }
  return "?";
}

void validate(const SimConfig& c) {
  if (c.num_servers < 1) throw ConfigError("scenario.num_servers must be at least 1");
  if (!(c.arrival_rate > 0.0) || std::isinf(c.arrival_rate)) {
    throw ConfigError("scenario.arrival_rate must be positive and finite");
  }
  if (!(c.service_time > 0.0) || std::isinf(c.service_time)) {
    throw ConfigError("scenario.service_time must be positive and finite");
  }
  validate(c.power);
  if (!(c.warmup >= 0.0)) throw ConfigError("scenario.warmup must be non-negative");
  if (const auto* s = std::get_if<StopAtTime>(&c.stop)) {
    if (!(s->horizon > 0.0) || std::isinf(s->horizon)) {
      throw ConfigError("scenario.stop.max_virtual_time must be positive and finite");
    }
  }
  if (c.initial_state != PowerState::On && c.initial_state != PowerState::Sleep) {
    throw ConfigError("scenario.initial_state must be on or sleep");
  }
  for (const auto& name : policy::dspace_names(c.policy)) {
    if (!c.design_params.contains(name)) {
      throw ConfigError("policy references undefined dspace parameter '" + name + "'");
    }
  }
  if (c.arrival_times) {
    const auto& t = *c.arrival_times;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] >= 0.0) || std::isinf(t[i]) || (i > 0 && !(t[i] > t[i - 1]))) {
        throw ConfigError("arrival_times must be finite, non-negative and strictly increasing");
      }
    }
  }
  if (c.forced_assignments) {
    if (!c.arrival_times || c.forced_assignments->size() != c.arrival_times->size()) {
      throw ConfigError("forced_assignments needs one entry per explicit arrival");
    }
    for (int s : *c.forced_assignments) {
      if (s < 0 || s >= c.num_servers) throw ConfigError("forced assignment out of range");
    }
  }
}

Seconds generate_interarrival(UniformSource& rng, double rate) {
  double u = rng.next_uniform();
  while (u == 0.0) u = rng.next_uniform();
  return -std::log1p(-u) / rate;
}

Simulation simulate(const SimConfig& config, const TraceSink& trace) {
  validate(config);
  return EventLoop(config, trace).run();
}

RunResult summarize(const Simulation& sim, const SimConfig& config) {
  RunResult r;
  r.warmup = config.warmup;
  r.horizon = sim.horizon;
  r.requests_arrived = sim.requests.size();
  for (const auto& q : sim.requests) {
    if (q.completion) ++r.requests_completed;
  }
  r.assignments = sim.assignments;

  const auto samples = latency_samples(sim.requests, config.warmup);
  r.latency_samples = samples.size();
  r.avg_latency = average_latency(sim.requests, config.warmup);
  try {
    r.latency_ci_halfwidth = batch_means(samples, config.batches).ci_halfwidth;
  } catch (const InsufficientDataError&) {
  }

  const auto ap = average_power(sim.timelines, config.power, config.warmup, sim.horizon);
  r.avg_power_per_server = ap.per_server;
  r.total_power = ap.total;
  try {
    r.power_ci_halfwidth =
        batch_means_power(sim.timelines, config.power, config.warmup, sim.horizon, config.batches)
            .ci_halfwidth /
        static_cast<double>(config.num_servers);
  } catch (const InsufficientDataError&) {
  }

  const Seconds window = sim.horizon - config.warmup;
  for (const auto& tl : sim.timelines) {
    auto d = state_durations(tl, config.warmup, sim.horizon);
    for (auto& v : d) v /= window;
    r.state_fraction.push_back(d);
  }
  return r;
}

RunResult run(const SimConfig& config, const TraceSink& trace) {
  return summarize(simulate(config, trace), config);
}

}  // namespace greenlb
