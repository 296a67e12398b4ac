#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "greenlb/cluster.hpp"
#include "greenlb/metrics.hpp"
#include "greenlb/policy.hpp"
#include "greenlb/power.hpp"
#include "greenlb/random.hpp"

namespace greenlb {

/// Stop injecting after `count` arrivals, then drain. The measurement
/// horizon is the last completion.
struct StopAfterRequests {
  std::size_t count = 1500;
};

/// Process events up to `horizon` and measure over [warmup, horizon].
struct StopAtTime {
  Seconds horizon = 100000.0;
};

using StopCriterion = std::variant<StopAfterRequests, StopAtTime>;

struct SimConfig {
  int num_servers = 4;
  /// Poisson arrival rate, requests per second.
  double arrival_rate = 1.0;
  /// Deterministic service duration.
  Seconds service_time = 1.0;
  PowerModel power;
  policy::Expr policy = -policy::term(policy::Terminal::QueueSize);
  NdResolution nd = NdResolution::RandomFraction;
  DesignParams design_params;
  StopCriterion stop = StopAfterRequests{};
  Seconds warmup = 500.0;
  std::uint64_t seed = 1;
  std::size_t batches = 20;
  PowerState initial_state = PowerState::Sleep;
  /// Explicit arrival instants (strictly increasing) replacing the Poisson
  /// stream.
  std::optional<std::vector<Seconds>> arrival_times;
  /// Fixed server per arrival, bypassing the policy. Requires arrival_times.
  std::optional<std::vector<int>> forced_assignments;
};

/// Throws ConfigError naming the offending field.
void validate(const SimConfig& config);

/// Exponential inter-arrival time by inversion. A zero uniform is redrawn so
/// the result is always positive.
Seconds generate_interarrival(UniformSource& rng, double rate);

enum class TraceEvent : std::uint8_t {
  Arrival,
  ServiceStart,
  ServiceComplete,
  Timeout,
  SuspendDone,
  WakeupDone,
};

std::string_view to_string(TraceEvent e) noexcept;

/// Server state right after the event.
struct TraceRecord {
  Seconds time;
  int server;
  TraceEvent event;
  PowerState state;
  std::size_t queue_size;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Everything a run produced, before summarizing.
struct Simulation {
  std::vector<Request> requests;
  std::vector<StateTimeline> timelines;
  std::vector<std::size_t> assignments;
  Seconds horizon = 0.0;
  std::size_t events_processed = 0;
};

/// Runs the event loop. Events at equal times are ordered
/// ServiceComplete < SuspendDone < WakeupDone < Timeout < Arrival, then by
/// scheduling sequence. Policy failures are rethrown with the request index.
Simulation simulate(const SimConfig& config, const TraceSink& trace = {});

/// AL, AP, CIs and per-server shares for a finished simulation.
RunResult summarize(const Simulation& sim, const SimConfig& config);

RunResult run(const SimConfig& config, const TraceSink& trace = {});

}  // namespace greenlb
