#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "greenlb/cluster.hpp"
#include "greenlb/power.hpp"

namespace greenlb {

/// Summary of one simulation run. AL and AP are finite-window estimates of
/// long-run averages; the CI half-widths (95 %, batch means) quantify that.
struct RunResult {
  Seconds avg_latency = 0.0;
  std::optional<Seconds> latency_ci_halfwidth;
  Watts avg_power_per_server = 0.0;
  Watts total_power = 0.0;
  /// Half-width for the per-server mean; the total's is num_servers times this.
  std::optional<Watts> power_ci_halfwidth;
  /// Per server, indexed by PowerState, over [warmup, horizon].
  std::vector<std::array<double, 4>> state_fraction;
  std::vector<std::size_t> assignments;
  std::size_t requests_arrived = 0;
  std::size_t requests_completed = 0;
  std::size_t latency_samples = 0;
  Seconds warmup = 0.0;
  Seconds horizon = 0.0;
};

/// Mean latency of completed requests that arrived at or after `warmup`.
/// Throws InsufficientDataError if there are none.
Seconds average_latency(std::span<const Request> requests, Seconds warmup);

/// Latencies of completed post-warmup requests, in arrival order.
std::vector<Seconds> latency_samples(std::span<const Request> requests, Seconds warmup);

/// Time spent in each state (indexed by PowerState) within [from, to].
std::array<Seconds, 4> state_durations(const StateTimeline& timeline, Seconds from, Seconds to);

struct AveragePower {
  Watts per_server = 0.0;
  Watts total = 0.0;
};

/// Time-average power over [warmup, horizon], summed over servers (`total`)
/// and divided by the server count (`per_server`). Throws InsufficientDataError
/// for an empty window.
AveragePower average_power(std::span<const StateTimeline> timelines, const PowerModel& model,
                           Seconds warmup, Seconds horizon);

struct BatchEstimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;
  std::size_t batch_size = 0;
};

/// Splits `samples` into `num_batches` equal consecutive batches (a remainder
/// shorter than one batch is dropped) and returns the grand mean together with
/// the Student-t half-width of the batch means at `confidence`.
BatchEstimate batch_means(std::span<const double> samples, std::size_t num_batches,
                          double confidence = 0.95);

/// Batch means of cluster-total power over equal-length sub-windows of
/// [warmup, horizon].
BatchEstimate batch_means_power(std::span<const StateTimeline> timelines, const PowerModel& model,
                                Seconds warmup, Seconds horizon, std::size_t num_batches,
                                double confidence = 0.95);

/// Half-width of a `confidence` interval for the mean of `values`.
double student_t_halfwidth(std::span<const double> values, double confidence);

}  // namespace greenlb
