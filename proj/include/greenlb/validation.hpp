#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greenlb/power.hpp"
#include "greenlb/results_io.hpp"

namespace greenlb {

/// Ratio distance max(v1/v2, v2/v1) - 1. Symmetric and scale invariant but
/// not a metric: the triangle inequality fails. Throws DataError unless both
/// arguments are positive.
double delta(double v1, double v2);

struct ReplayConfig {
  int num_servers = 4;
  Seconds service_time = 1.0;
  PowerModel power;
  PowerState initial_state = PowerState::Sleep;
  /// Energy is integrated over [warmup, horizon].
  Seconds warmup = 0.0;
  /// Defaults to the last completion.
  std::optional<Seconds> horizon;
};

struct ReplayResult {
  std::vector<Seconds> latencies;
  std::vector<Seconds> completions;
  Seconds horizon = 0.0;
  /// Joules over [warmup, horizon], summed over servers.
  double energy = 0.0;
  std::vector<double> energy_per_server;
};

/// Straight-line re-derivation of latencies and the energy integral for a
/// fixed arrival trace and fixed per-request server assignment. Each server's
/// arrivals are walked in order and its power timeline is laid out interval
/// by interval, without an event queue. Throws DataError on an inconsistent
/// trace.
ReplayResult replay_oracle(std::span<const Seconds> arrivals, std::span<const int> assignments,
                           const ReplayConfig& config);

/// Mean sojourn time of an M/D/1 queue (Pollaczek-Khinchine). Throws
/// DataError when lambda * service_time >= 1.
Seconds md1_mean_latency(double lambda, Seconds service_time);

inline constexpr std::array<double, 5> kDeltaThresholds = {0.06, 0.11, 0.13, 0.2, 0.3};

struct DesignComparison {
  DesignKey key;
  double latency_a = 0.0;
  double latency_b = 0.0;
  double power_a = 0.0;
  double power_b = 0.0;
  double delta_latency = 0.0;
  double delta_power = 0.0;
};

struct ComparisonReport {
  std::vector<DesignComparison> designs;
  /// Share of designs with delta strictly below each kDeltaThresholds entry.
  std::array<double, 5> latency_below{};
  std::array<double, 5> power_below{};
  /// Designs present in only one of the inputs.
  std::size_t unmatched = 0;
};

/// Joins two results tables on design coordinates (replications averaged).
ComparisonReport compare(const ResultsTable& a, const ResultsTable& b);

}  // namespace greenlb
