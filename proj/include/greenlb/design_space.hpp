#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "greenlb/engine.hpp"

namespace greenlb {

/// Ranges of the three design coordinates. `q` binds to dspace("q") in the
/// policy and `timeout` to the power model's idle timeout.
struct DesignSpace {
  std::vector<int> q;
  std::vector<Seconds> timeout;
  std::vector<NdResolution> nd;
  std::size_t replications = 10;

  static DesignSpace defaults();
};

struct Design {
  int q = 0;
  Seconds timeout = 0.0;
  NdResolution nd = NdResolution::RandomFraction;
  std::vector<std::uint64_t> replication_seeds;
};

/// Seed of replication `replication`. Independent of the design, so every
/// design sees the same arrival stream for a given replication.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication);

/// Cartesian product, q outermost, then timeout, then nd (in the order given).
/// Throws ConfigError on an empty dimension, q < 0 or timeout <= 0.
std::vector<Design> enumerate_designs(const DesignSpace& space, std::uint64_t master_seed);

/// `base` with the design's coordinates and the replication's seed applied.
SimConfig configure(const SimConfig& base, const Design& design, std::size_t replication);

struct SweepRow {
  std::size_t design_index = 0;
  int q = 0;
  Seconds timeout = 0.0;
  NdResolution nd = NdResolution::RandomFraction;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::optional<RunResult> result;
  /// Set when the run failed; `result` is empty then.
  std::string error;
};

/// Runs every design and replication, using up to `parallelism` threads.
/// Rows come back ordered by (design index, replication) whatever the thread
/// count; `base.seed` is the master seed. A failing run yields an error row.
std::vector<SweepRow> run_sweep(const DesignSpace& space, const SimConfig& base,
                                std::size_t parallelism);

}  // namespace greenlb
