#include "greenlb/design_space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "greenlb/error.hpp"

namespace greenlb {

DesignSpace DesignSpace::defaults() {
  DesignSpace s;
  s.q = {1, 2, 3, 5, 7, 10, 15, 20, 30, 40, 50, 75, 100};
  s.timeout = {1, 2, 3, 4, 5, 7.5, 10, 15, 30};
  s.nd = {NdResolution::RandomFraction, NdResolution::FixedOrder};
  s.replications = 10;
  return s;
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication) {
  const std::uint64_t labels[] = {0x7265706c /* "repl" */, replication};
  return derive_seed(master_seed, labels);
}

std::vector<Design> enumerate_designs(const DesignSpace& space, std::uint64_t master_seed) {
  if (space.q.empty()) throw ConfigError("study.q is empty");
  if (space.timeout.empty()) throw ConfigError("study.TO is empty");
  if (space.nd.empty()) throw ConfigError("study.nd is empty");
  if (space.replications == 0) throw ConfigError("study.replications must be at least 1");
  for (int q : space.q) {
    if (q < 0) throw ConfigError("study.q values must be non-negative");
  }
  for (Seconds to : space.timeout) {
    if (!(to > 0.0)) throw ConfigError("study.TO values must be positive");
  }
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < space.replications; ++r) seeds.push_back(replication_seed(master_seed, r));

  std::vector<Design> out;
  out.reserve(space.q.size() * space.timeout.size() * space.nd.size());
  for (int q : space.q) {
    for (Seconds to : space.timeout) {
      for (NdResolution nd : space.nd) out.push_back(Design{q, to, nd, seeds});
    }
  }
  return out;
}

SimConfig configure(const SimConfig& base, const Design& design, std::size_t replication) {
  SimConfig c = base;
  c.design_params["q"] = design.q;
  c.power.timeout = design.timeout;
  c.nd = design.nd;
  c.seed = design.replication_seeds.at(replication);
  return c;
}

std::vector<SweepRow> run_sweep(const DesignSpace& space, const SimConfig& base,
                                std::size_t parallelism) {
  const auto names = policy::dspace_names(base.policy);
  if (std::find(names.begin(), names.end(), "q") == names.end()) {
    throw ConfigError("sweep policy must reference dspace(\"q\")");
  }
  const auto designs = enumerate_designs(space, base.seed);

  std::vector<SweepRow> rows;
  rows.reserve(designs.size() * space.replications);
  for (std::size_t d = 0; d < designs.size(); ++d) {
    for (std::size_t r = 0; r < space.replications; ++r) {
      SweepRow row;
      row.design_index = d;
      row.q = designs[d].q;
      row.timeout = designs[d].timeout;
      row.nd = designs[d].nd;
      row.replication = r;
      row.seed = designs[d].replication_seeds[r];
      rows.push_back(std::move(row));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      try {
        row.result = run(configure(base, designs[row.design_index], row.replication));
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(rows.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

}  // namespace greenlb
