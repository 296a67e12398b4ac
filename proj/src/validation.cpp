#include "greenlb/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "greenlb/error.hpp"

namespace greenlb {

double delta(double v1, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) throw DataError("delta needs two positive values");
  return std::max(v1 / v2, v2 / v1) - 1.0;
}

Seconds md1_mean_latency(double lambda, Seconds service_time) {
  const double rho = lambda * service_time;
  if (!(lambda >= 0.0) || !(service_time > 0.0)) throw DataError("invalid M/D/1 parameters");
  if (rho >= 1.0) throw DataError("M/D/1 is unstable for rho >= 1");
  return service_time + rho * service_time / (2.0 * (1.0 - rho));
}

namespace {

struct Interval {
  Seconds start;
  Seconds end;
  PowerState state;
};

// Lays out one server's power timeline while walking its arrivals.
class ServerReplay {
 public:
  ServerReplay(const ReplayConfig& cfg) : cfg_(cfg) {
    if (cfg.initial_state == PowerState::On) {
      on_ = true;
      on_since_ = 0.0;
      free_at_ = 0.0;
    }
  }

  // Returns the service start for a request arriving at `a`.
  Seconds arrive(Seconds a) {
    const auto& p = cfg_.power;
    Seconds start = 0.0;
    if (!on_) {
      intervals_.push_back({0.0, a, PowerState::Sleep});
      start = wake(a);
    } else if (a < free_at_) {
      start = free_at_;
    } else if (const Seconds idle_end = free_at_ + p.timeout; a < idle_end) {
      start = a;
    } else {
      intervals_.push_back({on_since_, idle_end, PowerState::On});
      const Seconds sd_end = idle_end + p.t_suspend;
      intervals_.push_back({idle_end, sd_end, PowerState::Suspend});
      if (a < sd_end) {
        start = wake(sd_end);
      } else {
        intervals_.push_back({sd_end, a, PowerState::Sleep});
        start = wake(a);
      }
    }
    free_at_ = start + cfg_.service_time;
    return start;
  }

  Seconds free_at() const { return free_at_; }

  // Closes the timeline at `horizon` and returns the energy over the window.
  double energy(Seconds from, Seconds horizon) {
    std::vector<Interval> all = intervals_;
    if (!on_) {
      all.push_back({0.0, horizon, PowerState::Sleep});
    } else {
      const auto& p = cfg_.power;
      const Seconds idle_end = free_at_ + p.timeout;
      all.push_back({on_since_, std::min(idle_end, horizon), PowerState::On});
      if (idle_end < horizon) {
        const Seconds sd_end = idle_end + p.t_suspend;
        all.push_back({idle_end, std::min(sd_end, horizon), PowerState::Suspend});
        if (sd_end < horizon) all.push_back({sd_end, horizon, PowerState::Sleep});
      }
    }
    double joules = 0.0;
    for (const auto& iv : all) {
      const Seconds lo = std::max(iv.start, from);
      const Seconds hi = std::min(iv.end, horizon);
      if (hi > lo) joules += power_of(iv.state, cfg_.power) * (hi - lo);
    }
    return joules;
  }

 private:
  Seconds wake(Seconds at) {
    const Seconds on_at = at + cfg_.power.t_wakeup;
    intervals_.push_back({at, on_at, PowerState::Wakeup});
    on_ = true;
    on_since_ = on_at;
    return on_at;
  }

  const ReplayConfig& cfg_;
  std::vector<Interval> intervals_;
  bool on_ = false;
  Seconds on_since_ = 0.0;
  Seconds free_at_ = 0.0;
};

}  // namespace

ReplayResult replay_oracle(std::span<const Seconds> arrivals, std::span<const int> assignments,
                           const ReplayConfig& config) {
  if (arrivals.size() != assignments.size()) {
    throw DataError("trace has " + std::to_string(arrivals.size()) + " arrivals but " +
                    std::to_string(assignments.size()) + " assignments");
  }
  if (config.num_servers < 1) throw DataError("replay needs at least one server");
  if (config.initial_state != PowerState::On && config.initial_state != PowerState::Sleep) {
    throw DataError("replay initial state must be on or sleep");
  }
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (!(arrivals[i] >= 0.0) || (i > 0 && !(arrivals[i] > arrivals[i - 1]))) {
      throw DataError("arrival " + std::to_string(i) + " is not strictly increasing");
    }
    if (assignments[i] < 0 || assignments[i] >= config.num_servers) {
      throw DataError("assignment " + std::to_string(i) + " is out of range");
    }
  }

  std::vector<ServerReplay> servers(static_cast<std::size_t>(config.num_servers),
                                    ServerReplay(config));
  ReplayResult out;
  out.latencies.resize(arrivals.size());
  out.completions.resize(arrivals.size());
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    auto& srv = servers[static_cast<std::size_t>(assignments[i])];
    const Seconds start = srv.arrive(arrivals[i]);
    out.completions[i] = start + config.service_time;
    out.latencies[i] = out.completions[i] - arrivals[i];
  }

  out.horizon = config.horizon.value_or(0.0);
  if (!config.horizon) {
    for (Seconds c : out.completions) out.horizon = std::max(out.horizon, c);
  }
  for (auto& srv : servers) {
    const double e = srv.energy(config.warmup, out.horizon);
    out.energy_per_server.push_back(e);
    out.energy += e;
  }
  return out;
}

ComparisonReport compare(const ResultsTable& a, const ResultsTable& b) {
  const auto agg_a = aggregate_by_design(a);
  const auto agg_b = aggregate_by_design(b);
  std::map<DesignKey, const DesignAggregate*> index_b;
  for (const auto& d : agg_b) index_b.emplace(d.key, &d);

  ComparisonReport rep;
  std::size_t matched_b = 0;
  for (const auto& da : agg_a) {
    const auto it = index_b.find(da.key);
    if (it == index_b.end()) {
      ++rep.unmatched;
      continue;
    }
    ++matched_b;
    const auto& db = *it->second;
    DesignComparison c;
    c.key = da.key;
    c.latency_a = da.avg_latency;
    c.latency_b = db.avg_latency;
    c.power_a = da.total_power;
    c.power_b = db.total_power;
    c.delta_latency = delta(c.latency_a, c.latency_b);
    c.delta_power = delta(c.power_a, c.power_b);
    rep.designs.push_back(c);
  }
  rep.unmatched += agg_b.size() - matched_b;

  if (!rep.designs.empty()) {
    const double n = static_cast<double>(rep.designs.size());
    for (std::size_t t = 0; t < kDeltaThresholds.size(); ++t) {
      const auto below_l = std::count_if(rep.designs.begin(), rep.designs.end(), [&](const auto& c) {
        return c.delta_latency < kDeltaThresholds[t];
      });
      const auto below_p = std::count_if(rep.designs.begin(), rep.designs.end(), [&](const auto& c) {
        return c.delta_power < kDeltaThresholds[t];
      });
      rep.latency_below[t] = static_cast<double>(below_l) / n;
      rep.power_below[t] = static_cast<double>(below_p) / n;
    }
  }
  return rep;
}

}  // namespace greenlb
