#include "greenlb/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <string>

#include "greenlb/error.hpp"

namespace greenlb {

std::vector<Seconds> latency_samples(std::span<const Request> requests, Seconds warmup) {
  std::vector<Seconds> out;
  for (const auto& r : requests) {
    if (r.arrival < warmup) continue;
    if (auto l = r.latency()) out.push_back(*l);
  }
  return out;
}

Seconds average_latency(std::span<const Request> requests, Seconds warmup) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : requests) {
    if (r.arrival < warmup) continue;
    if (auto l = r.latency()) {
      sum += *l;
      ++n;
    }
  }
  if (n == 0) throw InsufficientDataError("no completed requests arrived after the warm-up");
  return sum / static_cast<double>(n);
}

std::array<Seconds, 4> state_durations(const StateTimeline& timeline, Seconds from, Seconds to) {
  std::array<Seconds, 4> d{};
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const Seconds start = std::max(timeline[i].start, from);
    const Seconds end = std::min(i + 1 < timeline.size() ? timeline[i + 1].start : to, to);
    if (end > start) d[index_of(timeline[i].state)] += end - start;
  }
  return d;
}

AveragePower average_power(std::span<const StateTimeline> timelines, const PowerModel& model,
                           Seconds warmup, Seconds horizon) {
  if (!(horizon > warmup)) {
    throw InsufficientDataError("power window [" + std::to_string(warmup) + ", " +
                                std::to_string(horizon) + "] is empty");
  }
  if (timelines.empty()) throw InsufficientDataError("no servers");
  double energy = 0.0;
  for (const auto& tl : timelines) {
    const auto d = state_durations(tl, warmup, horizon);
    for (auto s : kAllPowerStates) energy += power_of(s, model) * d[index_of(s)];
  }
  AveragePower ap;
  ap.total = energy / (horizon - warmup);
  ap.per_server = ap.total / static_cast<double>(timelines.size());
  return ap;
}

double student_t_halfwidth(std::span<const double> values, double confidence) {
  const std::size_t n = values.size();
  if (n < 2) throw InsufficientDataError("need at least two values for a confidence interval");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  return t * sd / std::sqrt(static_cast<double>(n));
}

BatchEstimate batch_means(std::span<const double> samples, std::size_t num_batches,
                          double confidence) {
  if (num_batches < 2) throw InsufficientDataError("batch means needs at least two batches");
  const std::size_t m = samples.size() / num_batches;
  if (m == 0) {
    throw InsufficientDataError(std::to_string(samples.size()) + " samples cannot fill " +
                                std::to_string(num_batches) + " batches");
  }
  std::vector<double> means(num_batches, 0.0);
  for (std::size_t b = 0; b < num_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += samples[b * m + i];
    means[b] = s / static_cast<double>(m);
  }
  BatchEstimate est;
  for (double v : means) est.mean += v;
  est.mean /= static_cast<double>(num_batches);
  est.ci_halfwidth = student_t_halfwidth(means, confidence);
  est.batch_size = m;
  return est;
}

BatchEstimate batch_means_power(std::span<const StateTimeline> timelines, const PowerModel& model,
                                Seconds warmup, Seconds horizon, std::size_t num_batches,
                                double confidence) {
  if (num_batches < 2) throw InsufficientDataError("batch means needs at least two batches");
  if (!(horizon > warmup)) throw InsufficientDataError("power window is empty");
  const Seconds width = (horizon - warmup) / static_cast<double>(num_batches);
  std::vector<double> energy(num_batches, 0.0);
  for (const auto& tl : timelines) {
    for (std::size_t i = 0; i < tl.size(); ++i) {
      const Seconds seg_start = std::max(tl[i].start, warmup);
      const Seconds seg_end = std::min(i + 1 < tl.size() ? tl[i + 1].start : horizon, horizon);
      if (!(seg_end > seg_start)) continue;
      const Watts p = power_of(tl[i].state, model);
      auto b = std::min(static_cast<std::size_t>((seg_start - warmup) / width), num_batches - 1);
      if (b > 0 && warmup + width * static_cast<double>(b) > seg_start) --b;
      for (; b < num_batches; ++b) {
        const Seconds lo = warmup + width * static_cast<double>(b);
        const Seconds hi = b + 1 == num_batches ? horizon : lo + width;
        const Seconds overlap = std::min(hi, seg_end) - std::max(lo, seg_start);
        if (overlap > 0.0) energy[b] += p * overlap;
        if (hi >= seg_end) break;
      }
    }
  }
  std::vector<double> means(num_batches);
  for (std::size_t b = 0; b < num_batches; ++b) {
    const Seconds lo = warmup + width * static_cast<double>(b);
    const Seconds hi = b + 1 == num_batches ? horizon : lo + width;
    means[b] = energy[b] / (hi - lo);
  }
  BatchEstimate est;
  for (double v : means) est.mean += v;
  est.mean /= static_cast<double>(num_batches);
  est.ci_halfwidth = student_t_halfwidth(means, confidence);
  est.batch_size = 0;
  return est;
}

}  // namespace greenlb
