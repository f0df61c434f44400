#include "premlog/runtime/stragglers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "premlog/hashing.hpp"

namespace premlog {

StragglerSchedule::StragglerSchedule(const StragglerConfig& cfg, std::size_t worker_count,
                                     std::uint64_t seed)
    : cfg_(cfg) {
  if (cfg.rate <= 0.0) return;
  for (std::size_t w = 0; w < worker_count; ++w) {
    Stream s;
    s.rng.seed(mix64(seed ^ mix64(w + 1)));
    s.next_arrival = sample_gap(s);
    streams_.push_back(std::move(s));
  }
}

double StragglerSchedule::sample_gap(Stream& s) {
  // 53 random bits in [0, 1); the distribution objects of the standard
  // library are not reproducible across implementations.
  double u = static_cast<double>(s.rng() >> 11) * 0x1.0p-53;
  return -std::log1p(-u) / cfg_.rate;
}

void StragglerSchedule::materialize_until(Stream& s, double t) {
  while (s.next_arrival <= t) {
    double a = s.next_arrival;
    double e = a + cfg_.duration;
    if (!s.merged.empty() && a <= s.merged.back().end) {
      s.merged.back().end = std::max(s.merged.back().end, e);
    } else {
      s.merged.push_back({a, e});
    }
    s.next_arrival = a + sample_gap(s);
  }
}

double StragglerSchedule::finish_time(std::size_t worker, double start, double work_time) {
  if (!active() || work_time <= 0.0) return start + std::max(work_time, 0.0);
  Stream& s = streams_.at(worker);
  const double f = cfg_.slowdown;
  double t = start;
  double remaining = work_time;
  for (;;) {
    materialize_until(s, t);
    // Earlier queries may have sampled past t, so look t up instead of
    // assuming it falls in the last episode.
    const std::size_t k = static_cast<std::size_t>(
        std::upper_bound(s.merged.begin(), s.merged.end(), t,
                         [](double v, const SlowInterval& iv) { return v < iv.end; }) -
        s.merged.begin());
    if (k < s.merged.size() && s.merged[k].start <= t) {
      double end;
      do {
        end = s.merged[k].end;
        materialize_until(s, end);
      } while (s.merged[k].end != end);
      double capacity = (end - t) / f;
      if (remaining <= capacity) return t + remaining * f;
      remaining -= capacity;
      t = end;
    } else {
      const double next = k < s.merged.size() ? s.merged[k].start : s.next_arrival;
      double gap = next - t;
      if (remaining <= gap) return t + remaining;
      remaining -= gap;
      t = next;
    }
  }
}

std::vector<SlowInterval> StragglerSchedule::intervals(std::size_t worker, double horizon) {
  if (!active()) return {};
  Stream& s = streams_.at(worker);
  materialize_until(s, horizon);
  std::vector<SlowInterval> out;
  for (const auto& iv : s.merged)
    if (iv.start < horizon) out.push_back(iv);
  return out;
}

std::vector<std::vector<SlowInterval>> inject_stragglers(const RunConfig& cfg, double horizon) {
  std::vector<std::vector<SlowInterval>> out(cfg.worker_count);
  if (!cfg.straggler) return out;
  StragglerSchedule schedule(*cfg.straggler, cfg.worker_count, cfg.rng_seed);
  for (std::size_t w = 0; w < cfg.worker_count; ++w) out[w] = schedule.intervals(w, horizon);
  return out;
}

}  // namespace premlog
