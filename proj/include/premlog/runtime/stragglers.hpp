#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "premlog/runtime/config.hpp"

namespace premlog {

struct SlowInterval {
  double start = 0.0;
  double end = 0.0;
  bool operator==(const SlowInterval&) const = default;
};

/// Per-worker disruption episodes. Arrivals are Poisson with the configured
/// rate; each lasts `duration`, and overlapping episodes merge. Episodes are
/// sampled lazily, so any horizon sees the same prefix for a given seed.
class StragglerSchedule {
 public:
  StragglerSchedule() = default;
  StragglerSchedule(const StragglerConfig& cfg, std::size_t worker_count, std::uint64_t seed);

  bool active() const { return !streams_.empty(); }
  double slowdown() const { return cfg_.slowdown; }

  /// Virtual time at which `work_time` seconds of undisturbed compute started
  /// at `start` completes; inside an episode progress is `slowdown` times slower.
  double finish_time(std::size_t worker, double start, double work_time);

  /// Merged episodes of `worker` that start before `horizon`.
  std::vector<SlowInterval> intervals(std::size_t worker, double horizon);

 private:
  struct Stream {
    std::mt19937_64 rng;
    double next_arrival = 0.0;
    std::vector<SlowInterval> merged;
  };
  double sample_gap(Stream& s);
  void materialize_until(Stream& s, double t);

  StragglerConfig cfg_;
  std::vector<Stream> streams_;
};

/// Episodes per worker up to `horizon`; empty lists when no straggler is
/// configured or the rate is zero.
std::vector<std::vector<SlowInterval>> inject_stragglers(const RunConfig& cfg, double horizon);

}  // namespace premlog
