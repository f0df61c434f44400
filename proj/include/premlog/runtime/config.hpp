#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace premlog {

struct VersionedUpdate;

enum class Mode { Sequential, Bsp, Ssp };

const char* to_string(Mode m);
/// Accepts "seq", "sequential", "bsp", "ssp".
Mode parse_mode(const std::string& text);

struct StragglerConfig {
  /// Poisson arrivals per virtual second, per worker.
  double rate = 0.0;
  double slowdown = 2.0;
  /// Length of one disruption, in virtual seconds.
  double duration = 1.0;
};

struct RunConfig {
  Mode mode = Mode::Ssp;
  std::size_t slack = 3;
  std::size_t local_iteration_cap = 4;
  std::size_t worker_count = 1;
  std::uint64_t rng_seed = 0;
  std::optional<StragglerConfig> straggler;
  bool virtual_time = true;

  /// Virtual seconds per unit of join work (tuples probed plus derived).
  double unit_cost = 1e-3;
  /// Work charged to every local iteration, empty or not.
  double iteration_overhead = 1.0;
  /// Virtual seconds per message, plus a per-tuple term.
  double message_latency = 0.05;
  double per_tuple_latency = 0.0;

  std::size_t iteration_cap = 1'000'000;
  /// Unit-length rounds and zero latency, with per-round snapshots of the
  /// constrained predicate. Used to compare BSP and SSP round by round.
  bool lockstep = false;
  /// Compare the union of worker results with a sequential evaluation.
  bool verify = true;
  bool trace = false;
  /// Virtual-time runs: called with every update (not finish notices) as it
  /// leaves its sender.
  std::function<void(const VersionedUpdate&)> on_send;

  /// The settings the protocol actually runs with: BSP is SSP with slack 0
  /// and one local iteration per round.
  std::size_t effective_slack() const { return mode == Mode::Bsp ? 0 : slack; }
  std::size_t effective_local_cap() const { return mode == Mode::Bsp ? 1 : local_iteration_cap; }

  /// Throws ValidationError on out-of-range settings.
  void check() const;
};

}  // namespace premlog
