#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "premlog/runtime/run.hpp"
#include "queries.hpp"

namespace premlog::cli {

struct RunRequest {
  Workload workload;
  RelationStore edb;
  RunConfig config;
  std::vector<DiscriminatingSet> partition_on;
};

struct RunOutcome {
  RunResult result;
  /// The result predicate, sorted.
  std::vector<Tuple> rows;
};

/// Partition, plan and run. The hash seed is the run's seed.
RunOutcome execute(const RunRequest& req);

/// One tuple per line, comma separated.
std::string to_csv(const std::vector<Tuple>& rows);
std::vector<Tuple> read_csv(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Plain decimal, six fractional digits.
std::string decimal(double v);

/// First tuple in exactly one of two sorted lists, as a message, or nothing
/// when they are equal.
std::optional<std::string> first_difference(const std::vector<Tuple>& left,
                                            const std::vector<Tuple>& right,
                                            std::size_t key_width);

struct BenchSpec {
  Workload workload;
  RelationStore edb;
  std::size_t workers = 4;
  std::vector<std::size_t> slacks{0, 3, 6};
  std::vector<bool> stragglers{true, false};
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  /// Cost model, local cap and straggler settings; mode, slack and seed are
  /// set per cell.
  RunConfig base;
  /// Episodes every ~14 virtual seconds lasting 5: roughly 30% of a run
  /// is disrupted.
  StragglerConfig straggler{0.07, 2.0, 5.0};
};

struct BenchRow {
  std::string workload;
  Mode mode = Mode::Bsp;
  std::size_t slack = 0;
  bool stragglers = false;
  double avg_compute_time = 0.0;
  double avg_wait_time = 0.0;
  double run_time = 0.0;
  double rounds = 0.0;
  double tuples_sent = 0.0;
};

struct TrendCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<TrendCheck> trends;
};

/// Every (slack, stragglers) cell run `repeats` times with seeds seed,
/// seed+1, ...; slack 0 runs BSP, anything else SSP. Trend checks are emitted
/// for the cells that exist.
BenchReport run_bench(const BenchSpec& spec);
std::string bench_csv(const BenchReport& report);
std::string trend_lines(const BenchReport& report);

/// Disrupted share of the run: merged straggler episodes inside [0, run_time)
/// summed over workers, divided by workers * run_time.
double disrupted_fraction(const RunConfig& cfg, double run_time);

}  // namespace premlog::cli
