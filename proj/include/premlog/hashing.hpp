#pragma once

#include <cstdint>
#include <span>

#include "premlog/value.hpp"

namespace premlog {

/// Seeded FNV-1a over the little-endian bytes of each value, followed by the
/// splitmix64 finalizer. Stable across platforms and processes.
std::uint64_t stable_hash(std::span<const Value> values, std::uint64_t seed);

std::uint64_t mix64(std::uint64_t x);

/// Worker id in [0, worker_count) for an already projected key.
std::size_t bucket_of(std::span<const Value> key, std::uint64_t seed,
                      std::size_t worker_count);

/// Parameters needed to evaluate `h(...) = i` guards.
struct GuardHash {
  std::size_t worker_count = 1;
  std::uint64_t seed = 0;
};

}  // namespace premlog
