#include "premlog/hashing.hpp"

namespace premlog {

namespace {
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::span<const Value> values, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ mix64(seed);
  for (Value v : values) {
    auto u = static_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (u >> (8 * byte)) & 0xffU;
      h *= kFnvPrime;
    }
  }
  return mix64(h);
}

std::size_t bucket_of(std::span<const Value> key, std::uint64_t seed,
                      std::size_t worker_count) {
  if (worker_count <= 1) return 0;
  return static_cast<std::size_t>(stable_hash(key, seed) % worker_count);
}

}  // namespace premlog
