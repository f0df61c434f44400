#include "premlog/runtime/config.hpp"

#include "premlog/errors.hpp"

namespace premlog {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Sequential:
      return "seq";
    case Mode::Bsp:
      return "bsp";
    case Mode::Ssp:
      return "ssp";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "seq" || text == "sequential") return Mode::Sequential;
  if (text == "bsp") return Mode::Bsp;
  if (text == "ssp") return Mode::Ssp;
  throw ValidationError("unknown mode '" + text + "' (expected seq, bsp or ssp)");
}

void RunConfig::check() const {
  if (worker_count == 0) throw ValidationError("worker count must be at least 1");
  if (local_iteration_cap == 0) throw ValidationError("local iteration cap must be at least 1");
  if (iteration_cap == 0) throw ValidationError("iteration cap must be at least 1");
  if (unit_cost < 0 || iteration_overhead < 0 || message_latency < 0 || per_tuple_latency < 0)
    throw ValidationError("cost model parameters must be non-negative");
  if (straggler) {
    if (straggler->rate < 0) throw ValidationError("straggler rate must be non-negative");
    if (straggler->slowdown < 1) throw ValidationError("straggler slowdown must be at least 1");
    if (straggler->duration <= 0) throw ValidationError("straggler duration must be positive");
  }
}

}  // namespace premlog
