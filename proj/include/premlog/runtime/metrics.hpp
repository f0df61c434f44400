#pragma once

#include <string>

#include "premlog/runtime/config.hpp"
#include "premlog/runtime/run.hpp"

namespace premlog {

/// Metrics document with keys in a fixed order, so identical runs produce
/// identical bytes. Ends with a newline.
std::string metrics_json(const RunConfig& cfg, const RunResult& result);

}  // namespace premlog
