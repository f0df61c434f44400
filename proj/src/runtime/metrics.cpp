#include "premlog/runtime/metrics.hpp"

#include <json.hpp>

namespace premlog {

std::string metrics_json(const RunConfig& cfg, const RunResult& result) {
  using nlohmann::ordered_json;
  ordered_json config;
  config["mode"] = to_string(cfg.mode);
  config["workers"] = cfg.worker_count;
  config["slack"] = cfg.effective_slack();
  config["local_cap"] = cfg.effective_local_cap();
  config["seed"] = cfg.rng_seed;
  config["virtual_time"] = cfg.virtual_time;
  config["unit_cost"] = cfg.unit_cost;
  config["iteration_overhead"] = cfg.iteration_overhead;
  config["message_latency"] = cfg.message_latency;
  config["per_tuple_latency"] = cfg.per_tuple_latency;
  if (cfg.straggler) {
    config["straggler"] = {{"rate", cfg.straggler->rate},
                           {"slowdown", cfg.straggler->slowdown},
                           {"duration", cfg.straggler->duration}};
  } else {
    config["straggler"] = nullptr;
  }

  ordered_json workers = ordered_json::array();
  for (const auto& m : result.per_worker) {
    ordered_json w;
    w["id"] = m.id;
    w["compute_time"] = m.compute_time;
    w["wait_time"] = m.wait_time;
    w["rounds"] = m.rounds;
    w["updates_sent"] = m.updates_sent;
    w["tuples_sent"] = m.tuples_sent;
    w["derivations_total"] = m.derivations_total;
    w["derivations_discarded"] = m.derivations_discarded;
    w["local_iterations"] = m.local_iterations;
    w["resumes"] = m.resumes;
    workers.push_back(std::move(w));
  }

  ordered_json global;
  global["rounds"] = result.rounds;
  global["run_time"] = result.run_time;
  global["terminated_cleanly"] = result.terminated_cleanly;
  global["result_checksum"] = result.result_checksum;

  ordered_json doc;
  doc["config"] = std::move(config);
  doc["per_worker"] = std::move(workers);
  doc["global"] = std::move(global);
  return doc.dump(2) + "\n";
}

}  // namespace premlog
