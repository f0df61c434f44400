#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "driver.hpp"
#include "oracles.hpp"
#include "premlog/errors.hpp"
#include "premlog/fixpoint.hpp"
#include "premlog/runtime/metrics.hpp"

using namespace premlog;
using namespace premlog::cli;

namespace {

struct Common {
  std::string program_file;
  std::string query;
  std::string edb;
  bool undirected = false;
  bool push_prem = false;
  bool allow_negative = false;
  std::string result;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(0, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Workload load_workload(const Common& c) {
  if (!c.program_file.empty() && !c.query.empty())
    throw ValidationError("give either --program or --query, not both");
  if (!c.program_file.empty()) return workload_from_text(slurp(c.program_file), c.push_prem, c.result);
  if (c.query.empty()) throw ValidationError("one of --program or --query is required");
  Workload w = builtin_query(c.query, c.push_prem);
  if (!c.result.empty()) w.result_predicate = c.result;
  return w;
}

// Negative weights can make a min query diverge, so they need an opt-in.
RelationStore load_input(const Workload& w, const Common& c) {
  LoadOptions opts;
  opts.undirected = c.undirected;
  RelationStore store = load_edb(c.edb, w.edb_predicate, w.program.arity(w.edb_predicate), opts);
  if (!c.allow_negative)
    for (const Tuple& t : store.tuples(w.edb_predicate))
      for (Value v : t)
        if (v < 0)
          throw ValidationError("negative value in " + c.edb + " (" + format_tuple(t) +
                                "); pass --allow-negative to accept it");
  return store;
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ValidationError("bad list entry '" + field + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

std::vector<bool> parse_switches(const std::string& text) {
  std::vector<bool> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field == "on") out.push_back(true);
    else if (field == "off") out.push_back(false);
    else throw ValidationError("--stragglers expects on/off values, got '" + field + "'");
  }
  if (out.empty()) throw ValidationError("empty --stragglers list");
  return out;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--program", c.program_file, "Rule file");
  cmd->add_option("--query", c.query, "Built-in query: apsp-linear, apsp-nonlinear, tc");
  cmd->add_option("--edb", c.edb, "Base relation file (whitespace separated)")->required();
  cmd->add_flag("--undirected", c.undirected, "Insert every arc in both directions");
  cmd->add_flag("--allow-negative", c.allow_negative, "Accept negative values in the input");
  cmd->add_flag("--push-prem", c.push_prem, "Move the stratified min/max into the recursion");
  cmd->add_option("--result", c.result, "Predicate written to the result CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive Datalog with min/max in recursion on partitioned workers"};
  app.require_subcommand(1);

  Common run_c;
  RunConfig cfg;
  std::string mode = "ssp";
  std::vector<std::string> partition_on;
  double straggler_rate = 0.0, straggler_slowdown = 2.0, straggler_duration = 1.0;
  bool wall_clock = false;
  std::string out_csv, metrics_path, trace_path;
  CLI::App* run_cmd = app.add_subcommand("run", "Evaluate a query");
  add_common(run_cmd, run_c);
  run_cmd->add_option("--mode", mode, "seq, bsp or ssp")->capture_default_str();
  run_cmd->add_option("--workers", cfg.worker_count, "Number of workers")->capture_default_str();
  run_cmd->add_option("--slack", cfg.slack, "Staleness bound")->capture_default_str();
  run_cmd->add_option("--local-cap", cfg.local_iteration_cap, "Local iterations per round")->capture_default_str();
  run_cmd->add_option("--partition-on", partition_on, "pred:pos[,pos] (first is the discriminating set)");
  run_cmd->add_option("--seed", cfg.rng_seed, "Hash and straggler seed")->capture_default_str();
  run_cmd->add_option("--straggler-rate", straggler_rate, "Episodes per virtual second per worker");
  run_cmd->add_option("--straggler-slowdown", straggler_slowdown, "Slowdown factor inside an episode");
  run_cmd->add_option("--straggler-duration", straggler_duration, "Episode length in virtual seconds");
  run_cmd->add_option("--iteration-cap", cfg.iteration_cap, "Abort after this many iterations");
  run_cmd->add_flag("--wall-clock", wall_clock, "Real threads instead of the virtual clock");
  run_cmd->add_option("--out", out_csv, "Result CSV (default: stdout)");
  run_cmd->add_option("--metrics", metrics_path, "Metrics JSON");
  run_cmd->add_option("--trace", trace_path, "Event log");

  Common cmp_c;
  std::vector<std::string> csvs;
  std::string oracle;
  std::size_t key_width = 0;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Diff two result CSVs, or one against an oracle");
  cmp_cmd->add_option("csv", csvs, "Result files")->required()->expected(1, 2);
  cmp_cmd->add_option("--oracle", oracle, "dijkstra, floyd, warshall or stratified");
  cmp_cmd->add_option("--edb", cmp_c.edb, "Base relation for the oracle");
  cmp_cmd->add_option("--query", cmp_c.query, "Query for the stratified oracle");
  cmp_cmd->add_option("--program", cmp_c.program_file, "Rule file for the stratified oracle");
  cmp_cmd->add_option("--result", cmp_c.result, "Result predicate for the stratified oracle");
  cmp_cmd->add_flag("--undirected", cmp_c.undirected, "Insert every arc in both directions");
  cmp_cmd->add_flag("--allow-negative", cmp_c.allow_negative, "Accept negative values in the input");
  cmp_cmd->add_option("--key-width", key_width, "Leading columns forming the key (default: all but the cost of 3-column rows)");

  Common bench_c;
  BenchSpec spec;
  std::string workload, slacks = "0,3,6", stragglers = "on,off", bench_out;
  double bench_rate = -1.0, bench_slowdown = -1.0, bench_duration = -1.0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Sweep slack and stragglers, report averages and trends");
  bench_cmd->add_option("--workload", workload, "apsp-linear, apsp-nonlinear or tc")->required();
  bench_cmd->add_option("--edb", bench_c.edb, "Base relation file")->required();
  bench_cmd->add_flag("--undirected", bench_c.undirected, "Insert every arc in both directions");
  bench_cmd->add_flag("--allow-negative", bench_c.allow_negative, "Accept negative values in the input");
  bench_cmd->add_option("--workers", spec.workers, "Number of workers")->capture_default_str();
  bench_cmd->add_option("--slacks", slacks, "Comma separated; 0 runs BSP")->capture_default_str();
  bench_cmd->add_option("--stragglers", stragglers, "on,off")->capture_default_str();
  bench_cmd->add_option("--repeats", spec.repeats, "Runs per cell")->capture_default_str();
  bench_cmd->add_option("--seed", spec.seed, "First seed")->capture_default_str();
  bench_cmd->add_option("--local-cap", spec.base.local_iteration_cap, "Local iterations per round")->capture_default_str();
  bench_cmd->add_option("--straggler-rate", bench_rate, "Episodes per virtual second per worker");
  bench_cmd->add_option("--straggler-slowdown", bench_slowdown, "Slowdown factor inside an episode");
  bench_cmd->add_option("--straggler-duration", bench_duration, "Episode length in virtual seconds");
  bench_cmd->add_option("--out", bench_out, "Report CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (run_cmd->parsed()) {
      Workload w = load_workload(run_c);
      RunRequest req{w, load_input(w, run_c), cfg, {}};
      req.config.mode = parse_mode(mode);
      req.config.virtual_time = !wall_clock;
      req.config.trace = !trace_path.empty();
      if (straggler_rate > 0.0)
        req.config.straggler = StragglerConfig{straggler_rate, straggler_slowdown, straggler_duration};
      for (const auto& s : partition_on) req.partition_on.push_back(parse_partition_spec(s));
      RunOutcome out = execute(req);
      if (out_csv.empty()) std::cout << to_csv(out.rows);
      else write_file(out_csv, to_csv(out.rows));
      if (!metrics_path.empty()) write_file(metrics_path, metrics_json(req.config, out.result));
      if (!trace_path.empty()) {
        std::string text;
        for (const auto& line : out.result.trace) text += line + "\n";
        write_file(trace_path, text);
      }
      return 0;
    }

    if (cmp_cmd->parsed()) {
      std::vector<Tuple> left = read_csv(csvs.at(0));
      std::vector<Tuple> right;
      if (csvs.size() == 2) {
        if (!oracle.empty()) throw ValidationError("give two CSVs or one CSV and --oracle");
        right = read_csv(csvs[1]);
      } else {
        if (oracle.empty()) throw ValidationError("one CSV needs --oracle");
        if (cmp_c.edb.empty()) throw ValidationError("--oracle needs --edb");
        if (oracle == "stratified") {
          if (cmp_c.query.empty() && cmp_c.program_file.empty()) cmp_c.query = "apsp-linear";
          Workload w = load_workload(cmp_c);
          FixpointResult fr = stratified_eval(w.program, load_input(w, cmp_c));
          if (const Relation* r = fr.interpretation.find(w.result_predicate)) right = r->sorted();
        } else {
          LoadOptions opts;
          opts.undirected = cmp_c.undirected;
          const std::size_t arity = oracle == "warshall" ? 2 : 3;
          const RelationStore store = load_edb(cmp_c.edb, "arc", arity, opts);
          std::vector<Tuple> arcs(store.tuples("arc").begin(), store.tuples("arc").end());
          if (oracle == "dijkstra") right = dijkstra_apsp(arcs);
          else if (oracle == "floyd") right = floyd_warshall_apsp(arcs);
          else if (oracle == "warshall") right = warshall_closure(arcs);
          else throw ValidationError("unknown oracle '" + oracle + "'");
        }
      }
      std::size_t width = key_width;
      if (width == 0) {
        const Tuple& sample = !left.empty() ? left.front() : right.empty() ? Tuple{} : right.front();
        width = sample.size() == 3 ? 2 : sample.size();
      }
      if (auto diff = first_difference(left, right, width)) {
        std::cout << "differ: " << *diff << "\n";
        return 1;
      }
      std::cout << "identical: " << left.size() << " rows\n";
      return 0;
    }

    if (bench_cmd->parsed()) {
      spec.workload = builtin_query(workload, workload != "tc");
      spec.edb = load_input(spec.workload, bench_c);
      spec.slacks = parse_list(slacks);
      spec.stragglers = parse_switches(stragglers);
      if (bench_rate >= 0.0) spec.straggler.rate = bench_rate;
      if (bench_slowdown >= 0.0) spec.straggler.slowdown = bench_slowdown;
      if (bench_duration >= 0.0) spec.straggler.duration = bench_duration;
      BenchReport report = run_bench(spec);
      if (bench_out.empty()) std::cout << bench_csv(report);
      else write_file(bench_out, bench_csv(report));
      std::cout << trend_lines(report);
      return 0;
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 3;
  } catch (const DeadlockDetected& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 3;
  } catch (const IterationCapExceeded& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  } catch (const ArithmeticOverflow& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
