#include "driver.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "premlog/errors.hpp"
#include "premlog/runtime/stragglers.hpp"

namespace premlog::cli {

RunOutcome execute(const RunRequest& req) {
  const std::size_t workers = req.config.mode == Mode::Sequential ? 1 : req.config.worker_count;
  PartitionFn f = default_partition(req.workload, workers, req.config.rng_seed, req.partition_on);
  auto plan = make_plan(req.workload, f, req.edb);
  RunOutcome out;
  out.result = run(plan, req.workload.gamma, req.config);
  if (const Relation* r = out.result.interpretation.find(req.workload.result_predicate))
    out.rows = r->sorted();
  return out;
}

std::string to_csv(const std::vector<Tuple>& rows) {
  std::string text;
  for (const auto& t : rows) {
    text += format_tuple(t, ',');
    text += '\n';
  }
  return text;
}

std::vector<Tuple> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(0, "cannot open " + path.string());
  std::vector<Tuple> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Tuple t;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        t.push_back(std::stoll(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw LoadError(lineno, path.string() + ": bad field '" + field + "'");
      }
    }
    rows.push_back(std::move(t));
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError(0, "cannot write " + path.string());
  out << text;
}

std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::optional<std::string> first_difference(const std::vector<Tuple>& left,
                                            const std::vector<Tuple>& right,
                                            std::size_t key_width) {
  auto key = [&](const Tuple& t) { return Tuple(t.begin(), t.begin() + std::min(key_width, t.size())); };
  std::map<Tuple, std::vector<Tuple>> l, r;
  for (const auto& t : left) l[key(t)].push_back(t);
  for (const auto& t : right) r[key(t)].push_back(t);
  auto describe = [](const std::vector<Tuple>& ts) {
    if (ts.empty()) return std::string("missing");
    std::string s;
    for (const auto& t : ts) s += (s.empty() ? "" : " ") + format_tuple(t, ',');
    return s;
  };
  std::set<Tuple> keys;
  for (const auto& [k, _] : l) keys.insert(k);
  for (const auto& [k, _] : r) keys.insert(k);
  for (const auto& k : keys) {
    const auto& a = l[k];
    const auto& b = r[k];
    if (a != b)
      return "key " + format_tuple(k, ',') + ": left " + describe(a) + ", right " + describe(b);
  }
  return std::nullopt;
}

namespace {

const BenchRow* find_row(const BenchReport& r, std::size_t slack, bool stragglers) {
  for (const auto& row : r.rows)
    if (row.slack == slack && row.stragglers == stragglers) return &row;
  return nullptr;
}

void add_trends(const BenchSpec& spec, BenchReport& report) {
  for (bool st : {false, true}) {
    const BenchRow* bsp = find_row(report, 0, st);
    const BenchRow* s3 = find_row(report, 3, st);
    const BenchRow* s6 = find_row(report, 6, st);
    const std::string tag = st ? "stragglers on" : "stragglers off";
    if (bsp && s3 && s6) {
      bool pass = bsp->avg_compute_time <= s3->avg_compute_time && s3->avg_compute_time <= s6->avg_compute_time;
      report.trends.push_back({"avg_compute_time bsp <= ssp s=3 <= ssp s=6, " + tag, pass,
                               decimal(bsp->avg_compute_time) + " " + decimal(s3->avg_compute_time) + " " +
                                   decimal(s6->avg_compute_time)});
    }
    if (st && spec.workload.gamma && bsp && s3) {
      report.trends.push_back({"run_time ssp s=3 < bsp, " + tag, s3->run_time < bsp->run_time,
                               decimal(s3->run_time) + " " + decimal(bsp->run_time)});
    }
    if (!st && !spec.workload.gamma && bsp && s6) {
      report.trends.push_back({"run_time bsp <= ssp s=6, " + tag, bsp->run_time <= s6->run_time,
                               decimal(bsp->run_time) + " " + decimal(s6->run_time)});
    }
    if (!st && !spec.workload.gamma) {
      std::vector<const BenchRow*> cells;
      for (const auto& row : report.rows)
        if (!row.stragglers) cells.push_back(&row);
      if (cells.size() > 1) {
        bool same = std::all_of(cells.begin(), cells.end(),
                                [&](const BenchRow* r) { return r->tuples_sent == cells.front()->tuples_sent; });
        std::string detail;
        for (const auto* r : cells) detail += (detail.empty() ? "" : " ") + decimal(r->tuples_sent);
        report.trends.push_back({"tuples_sent equal across slacks, " + tag, same, detail});
      }
    }
  }
}

}  // namespace

BenchReport run_bench(const BenchSpec& spec) {
  if (spec.repeats == 0) throw ValidationError("--repeats must be at least 1");
  BenchReport report;
  for (bool st : spec.stragglers) {
    for (std::size_t slack : spec.slacks) {
      BenchRow row;
      row.workload = spec.workload.name;
      row.mode = slack == 0 ? Mode::Bsp : Mode::Ssp;
      row.slack = slack;
      row.stragglers = st;
      for (std::size_t k = 0; k < spec.repeats; ++k) {
        RunRequest req{spec.workload, spec.edb, spec.base, {}};
        req.config.mode = row.mode;
        req.config.slack = slack;
        req.config.worker_count = spec.workers;
        req.config.rng_seed = spec.seed + k;
        req.config.straggler = st ? std::optional<StragglerConfig>(spec.straggler) : std::nullopt;
        RunResult r = execute(req).result;
        double compute = 0.0, wait = 0.0, tuples = 0.0;
        for (const auto& m : r.per_worker) {
          compute += m.compute_time;
          wait += m.wait_time;
          tuples += static_cast<double>(m.tuples_sent);
        }
        const double n = static_cast<double>(r.per_worker.size());
        row.avg_compute_time += compute / n;
        row.avg_wait_time += wait / n;
        row.run_time += r.run_time;
        row.rounds += static_cast<double>(r.rounds);
        row.tuples_sent += tuples;
      }
      const double k = static_cast<double>(spec.repeats);
      row.avg_compute_time /= k;
      row.avg_wait_time /= k;
      row.run_time /= k;
      row.rounds /= k;
      row.tuples_sent /= k;
      report.rows.push_back(row);
    }
  }
  add_trends(spec, report);
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::string text = "workload,mode,slack,stragglers,avg_compute_time,avg_wait_time,run_time,rounds,tuples_sent\n";
  for (const auto& r : report.rows) {
    text += r.workload + "," + to_string(r.mode) + "," + std::to_string(r.slack) + "," +
            (r.stragglers ? "on" : "off") + "," + decimal(r.avg_compute_time) + "," +
            decimal(r.avg_wait_time) + "," + decimal(r.run_time) + "," + decimal(r.rounds) + "," +
            decimal(r.tuples_sent) + "\n";
  }
  return text;
}

std::string trend_lines(const BenchReport& report) {
  std::string text;
  for (const auto& t : report.trends)
    text += std::string(t.pass ? "PASS " : "FAIL ") + t.name + " (" + t.detail + ")\n";
  return text;
}

double disrupted_fraction(const RunConfig& cfg, double run_time) {
  if (!cfg.straggler || run_time <= 0.0) return 0.0;
  auto episodes = inject_stragglers(cfg, run_time);
  double covered = 0.0;
  for (const auto& list : episodes)
    for (const auto& iv : list) covered += std::max(0.0, std::min(iv.end, run_time) - iv.start);
  return covered / (static_cast<double>(episodes.size()) * run_time);
}

}  // namespace premlog::cli
