#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "driver.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "premlog/errors.hpp"

using namespace premlog;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Result premlog_cli(const std::string& args) {
  std::string cmd = std::string(PREMLOG_BINARY) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return (fs::path(PREMLOG_TEST_DATA) / name).string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("premlog_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const char* name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SequentialToyRunFindsTheCheapPath) {
  Result r = premlog_cli("run --query apsp-linear --push-prem --mode seq --undirected --edb " + data("toy.tsv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("1,4,5\n"), std::string::npos);
  EXPECT_EQ(r.out.find("1,4,7\n"), std::string::npos);
}

TEST_F(CliTest, ChainClosureUnderBsp) {
  Result r = premlog_cli("run --query tc --mode bsp --workers 2 --edb " + data("chain.tsv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out, "1,2\n1,3\n2,3\n");
}

TEST_F(CliTest, MissingInputPrintsUsage) {
  Result r = premlog_cli("run --query tc");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("--edb"), std::string::npos);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
  EXPECT_EQ(premlog_cli("run --query nope --edb " + data("chain.tsv")).code, 1);
  EXPECT_EQ(premlog_cli("run --query tc --edb /no/such/file").code, 1);
}

TEST_F(CliTest, NegativeWeightsNeedAnOptIn) {
  cli::write_file(tmp("neg.tsv"), "1 2 1\n1 3 2\n3 2 -10\n");
  Result refused = premlog_cli("run --query apsp-linear --push-prem --mode seq --edb " + tmp("neg.tsv"));
  EXPECT_EQ(refused.code, 1);
  EXPECT_NE(refused.out.find("--allow-negative"), std::string::npos);
  Result accepted =
      premlog_cli("run --query apsp-linear --push-prem --mode seq --allow-negative --edb " + tmp("neg.tsv"));
  EXPECT_EQ(accepted.code, 0) << accepted.out;
  EXPECT_EQ(accepted.out, "1,2,-8\n1,3,2\n3,2,-10\n");
}

TEST_F(CliTest, RunWritesResultMetricsAndTrace) {
  Result r = premlog_cli("run --query apsp-nonlinear --push-prem --mode ssp --workers 3 --slack 2 --undirected --edb " +
                         data("toy.tsv") + " --out " + tmp("r.csv") + " --metrics " + tmp("m.json") + " --trace " +
                         tmp("t.log"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(cli::read_csv(tmp("r.csv")), cli::floyd_warshall_apsp(testgen::symmetric(testgen::toy_edges())));
  EXPECT_NE(slurp(tmp("m.json")).find("\"result_checksum\""), std::string::npos);
  EXPECT_EQ(slurp(tmp("t.log")).rfind("0.000000 0 phase 0\n", 0), 0u);
  Result again = premlog_cli("compare " + tmp("r.csv") + " --oracle dijkstra --undirected --edb " + data("toy.tsv"));
  EXPECT_EQ(again.code, 0) << again.out;
}

TEST_F(CliTest, ChainTraceMatchesGolden) {
  ASSERT_EQ(premlog_cli("run --query tc --mode bsp --workers 2 --edb " + data("chain.tsv") + " --trace " +
                        tmp("t.log"))
                .code,
            0);
  EXPECT_EQ(slurp(tmp("t.log")), slurp(data("golden/tc_chain_bsp2.trace")));
}

TEST_F(CliTest, CompareReportsTheFirstDifferingKey) {
  ASSERT_EQ(premlog_cli("run --query apsp-linear --push-prem --undirected --mode seq --edb " + data("toy.tsv") +
                        " --out " + tmp("a.csv"))
                .code,
            0);
  Result same = premlog_cli("compare " + tmp("a.csv") + " " + tmp("a.csv"));
  EXPECT_EQ(same.code, 0);
  EXPECT_NE(same.out.find("identical: 64 rows"), std::string::npos);
  auto rows = cli::read_csv(tmp("a.csv"));
  for (auto& t : rows)
    if (t[0] == 1 && t[1] == 4) t[2] = 7;
  cli::write_file(tmp("b.csv"), cli::to_csv(rows));
  Result diff = premlog_cli("compare " + tmp("a.csv") + " " + tmp("b.csv"));
  EXPECT_EQ(diff.code, 1);
  EXPECT_NE(diff.out.find("1,4"), std::string::npos) << diff.out;
  // The stratified program only terminates on acyclic input.
  cli::write_file(tmp("dag.tsv"), "1 2 1\n2 3 1\n1 3 5\n");
  cli::write_file(tmp("dag.csv"), "1,2,1\n1,3,2\n2,3,1\n");
  EXPECT_EQ(premlog_cli("compare " + tmp("dag.csv") + " --oracle stratified --edb " + tmp("dag.tsv")).code, 0);
}

TEST_F(CliTest, BenchGridHasOneRowPerCell) {
  Result r = premlog_cli("bench --workload apsp-nonlinear --undirected --edb " + data("toy.tsv") +
                         " --workers 2 --slacks 0,3 --stragglers on,off --repeats 2 --out " + tmp("b.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::string csv = slurp(tmp("b.csv"));
  EXPECT_EQ(csv.rfind("workload,mode,slack,stragglers,avg_compute_time,avg_wait_time,run_time,rounds,tuples_sent\n", 0),
            0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  Result single = premlog_cli("bench --workload tc --edb " + data("chain.tsv") + " --slacks 0 --stragglers off");
  ASSERT_EQ(single.code, 0) << single.out;
  EXPECT_NE(single.out.find("tc,bsp,0,off,"), std::string::npos) << single.out;
}

// Property: the two independent APSP oracles agree on random graphs.
TEST(OracleProperty, DijkstraMatchesFloydWarshall) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto arcs = testgen::random_digraph(seed, 14, 0.25, 0, 30);
    EXPECT_EQ(cli::dijkstra_apsp(arcs), cli::floyd_warshall_apsp(arcs)) << "seed " << seed;
  }
  // A cycle back to the source counts as a walk of at least one arc.
  EXPECT_EQ(cli::floyd_warshall_apsp({{1, 2, 3}, {2, 1, 4}}),
            (std::vector<Tuple>{{1, 1, 7}, {1, 2, 3}, {2, 1, 4}, {2, 2, 7}}));
  EXPECT_EQ(cli::warshall_closure({{1, 2}, {2, 3}}), (std::vector<Tuple>{{1, 2}, {1, 3}, {2, 3}}));
}

TEST(Bench, ClosureSendsTheSameTuplesAtEverySlack) {
  cli::BenchSpec spec;
  spec.workload = cli::builtin_query("tc", false);
  spec.edb = testgen::store_of("arc", 2, testgen::unweighted(testgen::symmetric(testgen::toy_edges())));
  spec.workers = 3;
  spec.stragglers = {false};
  spec.repeats = 2;
  cli::BenchReport report = cli::run_bench(spec);
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_EQ(report.rows[0].mode, Mode::Bsp);
  for (const auto& row : report.rows) EXPECT_EQ(row.tuples_sent, report.rows[0].tuples_sent);
}

TEST(Csv, RoundTripAndErrors) {
  fs::path p = fs::temp_directory_path() / "premlog_csv_roundtrip.csv";
  cli::write_file(p, "3,1\n1,2\n1,2\n");
  EXPECT_EQ(cli::read_csv(p), (std::vector<Tuple>{{1, 2}, {3, 1}}));
  cli::write_file(p, "1,x\n");
  EXPECT_THROW(cli::read_csv(p), LoadError);
  fs::remove(p);
  EXPECT_EQ(cli::decimal(0.5), "0.500000");
  EXPECT_FALSE(cli::first_difference({{1, 2, 3}}, {{1, 2, 3}}, 2));
  auto d = cli::first_difference({{1, 2, 3}}, {{1, 2, 4}}, 2);
  ASSERT_TRUE(d);
  EXPECT_NE(d->find("1,2"), std::string::npos);
}
