#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "premlog/edb.hpp"
#include "premlog/errors.hpp"
#include "premlog/hashing.hpp"
#include "premlog/parser.hpp"
#include "premlog/validate.hpp"

using namespace premlog;

namespace {

constexpr const char* kApsp =
    "path(X, Y, D) <- arc(X, Y, D).\n"
    "path(X, Y, D) <- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.\n"
    "shortestpath(X, Y, min<D>) <- path(X, Y, D).\n";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Independent FNV-1a + splitmix64 for the hash layout contract.
std::uint64_t reference_hash(const std::vector<std::int64_t>& values, std::uint64_t seed) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = 0xcbf29ce484222325ULL ^ splitmix(seed);
  for (auto v : values) {
    unsigned char bytes[8];
    std::memcpy(bytes, &v, 8);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return splitmix(h);
}

}  // namespace

TEST(Parser, ReadsRulesAggregatesAndMarkers) {
  Program p = parse_program(
      ".prem path.\n"
      "path(X, Y, min<D>) <- arc(X, Y, D).  % base case\n"
      "path(X, Y, min<D>) <- path(X, Z, A), arc(Z, Y, B), D = A + B. // step\n");
  ASSERT_EQ(p.rules().size(), 2u);
  EXPECT_EQ(p.prem_pushed(), std::set<std::string>{"path"});
  EXPECT_EQ(p.edb_predicates(), std::set<std::string>{"arc"});
  EXPECT_EQ(p.idb_predicates(), std::set<std::string>{"path"});
  const Rule& r = p.rules()[1];
  ASSERT_TRUE(r.head_aggregate);
  EXPECT_EQ(r.head_aggregate->kind, AggregateKind::Min);
  EXPECT_EQ(r.head_aggregate->cost_position, 2u);
  EXPECT_EQ(r.head_aggregate->groupby_positions, (std::vector<std::size_t>{0, 1}));
  ASSERT_EQ(r.arithmetic.size(), 1u);
  EXPECT_EQ(r.arithmetic[0].target, "D");
}

TEST(Parser, GuardsConstantsAndComparisons) {
  Program p = parse_program("q(X) <- e(X, 3, Y), Y < 10, X <= Y, h(X) = 1.\n");
  const Rule& r = p.rules()[0];
  ASSERT_TRUE(r.guard);
  EXPECT_EQ(r.guard->worker, std::optional<std::size_t>(1));
  EXPECT_TRUE(r.body[0].args[1].is_constant());
  EXPECT_EQ(r.body[0].args[1].value(), 3);
  EXPECT_EQ(r.comparisons.size(), 2u);
  Program symbolic = parse_program("q(X) <- e(X), h(X) = i.\n");
  EXPECT_FALSE(symbolic.rules()[0].guard->worker.has_value());
}

TEST(Parser, PrintParseRoundTrip) {
  for (const char* text : {kApsp, "tc(X, Y) <- arc(X, Y).\ntc(X, Y) <- tc(X, Z), tc(Z, Y).\n",
                           "q(X) <- e(X, 3, Y), Y < 10, h(X) = 0.\n"}) {
    Program p = parse_program(text);
    Program again = parse_program(print_program(p));
    EXPECT_EQ(p.rules(), again.rules()) << text;
    EXPECT_EQ(print_program(again), print_program(p));
  }
}

TEST(Parser, ReportsPositions) {
  try {
    parse_program("p(X) <- q(X).\np(X) <- q(X) r(X).\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
  EXPECT_THROW(parse_program("p(X) <- q(X)"), ParseError);
  EXPECT_THROW(parse_program("p(X <- q(X)."), ParseError);
  EXPECT_THROW(parse_program("p(X) <- q(X) & r(X)."), ParseError);
}

TEST(Program, RejectsUnsafeAndInconsistentRules) {
  EXPECT_THROW(parse_program("p(X, Y) <- q(X).\n"), ValidationError);
  EXPECT_THROW(parse_program("p(X) <- q(X).\np(X, Y) <- q(X), q(Y).\n"), ValidationError);
  EXPECT_THROW(parse_program("p(X) <- q(X), X < Y.\n"), ValidationError);
  EXPECT_THROW(parse_program(".prem nothing.\np(X) <- q(X).\n"), ValidationError);
}

TEST(Program, StrataFollowDependencies) {
  Program p = parse_program(kApsp);
  ASSERT_EQ(p.strata().size(), 2u);
  EXPECT_EQ(p.strata()[0], std::vector<std::string>{"path"});
  EXPECT_EQ(p.strata()[1], std::vector<std::string>{"shortestpath"});
  EXPECT_TRUE(p.is_recursive("path"));
  EXPECT_FALSE(p.is_recursive("shortestpath"));
  EXPECT_LT(p.stratum_of("path"), p.stratum_of("shortestpath"));
  EXPECT_THROW(p.stratum_of("arc"), ValidationError);
}

TEST(Program, MutualRecursionSharesAStratum) {
  Program p = parse_program(
      "even(X) <- zero(X).\n"
      "even(Y) <- odd(X), succ(X, Y).\n"
      "odd(Y) <- even(X), succ(X, Y).\n"
      "out(X) <- even(X).\n");
  EXPECT_EQ(p.stratum_of("even"), p.stratum_of("odd"));
  EXPECT_LT(p.stratum_of("odd"), p.stratum_of("out"));
}

TEST(Program, DetectsMirrorCopies) {
  Program p = parse_program(
      "tc(X, Y) <- arc(X, Y).\n"
      "tc(X, Y) <- tc(X, Z), tc__m1(Z, Y).\n"
      "tc__m1(X, Y) <- tc(X, Y).\n"
      "out(X, Y) <- tc(X, Y).\n");
  EXPECT_EQ(p.mirror_predicates(), std::set<std::string>{"tc__m1"});
  auto report = validate_program(p);
  const Clique* c = report.clique_of("tc");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->linearity, Linearity::Linear);
}

TEST(Validate, AggregateInsideRecursionNeedsMarker) {
  Program unmarked = parse_program(
      "path(X, Y, min<D>) <- arc(X, Y, D).\n"
      "path(X, Y, min<D>) <- path(X, Z, A), arc(Z, Y, B), D = A + B.\n");
  EXPECT_THROW(validate_program(unmarked), ValidationError);
  Program marked = parse_program(".prem path.\n" + print_program(unmarked));
  EXPECT_NO_THROW(validate_program(marked));
  EXPECT_THROW(validate_program(parse_program(".prem p.\np(X, min<D>) <- e(X, D).\n")), ValidationError);
}

TEST(Validate, ClassifiesLinearity) {
  auto linear = validate_program(parse_program(kApsp));
  EXPECT_EQ(linear.clique_of("path")->linearity, Linearity::Linear);
  auto nonlinear = validate_program(parse_program("tc(X, Y) <- arc(X, Y).\ntc(X, Y) <- tc(X, Z), tc(Z, Y).\n"));
  EXPECT_EQ(nonlinear.clique_of("tc")->linearity, Linearity::NonLinear);
  EXPECT_EQ(linear.clique_of("shortestpath"), nullptr);
}

TEST(Edb, ParsesCommentsDuplicatesAndUndirected) {
  RelationStore s = parse_edb("# header\n1 2 5\n1 2 5\n\n2\t3 7\n", "arc", 3);
  EXPECT_EQ(s.tuples("arc"), (std::set<Tuple>{{1, 2, 5}, {2, 3, 7}}));
  LoadOptions opts;
  opts.undirected = true;
  RelationStore u = parse_edb("1 2 5\n", "arc", 3, opts);
  EXPECT_EQ(u.tuples("arc"), (std::set<Tuple>{{1, 2, 5}, {2, 1, 5}}));
  RelationStore neg = parse_edb("-4 9223372036854775807\n", "e", 2);
  EXPECT_TRUE(neg.tuples("e").count({-4, 9223372036854775807LL}));
}

TEST(Edb, RejectsMalformedInput) {
  EXPECT_THROW(parse_edb("1 2\n", "arc", 3), LoadError);
  EXPECT_THROW(parse_edb("1 x 2\n", "arc", 3), LoadError);
  EXPECT_THROW(parse_edb("1 99999999999999999999 2\n", "arc", 3), LoadError);
  try {
    parse_edb("1 2 3\n4 5\n", "arc", 3);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_edb("/nonexistent/file.tsv", "arc", 3), LoadError);
}

TEST(Edb, SymbolsAreInternedAboveIntegers) {
  SymbolTable symbols;
  LoadOptions opts;
  opts.symbols = &symbols;
  RelationStore s = parse_edb("alice bob 3\n", "knows", 3, opts);
  const Tuple& t = *s.tuples("knows").begin();
  EXPECT_GE(t[0], kSymbolBase);
  EXPECT_EQ(symbols.name_of(t[0]), std::optional<std::string_view>("alice"));
  EXPECT_EQ(t[2], 3);
}

TEST(Edb, LoadsTheToyGraph) {
  LoadOptions opts;
  opts.undirected = true;
  RelationStore s = load_edb(std::filesystem::path(PREMLOG_TEST_DATA) / "toy.tsv", "arc", 3, opts);
  EXPECT_EQ(s.tuples("arc").size(), 2 * testgen::toy_edges().size());
}

TEST(Hashing, MatchesReferenceLayout) {
  // First splitmix64 output for state 0.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL})
    for (const Tuple& t : {Tuple{}, Tuple{1}, Tuple{1, 2, 3}, Tuple{-1, 1LL << 40}})
      EXPECT_EQ(stable_hash(t, seed), reference_hash(t, seed));
}

TEST(Hashing, BucketsCoverEveryWorkerEvenly) {
  constexpr std::size_t kWorkers = 4;
  std::vector<std::size_t> counts(kWorkers);
  for (Value v = 0; v < 4000; ++v) {
    Tuple key{v};
    std::size_t b = bucket_of(key, 7, kWorkers);
    ASSERT_LT(b, kWorkers);
    ++counts[b];
  }
  for (auto c : counts) EXPECT_NEAR(static_cast<double>(c), 1000.0, 150.0);
  Tuple key{5};
  EXPECT_EQ(bucket_of(key, 7, 1), 0u);
}

TEST(Golden, BuiltInProgramsParseToThemselves) {
  for (const char* name : {"apsp_linear.dl", "apsp_linear_pushed.dl", "apsp_nonlinear_pushed.dl", "tc.dl",
                           "apsp_linear_plan.dl", "apsp_nonlinear_pushed_plan.dl", "tc_plan.dl"}) {
    std::string text = read_file(std::filesystem::path(PREMLOG_TEST_DATA) / "golden" / name);
    ASSERT_FALSE(text.empty()) << name;
    EXPECT_EQ(print_program(parse_program(text)), text) << name;
  }
}
