#include <gtest/gtest.h>

#include <regex>

#include "fixtures.hpp"

using namespace igs;
using igs::testing::kDatasetD;

namespace {

InductionResult prove_d() {
  SearchOptions o;
  o.mode = SearchMode::kProve;
  o.compat_test = false;
  return induce(parse_dataset(kDatasetD), o);
}

}  // namespace

TEST(MachineJson, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorParams p;
    p.seed = seed;
    Pfsa m = gen_random_pfsa(p);
    EXPECT_EQ(pfsa_from_json(json::parse(to_json(m).dump())), m);
  }
}

TEST(MachineJson, RejectsBadDocuments) {
  Pfsa m = null_machine(parse_dataset("AB"));
  json j = to_json(m);
  json dup = j;
  dup["arcs"].push_back(dup["arcs"][0]);
  EXPECT_THROW(pfsa_from_json(dup), DomainError);
  json unknown = j;
  unknown["arcs"][0]["symbol"] = "Z";
  EXPECT_THROW(pfsa_from_json(unknown), DomainError);
  json missing = j;
  missing.erase("states");
  EXPECT_THROW(pfsa_from_json(missing), ParseError);
}

TEST(ResultJson, RoundTrip) {
  InductionResult r = prove_d();
  EXPECT_EQ(result_from_json(json::parse(to_json(r, true).dump())), r);
  InductionResult no_time = result_from_json(json::parse(to_json(r).dump()));
  EXPECT_EQ(no_time.elapsed_seconds, 0.0);
  EXPECT_FALSE(to_json(r).contains("elapsed_seconds"));
}

TEST(TextReport, Fields) {
  InductionResult r = prove_d();
  std::string text = format_report(r);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(text, m, std::regex(R"(Automata cost is: (\d+\.\d{5})bits)")));
  EXPECT_NEAR(std::stod(m[1]), r.mml.total_bits(), 1e-5);
  ASSERT_TRUE(std::regex_search(text, m, std::regex(R"(Nodes examined (\d+), Nodes created (\d+), Completed PFSA (\d+))")));
  EXPECT_EQ(std::stoull(m[1]), r.nodes_examined);
  EXPECT_EQ(std::stoull(m[2]), r.nodes_created);
  EXPECT_EQ(std::stoull(m[3]), r.completed_pfsa);
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(Elapsed time: \d+:\d\d:\d\d \(\d+\.\d{3}s\))")));
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(arc->\s+A\s+B\s+C\s+d)")));
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(\n3\s+-\s+-\s+-\s+\[0\])")));
  EXPECT_NE(text.find("There are 4 states with a max of 2 arcs"), std::string::npos);
}

TEST(Dot, DelimiterDashedAndLabels) {
  Dataset d = parse_dataset("AB");
  std::string dot = to_dot(null_machine(d));
  EXPECT_NE(dot.find("0 -> 0 [label=\"A/1\"]"), std::string::npos);
  EXPECT_NE(dot.find("[label=\"d/1\", style=dashed]"), std::string::npos);
  EXPECT_EQ(dot.rfind("}\n"), dot.size() - 2);
}

TEST(BenchJson, RoundTripAndTable) {
  BenchConfig cfg;
  cfg.trials = 3;
  SearchOptions o;
  o.max_nodes = 2000;
  Algorithm broken{"broken", [](const Dataset&, std::uint64_t) -> InducerOutput { throw NoModelError(); }};
  BenchReport r = run_benchmark(cfg, {igs_algorithm(o), null_algorithm(), broken});
  EXPECT_EQ(bench_report_from_json(json::parse(to_json(r, true).dump())), r);
  std::string table = format_bench_table(r);
  EXPECT_NE(table.find("DNF"), std::string::npos);
  EXPECT_NE(table.find("null: "), std::string::npos);
  EXPECT_NE(table.find("broken: 0 exact, 0 near, 0 poor (ratio > 1.2), 3 DNF"), std::string::npos);
}
