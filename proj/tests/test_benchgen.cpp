#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace igs;

namespace {

GeneratorParams params(std::size_t states, std::size_t tokens, std::uint64_t seed, double density = 2.0) {
  GeneratorParams p;
  p.num_states = states;
  p.num_tokens = tokens;
  p.density = density;
  p.seed = seed;
  return p;
}

Algorithm exact_algorithm(const Pfsa& generating) {
  return {"oracle", [generating](const Dataset&, std::uint64_t) { return InducerOutput{generating, 0}; }};
}

}  // namespace

TEST(Generator, DeterministicInSeed) {
  EXPECT_EQ(gen_random_pfsa(params(5, 3, 7)), gen_random_pfsa(params(5, 3, 7)));
  EXPECT_NE(gen_random_pfsa(params(5, 3, 7)), gen_random_pfsa(params(5, 3, 8)));
}

TEST(Generator, ReachableAndTerminating) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorParams p = params(1 + seed % 12, 1 + seed % 4, seed, 1.0 + (seed % 3) * 0.5);
    Pfsa m = gen_random_pfsa(p);
    EXPECT_EQ(m.num_states(), p.num_states);
    auto seen = m.reachable();
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) << seed;
    EXPECT_TRUE(delimiter_reachable(m)) << seed;
    for (StateId s = 0; s < m.num_states(); ++s) {
      const Arc& d = m.arc(s, m.alphabet().delimiter());
      if (d.present()) EXPECT_EQ(d.dest, 0u);
    }
    EXPECT_NO_THROW(m.validate());
  }
}

TEST(Generator, FiveStatesThreeTokens) {
  Pfsa m = gen_random_pfsa(params(5, 3, 1));
  EXPECT_EQ(m.num_states(), 5u);
  EXPECT_GE(m.arc_count(), 5u);
  EXPECT_EQ(m.alphabet().token_count(), 3u);
}

TEST(Generator, InfeasibleDensity) {
  EXPECT_THROW(gen_random_pfsa(params(3, 2, 0, 3.5)), DomainError);
  EXPECT_THROW(gen_random_pfsa(params(0, 2, 0)), DomainError);
}

TEST(Sampling, OneStateLoop) {
  Alphabet alpha({"A"});
  Pfsa m(alpha, 1);
  m.set_arc(0, 0, 0, 1);
  m.set_arc(0, alpha.delimiter(), 0, 1);
  Dataset d = sample_until_coverage(m, 3);
  EXPECT_TRUE(accepts_all(m, d));
  Pfsa fit = fit_counts(m, d);
  EXPECT_GE(fit.arc(0, 0).count, 4u);
  EXPECT_GE(fit.arc(0, alpha.delimiter()).count, 4u);
}

TEST(Sampling, CoverageRule) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Pfsa m = gen_random_pfsa(params(6, 3, seed));
    for (std::uint64_t k : {1u, 4u, 9u}) {
      Dataset d = sample_until_coverage(m, seed, k);
      Pfsa fit = fit_counts(m, d);
      ASSERT_EQ(fit.num_states(), m.num_states());
      for (StateId s = 0; s < m.num_states(); ++s)
        for (Symbol y = 0; y < m.width(); ++y)
          if (m.arc(s, y).present()) EXPECT_GE(fit.arc(s, y).count, k);
    }
  }
}

TEST(Sampling, MoreCoverageNeverFewerSentences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Pfsa m = gen_random_pfsa(params(5, 3, seed));
    EXPECT_LE(sample_until_coverage(m, seed, 4).size(), sample_until_coverage(m, seed, 8).size());
  }
}

TEST(Sampling, OversampleAndReproducible) {
  Pfsa m = gen_random_pfsa(params(5, 3, 4));
  Dataset base = sample_until_coverage(m, 1);
  Dataset big = sample_until_coverage(m, 1, 4, 10.0);
  EXPECT_EQ(big.size(), base.size() * 10);
  EXPECT_EQ(sample_until_coverage(m, 1, 4, 10.0), big);
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(big[i], base[i]);
  EXPECT_THROW(sample_until_coverage(m, 1, 4, 0.5), DomainError);
}

TEST(Sampling, UnterminatedWalkFails) {
  Alphabet alpha({"A", "B"});
  Pfsa m(alpha, 2);
  m.set_arc(0, 0, 1, 1);
  m.set_arc(1, 1, 1, 1);
  m.set_arc(0, alpha.delimiter(), 0, 1);
  EXPECT_THROW(sample_until_coverage(m, 0), Error);
}

TEST(Ratio, SelfIsOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Pfsa m = gen_random_pfsa(params(4, 3, seed));
    Dataset d = sample_until_coverage(m, seed);
    EXPECT_EQ(mml_ratio(m, m, d), 1.0);
    EXPECT_GT(mml_ratio(null_machine(d), m, d), 0.0);
  }
}

TEST(Ratio, RejectingMachineErrors) {
  Pfsa m = gen_random_pfsa(params(4, 3, 2));
  Dataset d = sample_until_coverage(m, 2);
  Pfsa bare(d.alphabet(), 1);
  bare.set_arc(0, d.alphabet().delimiter(), 0, 1);
  EXPECT_THROW(mml_ratio(bare, m, d), NotAcceptedError);
}

TEST(Classify, Thresholds) {
  EXPECT_EQ(classify(std::nullopt, false), MatchClass::kDnf);
  EXPECT_EQ(classify(1.0, false), MatchClass::kExact);
  EXPECT_EQ(classify(0.97, false), MatchClass::kExact);
  EXPECT_EQ(classify(1.3, true), MatchClass::kExact);
  EXPECT_EQ(classify(1.1, false), MatchClass::kNear);
  EXPECT_EQ(classify(1.2, false), MatchClass::kNear);
  EXPECT_EQ(classify(1.2001, false), MatchClass::kPoor);
}

TEST(Benchmark, TrivialGeneratorAlwaysOne) {
  BenchConfig cfg;
  cfg.trials = 5;
  cfg.generator = params(1, 2, 0, 1.0);
  SearchOptions o;
  o.max_nodes = 2000;
  BenchReport r = run_benchmark(cfg, {igs_algorithm(o), ktails_algorithm(), null_algorithm()});
  ASSERT_EQ(r.rows.size(), 15u);
  // k-tails builds chains for a one-state source, so only the MML inducers
  // are held to 1.
  for (const BenchRow& row : r.rows) {
    ASSERT_TRUE(row.ratio.has_value());
    if (row.algorithm == "ktails") {
      EXPECT_GE(*row.ratio, 1.0);
    } else {
      EXPECT_NEAR(*row.ratio, 1.0, 1e-12) << row.algorithm;
    }
  }
}

TEST(Benchmark, ThreadCountDoesNotChangeReport) {
  BenchConfig cfg;
  cfg.trials = 6;
  cfg.seed = 77;
  SearchOptions o;
  o.max_nodes = 3000;
  std::vector<Algorithm> algos{igs_algorithm(o), ktails_algorithm(), null_algorithm()};
  BenchReport one = run_benchmark(cfg, algos);
  cfg.threads = 3;
  BenchReport three = run_benchmark(cfg, algos);
  for (auto* r : {&one, &three})
    for (auto& row : r->rows) row.elapsed_seconds = 0;
  EXPECT_EQ(one, three);
}

TEST(Benchmark, FailuresBecomeDnf) {
  BenchConfig cfg;
  cfg.trials = 3;
  Algorithm broken{"broken", [](const Dataset&, std::uint64_t) -> InducerOutput { throw NoModelError(); }};
  BenchReport r = run_benchmark(cfg, {broken});
  EXPECT_EQ(r.summary.at("broken").dnf, 3u);
  for (const BenchRow& row : r.rows) EXPECT_FALSE(row.ratio.has_value());
  EXPECT_THROW(run_benchmark(cfg, {}), DomainError);
}

TEST(Benchmark, NullNeverBeatsExactRecovery) {
  BenchConfig cfg;
  cfg.trials = 10;
  cfg.seed = 5;
  SearchOptions o;
  o.max_nodes = 20000;
  BenchReport r = run_benchmark(cfg, {igs_algorithm(o), null_algorithm()});
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const BenchRow& igs_row = r.rows[2 * t];
    const BenchRow& null_row = r.rows[2 * t + 1];
    if (igs_row.isomorphic) EXPECT_GE(*null_row.ratio, *igs_row.ratio);
  }
}

TEST(Sweep, GeneratorRecoveredOnItsOwnMachine) {
  SweepConfig cfg;
  cfg.generator = params(3, 2, 11);
  Pfsa g = gen_random_pfsa(cfg.generator);
  auto rows = run_sample_sweep(cfg, exact_algorithm(g));
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].ratio, 1.0);
    EXPECT_TRUE(rows[i].isomorphic);
    if (i > 0) EXPECT_GT(rows[i].sentences, rows[i - 1].sentences);
  }
}
