#pragma once

// Random generating machines, sampling to arc coverage, MML ratios and the
// benchmark harness built on them.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "igs/automaton.hpp"
#include "igs/baselines.hpp"
#include "igs/error.hpp"
#include "igs/mml.hpp"
#include "igs/search.hpp"

namespace igs {

struct GeneratorParams {
  std::size_t num_states = 5;
  std::size_t num_tokens = 3;
  double density = 2.0;                  // target mean out-degree, delimiter arcs included
  std::uint64_t delimiter_weight = 1;    // sampling weight of a delimiter arc relative to a token arc
  double extra_delimiter_rate = 0.2;     // chance a non-leaf, non-start state also ends sentences
  std::uint64_t seed = 0;

  void validate() const {
    if (num_states < 1) throw DomainError("generator needs at least one state");
    if (num_tokens < 1) throw DomainError("generator needs at least one token");
    if (!(density > 0.0) || density > static_cast<double>(num_tokens + 1))
      throw DomainError("density " + std::to_string(density) + " infeasible for " +
                        std::to_string(num_tokens) + " tokens");
    if (delimiter_weight < 1) throw DomainError("delimiter weight must be positive");
  }
};

/// "A".."Z", then zero-padded "t026"... so sorted order is generation order.
inline std::vector<std::string> generated_token_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    if (n <= 26) {
      names.emplace_back(1, static_cast<char>('A' + i));
    } else {
      std::string digits = std::to_string(i);
      names.push_back("t" + std::string(4 - std::min<std::size_t>(4, digits.size()), '0') + digits);
    }
  }
  return names;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(a)) ^ b);
}

/// Random machine whose arc counts are sampling weights. A random spanning
/// arborescence from state 0 makes every state reachable; its leaves end
/// sentences, so every state reaches a delimiter; random token arcs then fill
/// up to the target density.
inline Pfsa gen_random_pfsa(const GeneratorParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  Alphabet alphabet(generated_token_names(p.num_tokens));
  const std::size_t S = p.num_states;
  const std::size_t T = p.num_tokens;
  const Symbol delim = alphabet.delimiter();
  Pfsa m(alphabet, S);

  auto free_tokens = [&](StateId s) {
    std::vector<Symbol> out;
    for (Symbol y = 0; y < T; ++y)
      if (!m.arc(s, y).present()) out.push_back(y);
    return out;
  };

  for (StateId child = 1; child < S; ++child) {
    std::vector<StateId> parents;
    for (StateId s = 0; s < child; ++s)
      if (!free_tokens(s).empty()) parents.push_back(s);
    StateId parent = parents[uniform_index(rng, parents.size())];
    auto tokens = free_tokens(parent);
    m.set_arc(parent, tokens[uniform_index(rng, tokens.size())], child, 1);
  }
  if (S == 1) m.set_arc(0, static_cast<Symbol>(uniform_index(rng, T)), 0, 1);

  for (StateId s = 0; s < S; ++s) {
    bool leaf = m.out_degree(s) == 0;
    bool extra = s != 0 && uniform_unit(rng) < p.extra_delimiter_rate;
    if (leaf || extra || S == 1) m.set_arc(s, delim, 0, p.delimiter_weight);
  }

  const auto target = static_cast<std::size_t>(std::llround(p.density * static_cast<double>(S)));
  std::vector<std::pair<StateId, Symbol>> slots;
  for (StateId s = 0; s < S; ++s)
    for (Symbol y : free_tokens(s)) slots.emplace_back(s, y);
  while (m.arc_count() < target && !slots.empty()) {
    std::size_t pick = uniform_index(rng, slots.size());
    auto [s, y] = slots[pick];
    slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(pick));
    m.set_arc(s, y, static_cast<StateId>(uniform_index(rng, S)), 1);
  }
  return canonicalize(m);
}

/// True when every state can reach a delimiter arc.
inline bool delimiter_reachable(const Pfsa& m) {
  const Symbol delim = m.alphabet().delimiter();
  std::vector<bool> good(m.num_states(), false);
  for (StateId s = 0; s < m.num_states(); ++s) good[s] = m.arc(s, delim).present();
  for (bool changed = true; changed;) {
    changed = false;
    for (StateId s = 0; s < m.num_states(); ++s) {
      if (good[s]) continue;
      for (const Arc& a : m.arcs_from(s))
        if (a.present() && good[a.dest]) {
          good[s] = true;
          changed = true;
          break;
        }
    }
  }
  return std::all_of(good.begin(), good.end(), [](bool g) { return g; });
}

inline constexpr std::uint64_t kMaxWalkLength = 1'000'000;

/// Random walks from the start state, each arc taken with probability
/// proportional to its count, until every arc has been crossed at least
/// `min_per_arc` times; then more sentences until the sample is `oversample`
/// times that size. Walks that end before emitting a token are discarded.
inline Dataset sample_until_coverage(const Pfsa& m, std::uint64_t seed, std::uint64_t min_per_arc = 4,
                                     double oversample = 1.0) {
  m.validate();
  if (oversample < 1.0) throw DomainError("oversample must be at least 1");
  const Symbol delim = m.alphabet().delimiter();
  const std::size_t width = m.width();
  bool start_emits = false;
  for (Symbol y = 0; y < delim; ++y) start_emits |= m.arc(0, y).present();
  if (!start_emits) throw DomainError("start state has no token arc; every sentence would be empty");

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> tally(m.num_states() * width, 0);
  std::vector<Sentence> sentences;

  auto walk = [&]() -> Sentence {
    for (;;) {
      Sentence s;
      std::vector<std::size_t> used;
      StateId state = 0;
      for (std::uint64_t steps = 0;; ++steps) {
        if (steps >= kMaxWalkLength)
          throw Error("random walk exceeded " + std::to_string(kMaxWalkLength) +
                      " transitions; a delimiter is unreachable");
        auto arcs = m.arcs_from(state);
        std::uint64_t total = 0;
        for (const Arc& a : arcs)
          if (a.present()) total += a.count;
        if (total == 0) throw Error("state " + std::to_string(state) + " has no outgoing arcs");
        std::uint64_t r = rng() % total;
        Symbol y = 0;
        for (; y < width; ++y) {
          if (!arcs[y].present()) continue;
          if (r < arcs[y].count) break;
          r -= arcs[y].count;
        }
        used.push_back(std::size_t{state} * width + y);
        if (y == delim) break;
        s.push_back(y);
        state = arcs[y].dest;
      }
      if (s.empty()) continue;
      for (std::size_t slot : used) ++tally[slot];
      return s;
    }
  };

  auto covered = [&] {
    for (StateId s = 0; s < m.num_states(); ++s)
      for (Symbol y = 0; y < width; ++y)
        if (m.arc(s, y).present() && tally[std::size_t{s} * width + y] < min_per_arc) return false;
    return true;
  };

  while (sentences.empty() || !covered()) sentences.push_back(walk());
  const auto target = static_cast<std::size_t>(std::ceil(static_cast<double>(sentences.size()) * oversample));
  while (sentences.size() < target) sentences.push_back(walk());
  return Dataset(m.alphabet(), std::move(sentences));
}

/// Induced MML over generating MML, both refit to and scored on `d`.
inline double mml_ratio(const Pfsa& induced, const Pfsa& generating, const Dataset& d,
                        const Criterion& criterion = default_criterion()) {
  double num = criterion.evaluate(tally_of(fit_counts(induced, d))).total_nits();
  double den = criterion.evaluate(tally_of(fit_counts(generating, d))).total_nits();
  return num / den;
}

inline constexpr double kPoorMatchRatio = 1.2;
inline constexpr double kExactRatioSlack = 5e-4;  // "1.000" at three decimals

enum class MatchClass { kExact, kNear, kPoor, kDnf };

inline MatchClass classify(std::optional<double> ratio, bool isomorphic) {
  if (!ratio) return MatchClass::kDnf;
  if (isomorphic || *ratio <= 1.0 + kExactRatioSlack) return MatchClass::kExact;
  return *ratio > kPoorMatchRatio ? MatchClass::kPoor : MatchClass::kNear;
}

// ---------------------------------------------------------------------------
// Algorithms under test

struct InducerOutput {
  Pfsa machine;
  std::uint64_t nodes = 0;
};

/// Throws to signal "did not finish".
using Inducer = std::function<InducerOutput(const Dataset&, std::uint64_t seed)>;

struct Algorithm {
  std::string name;
  Inducer run;
};

inline Algorithm igs_algorithm(SearchOptions opts, std::string name = "igs") {
  return {std::move(name), [opts](const Dataset& d, std::uint64_t seed) {
            SearchOptions o = opts;
            o.seed = seed;
            InductionResult r = induce(d, o);
            return InducerOutput{std::move(r.machine), r.nodes_examined};
          }};
}

/// k-tails; gives up (DNF) when the prefix tree exceeds `max_states`.
inline Algorithm ktails_algorithm(std::size_t k = 3, std::size_t max_states = 20000) {
  return {"ktails", [k, max_states](const Dataset& d, std::uint64_t) {
            Pfsa tree = build_prefix_tree(d);
            if (tree.num_states() > max_states) throw Error("prefix tree too large");
            return InducerOutput{k_tails_reduce(tree, k), 0};
          }};
}

inline Algorithm null_algorithm() {
  return {"null", [](const Dataset& d, std::uint64_t) { return InducerOutput{null_machine(d), 0}; }};
}

// ---------------------------------------------------------------------------
// Harness

struct BenchConfig {
  std::size_t trials = 25;
  GeneratorParams generator;
  std::uint64_t min_per_arc = 4;
  double oversample = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct BenchRow {
  std::size_t trial = 0;
  std::size_t gen_states = 0;
  std::size_t gen_arcs = 0;
  std::size_t sentences = 0;
  std::uint64_t tokens = 0;
  std::string algorithm;
  std::optional<double> ratio;  // empty for DNF
  bool isomorphic = false;
  std::size_t induced_states = 0;
  std::uint64_t nodes = 0;
  double elapsed_seconds = 0.0;
  bool dnf = false;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchSummary {
  std::size_t exact = 0;
  std::size_t near = 0;
  std::size_t poor = 0;
  std::size_t dnf = 0;

  friend bool operator==(const BenchSummary&, const BenchSummary&) = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::map<std::string, BenchSummary> summary;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

namespace detail {

inline BenchRow run_trial_algorithm(const Algorithm& algo, const Pfsa& generating, const Dataset& d,
                                    std::uint64_t seed) {
  BenchRow row;
  row.algorithm = algo.name;
  auto start = std::chrono::steady_clock::now();
  try {
    InducerOutput out = algo.run(d, seed);
    Pfsa fitted = fit_counts(out.machine, d);
    row.ratio = mml_ratio(fitted, generating, d);
    row.isomorphic = is_isomorphic(fitted, fit_counts(generating, d));
    row.induced_states = fitted.num_states();
    row.nodes = out.nodes;
  } catch (const std::exception&) {
    row.dnf = true;
    row.ratio.reset();
  }
  row.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline void summarize(BenchReport& report) {
  report.summary.clear();
  for (const BenchRow& row : report.rows) {
    BenchSummary& s = report.summary[row.algorithm];
    switch (classify(row.ratio, row.isomorphic)) {
      case MatchClass::kExact: ++s.exact; break;
      case MatchClass::kNear: ++s.near; break;
      case MatchClass::kPoor: ++s.poor; break;
      case MatchClass::kDnf: ++s.dnf; break;
    }
  }
}

/// Per trial: generate a machine, sample it to coverage, run every algorithm.
/// Trial seeds derive from the master seed, so the report does not depend on
/// the thread count.
inline BenchReport run_benchmark(const BenchConfig& cfg, const std::vector<Algorithm>& algorithms) {
  if (algorithms.empty()) throw DomainError("benchmark needs at least one algorithm");
  std::vector<std::vector<BenchRow>> per_trial(cfg.trials);
  detail::parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
    GeneratorParams gp = cfg.generator;
    gp.seed = derive_seed(cfg.seed, trial, 0);
    Pfsa generating = gen_random_pfsa(gp);
    Dataset d = sample_until_coverage(generating, derive_seed(cfg.seed, trial, 1), cfg.min_per_arc, cfg.oversample);
    for (const Algorithm& algo : algorithms) {
      BenchRow row = detail::run_trial_algorithm(algo, generating, d, derive_seed(cfg.seed, trial, 2));
      row.trial = trial;
      row.gen_states = generating.num_states();
      row.gen_arcs = generating.arc_count();
      row.sentences = d.size();
      row.tokens = d.total_transitions() - d.size();
      per_trial[trial].push_back(std::move(row));
    }
  });
  BenchReport report;
  for (auto& rows : per_trial)
    for (auto& row : rows) report.rows.push_back(std::move(row));
  summarize(report);
  return report;
}

struct SweepConfig {
  GeneratorParams generator;
  std::vector<double> multipliers{1, 2, 4, 8};
  std::uint64_t min_per_arc = 4;
  std::uint64_t seed = 0;  // sampling and search; the machine comes from generator.seed
};

struct SweepRow {
  double multiplier = 1.0;
  std::size_t sentences = 0;
  std::uint64_t tokens = 0;
  std::size_t induced_states = 0;
  double mml_bits = 0.0;
  double ratio = 0.0;
  bool isomorphic = false;
  std::uint64_t nodes = 0;
  double elapsed_seconds = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// One fixed machine, growing samples drawn from a single stream so each
/// sample extends the previous one.
inline std::vector<SweepRow> run_sample_sweep(const SweepConfig& cfg, const Algorithm& algo) {
  Pfsa generating = gen_random_pfsa(cfg.generator);
  std::vector<SweepRow> rows;
  for (double mult : cfg.multipliers) {
    Dataset d = sample_until_coverage(generating, derive_seed(cfg.seed, 1), cfg.min_per_arc, mult);
    auto start = std::chrono::steady_clock::now();
    InducerOutput out = algo.run(d, derive_seed(cfg.seed, 2));
    SweepRow row;
    row.multiplier = mult;
    row.sentences = d.size();
    row.tokens = d.total_transitions() - d.size();
    Pfsa fitted = fit_counts(out.machine, d);
    row.induced_states = fitted.num_states();
    row.mml_bits = default_criterion().evaluate(tally_of(fitted)).total_bits();
    row.ratio = mml_ratio(fitted, generating, d);
    row.isomorphic = is_isomorphic(fitted, fit_counts(generating, d));
    row.nodes = out.nodes;
    row.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace igs
