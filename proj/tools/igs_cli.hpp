#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "igs/igs.hpp"

namespace igs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr const char* kEnvPrefix = "IGS_";

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string format = "auto";
  std::string mode = "stochastic";
  bool compat = true;
  bool compat_given = false;  // prove mode drops the default
  std::size_t node_cap = 150000;
  std::string mu_table = "1.0:0.50,0.8:0.35,0.5:0.10,0.0:0.05";
  std::string switch_ratio = "3:1";
  std::string expansion_order = "most-transitions";
  std::optional<std::uint64_t> budget_nodes;
  std::optional<double> timeout_secs;
  std::uint64_t seed = 0;
  std::string criterion = "wg";
  std::size_t k = 3;
  std::size_t states = 5;
  std::size_t tokens = 3;
  double density = 2.0;
  std::uint64_t min_per_arc = 4;
  double oversample = 1.0;
  std::size_t trials = 25;
  std::string algorithms = "igs,ktails,null";
  std::string sweep;
  std::string report = "text";
  std::size_t threads = 1;
  bool timing = false;
};

/// A problem with the flags themselves; reported as a usage error.
class UsageError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);)
    if (!part.empty()) out.push_back(part);
  return out;
}

inline double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in " + what);
  }
}

inline std::vector<MuChoice> parse_mu_table(const std::string& text) {
  std::vector<MuChoice> table;
  for (const auto& entry : split(text, ',')) {
    auto parts = split(entry, ':');
    if (parts.size() != 2) throw UsageError("--mu-table entries look like mu:probability");
    table.push_back({to_double(parts[0], "--mu-table"), to_double(parts[1], "--mu-table")});
  }
  return table;
}

inline SwitchRatio parse_switch_ratio(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError("--switch-ratio looks like 3:1");
  double a = to_double(parts[0], "--switch-ratio");
  double b = to_double(parts[1], "--switch-ratio");
  if (a < 0 || b < 0 || a != static_cast<unsigned>(a) || b != static_cast<unsigned>(b))
    throw UsageError("--switch-ratio needs non-negative integers");
  return {static_cast<unsigned>(a), static_cast<unsigned>(b)};
}

inline DatasetFormat parse_format(const std::string& f) {
  if (f == "auto") return DatasetFormat::kAuto;
  if (f == "slash") return DatasetFormat::kSlash;
  if (f == "lines") return DatasetFormat::kLines;
  throw UsageError("--format must be auto, slash or lines");
}

inline SearchOptions search_options(const RunConfig& cfg) {
  SearchOptions opts;
  if (cfg.mode == "prove") {
    opts.mode = SearchMode::kProve;
  } else if (cfg.mode == "greedy") {
    opts.mode = SearchMode::kGreedy;
  } else if (cfg.mode == "stochastic") {
    opts.mode = SearchMode::kStochastic;
  } else {
    throw UsageError("--mode must be prove, greedy or stochastic");
  }
  if (cfg.expansion_order == "most-transitions") {
    opts.expansion_order = ArcOrder::kMostTransitions;
  } else if (cfg.expansion_order == "fifo") {
    opts.expansion_order = ArcOrder::kFifo;
  } else {
    throw UsageError("--expansion-order must be most-transitions or fifo");
  }
  opts.compat_test = cfg.compat && (cfg.compat_given || opts.mode != SearchMode::kProve);
  opts.node_cap = cfg.node_cap;
  opts.mu_table = parse_mu_table(cfg.mu_table);
  opts.switch_ratio = parse_switch_ratio(cfg.switch_ratio);
  opts.seed = cfg.seed;
  opts.max_nodes = cfg.budget_nodes;
  opts.timeout_seconds = cfg.timeout_secs;
  try {
    opts.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return opts;
}

inline std::string read_file(const std::string& path) {
  if (path.empty()) throw UsageError("--input is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Dataset read_dataset(const RunConfig& cfg) {
  return parse_dataset(read_file(cfg.input), parse_format(cfg.format));
}

inline Pfsa read_machine(const RunConfig& cfg) {
  std::string text = read_file(cfg.input);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("machine file is not JSON: ") + e.what(), 0);
  }
  return pfsa_from_json(j.contains("machine") ? j.at("machine") : j);
}

inline void check_report(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (cfg.report == a) return;
  throw UsageError("--report '" + cfg.report + "' is not available for " + cfg.command);
}

inline std::string result_output(const RunConfig& cfg, const InductionResult& r) {
  if (cfg.report == "json") return to_json(r, cfg.timing).dump(2) + "\n";
  if (cfg.report == "dot") return to_dot(r.machine);
  return format_report(r);
}

inline std::string machine_output(const RunConfig& cfg, const Pfsa& m, const std::optional<MmlBreakdown>& mml) {
  if (cfg.report == "json") {
    json j = {{"machine", to_json(m)}};
    if (mml) j["mml"] = to_json(*mml);
    return j.dump(2) + "\n";
  }
  if (cfg.report == "dot") return to_dot(m);
  if (mml) return format_machine_report(m, *mml);
  std::ostringstream out;
  out << "There are " << m.num_states() << " states with a max of " << m.max_out_degree() << " arcs\n"
      << format_state_table(m);
  return out.str();
}

inline GeneratorParams generator_params(const RunConfig& cfg) {
  GeneratorParams p;
  p.num_states = cfg.states;
  p.num_tokens = cfg.tokens;
  p.density = cfg.density;
  p.seed = cfg.seed;
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return p;
}

inline std::vector<Algorithm> bench_algorithms(const RunConfig& cfg, const SearchOptions& opts) {
  std::vector<Algorithm> algos;
  for (const auto& name : split(cfg.algorithms, ',')) {
    if (name == "igs") {
      algos.push_back(igs_algorithm(opts));
    } else if (name == "ktails") {
      algos.push_back(ktails_algorithm(cfg.k));
    } else if (name == "null") {
      algos.push_back(null_algorithm());
    } else {
      throw UsageError("unknown algorithm '" + name + "' (igs, ktails, null)");
    }
  }
  if (algos.empty()) throw UsageError("--algorithms is empty");
  return algos;
}

inline std::string execute(const RunConfig& cfg) {
  const std::string& cmd = cfg.command;
  std::unique_ptr<Criterion> criterion;
  try {
    criterion = make_criterion(cfg.criterion);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  if (cmd == "induce") {
    check_report(cfg, {"text", "json", "dot"});
    SearchOptions opts = search_options(cfg);
    Dataset d = read_dataset(cfg);
    return result_output(cfg, induce(d, opts, *criterion));
  }
  if (cmd == "exhaustive") {
    check_report(cfg, {"text", "json", "dot"});
    Dataset d = read_dataset(cfg);
    return result_output(cfg, exhaustive_search(d, cfg.budget_nodes, *criterion));
  }
  if (cmd == "ktails") {
    check_report(cfg, {"text", "json", "dot"});
    Dataset d = read_dataset(cfg);
    Pfsa m = fit_counts(k_tails(d, cfg.k), d);
    return machine_output(cfg, m, criterion->evaluate(tally_of(m)));
  }
  if (cmd == "gen") {
    check_report(cfg, {"text", "json", "dot"});
    return machine_output(cfg, gen_random_pfsa(generator_params(cfg)), std::nullopt);
  }
  if (cmd == "sample") {
    DatasetFormat fmt = parse_format(cfg.format);
    if (cfg.oversample < 1.0) throw UsageError("--oversample must be at least 1");
    Pfsa m = read_machine(cfg);
    return format_dataset(sample_until_coverage(m, cfg.seed, cfg.min_per_arc, cfg.oversample), fmt);
  }
  if (cmd == "export-dot") {
    return to_dot(read_machine(cfg));
  }
  if (cmd == "bench") {
    check_report(cfg, {"text", "json"});
    SearchOptions opts = search_options(cfg);
    if (!opts.max_nodes && !opts.timeout_seconds)
      throw UsageError("bench needs --budget-nodes or --timeout-secs for the search");
    GeneratorParams gp = generator_params(cfg);
    if (!cfg.sweep.empty()) {
      SweepConfig sc;
      sc.generator = gp;
      sc.multipliers.clear();
      for (const auto& m : split(cfg.sweep, ',')) {
        double v = to_double(m, "--sweep");
        if (v < 1.0) throw UsageError("--sweep multipliers must be at least 1");
        sc.multipliers.push_back(v);
      }
      sc.min_per_arc = cfg.min_per_arc;
      sc.seed = cfg.seed;
      auto rows = run_sample_sweep(sc, igs_algorithm(opts));
      if (cfg.report == "json") return to_json(rows, cfg.timing).dump(2) + "\n";
      return format_sweep_table(rows);
    }
    BenchConfig bc;
    bc.trials = cfg.trials;
    bc.generator = gp;
    bc.min_per_arc = cfg.min_per_arc;
    bc.oversample = cfg.oversample;
    bc.seed = cfg.seed;
    bc.threads = cfg.threads;
    auto report = run_benchmark(bc, bench_algorithms(cfg, opts));
    if (cfg.report == "json") return to_json(report, cfg.timing).dump(2) + "\n";
    return format_bench_table(report);
  }
  throw UsageError("unknown command '" + cmd + "'");
}

}  // namespace detail

inline void add_search_flags(CLI::App* sub, RunConfig& cfg) {
  auto env = [](const char* name) { return std::string(kEnvPrefix) + name; };
  sub->add_option("--mode", cfg.mode, "prove | greedy | stochastic")->envname(env("MODE"))->capture_default_str();
  sub->add_flag("--compat,!--no-compat", cfg.compat, "Distribution compatibility culling")
      ->envname(env("COMPAT"))
      ->capture_default_str();
  sub->add_option("--node-cap", cfg.node_cap, "Nodes kept in memory")->envname(env("NODE_CAP"))->capture_default_str();
  sub->add_option("--mu-table", cfg.mu_table, "mu:probability,... for tiered selection")
      ->envname(env("MU_TABLE"))
      ->capture_default_str();
  sub->add_option("--switch-ratio", cfg.switch_ratio, "Estimate:partial selections in greedy mode")
      ->envname(env("SWITCH_RATIO"))
      ->capture_default_str();
  sub->add_option("--expansion-order", cfg.expansion_order, "most-transitions | fifo")
      ->envname(env("EXPANSION_ORDER"))
      ->capture_default_str();
  sub->add_option("--timeout-secs", cfg.timeout_secs, "Wall-clock limit")->envname(env("TIMEOUT_SECS"));
}

inline void add_common_flags(CLI::App* sub, RunConfig& cfg) {
  auto env = [](const char* name) { return std::string(kEnvPrefix) + name; };
  sub->add_option("--output,-o", cfg.output, "Write here instead of stdout")->envname(env("OUTPUT"));
  sub->add_option("--seed", cfg.seed, "Seed for every random choice")->envname(env("SEED"))->capture_default_str();
  sub->add_option("--criterion", cfg.criterion, "MML criterion")->envname(env("CRITERION"))->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Worker threads (benchmark trials)")
      ->envname(env("THREADS"))
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--report", cfg.report, "text | json | dot")->envname(env("REPORT"))->capture_default_str();
  sub->add_flag("--timing", cfg.timing, "Include elapsed times in JSON output")->envname(env("TIMING"));
}

/// Parses `argv`, runs the sub-command and writes its output. Diagnostics go
/// to `err` as one line.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Induce probabilistic finite state automata by minimum message length"};
  app.require_subcommand(1);
  auto env = [](const char* name) { return std::string(kEnvPrefix) + name; };

  auto* induce_cmd = app.add_subcommand("induce", "Information-guided search for the best PFSA");
  auto* exhaustive_cmd = app.add_subcommand("exhaustive", "Score every PFSA in the construction tree");
  auto* ktails_cmd = app.add_subcommand("ktails", "k-tails state merging from the prefix tree");
  auto* gen_cmd = app.add_subcommand("gen", "Random generating PFSA");
  auto* sample_cmd = app.add_subcommand("sample", "Sample sentences from a machine until every arc is covered");
  auto* bench_cmd = app.add_subcommand("bench", "Random-machine recovery benchmark");
  auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering of a machine document");

  for (auto* sub : {induce_cmd, exhaustive_cmd, ktails_cmd, gen_cmd, sample_cmd, bench_cmd, dot_cmd})
    add_common_flags(sub, cfg);
  for (auto* sub : {induce_cmd, exhaustive_cmd, ktails_cmd, sample_cmd, dot_cmd})
    sub->add_option("--input,-i", cfg.input, "Input file")->envname(env("INPUT"));
  for (auto* sub : {induce_cmd, exhaustive_cmd, ktails_cmd, sample_cmd})
    sub->add_option("--format", cfg.format, "auto | slash | lines")->envname(env("FORMAT"))->capture_default_str();
  for (auto* sub : {induce_cmd, bench_cmd}) add_search_flags(sub, cfg);
  for (auto* sub : {induce_cmd, exhaustive_cmd, bench_cmd})
    sub->add_option("--budget-nodes", cfg.budget_nodes, "Maximum nodes examined")->envname(env("BUDGET_NODES"));
  for (auto* sub : {ktails_cmd, bench_cmd})
    sub->add_option("--k", cfg.k, "Tail length")->envname(env("K"))->capture_default_str();
  for (auto* sub : {gen_cmd, bench_cmd}) {
    sub->add_option("--states", cfg.states, "Generator states")->envname(env("STATES"))->capture_default_str();
    sub->add_option("--tokens", cfg.tokens, "Generator tokens")->envname(env("TOKENS"))->capture_default_str();
    sub->add_option("--density", cfg.density, "Mean out-degree")->envname(env("DENSITY"))->capture_default_str();
  }
  for (auto* sub : {sample_cmd, bench_cmd}) {
    sub->add_option("--min-per-arc", cfg.min_per_arc, "Traversals required on every arc")
        ->envname(env("MIN_PER_ARC"))
        ->capture_default_str();
    sub->add_option("--oversample", cfg.oversample, "Sample size as a multiple of the coverage sample")
        ->envname(env("OVERSAMPLE"))
        ->capture_default_str();
  }
  bench_cmd->add_option("--trials", cfg.trials, "Random machines")->envname(env("TRIALS"))->capture_default_str();
  bench_cmd->add_option("--algorithms", cfg.algorithms, "Comma-separated: igs, ktails, null")
      ->envname(env("ALGORITHMS"))
      ->capture_default_str();
  bench_cmd->add_option("--sweep", cfg.sweep, "Sample-size multipliers on one machine, e.g. 1,2,4,8")
      ->envname(env("SWEEP"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (auto* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    if (auto* opt = sub->get_option_no_throw("--compat")) cfg.compat_given = opt->count() > 0;
  }

  std::string text;
  try {
    text = detail::execute(cfg);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!(file << text)) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kExitRuntime;
    }
  }
  return kExitOk;
}

}  // namespace igs::cli
