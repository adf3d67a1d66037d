#pragma once

// JSON documents, Graphviz export and the plain-text result tables.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "igs/automaton.hpp"
#include "igs/benchgen.hpp"
#include "igs/error.hpp"
#include "igs/mml.hpp"
#include "igs/search.hpp"

namespace igs {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Machines

inline json to_json(const Pfsa& m) {
  json arcs = json::array();
  for (StateId s = 0; s < m.num_states(); ++s)
    for (Symbol y = 0; y < m.width(); ++y) {
      const Arc& a = m.arc(s, y);
      if (a.present())
        arcs.push_back({{"from", s}, {"symbol", m.alphabet().name(y)}, {"to", a.dest}, {"count", a.count}});
    }
  return {{"states", m.num_states()},
          {"tokens", m.alphabet().tokens()},
          {"delimiter", m.alphabet().delimiter_name()},
          {"arcs", std::move(arcs)}};
}

inline Pfsa pfsa_from_json(const json& j) {
  try {
    Alphabet alphabet(j.at("tokens").get<std::vector<std::string>>(), j.at("delimiter").get<std::string>());
    Pfsa m(alphabet, j.at("states").get<std::size_t>());
    for (const auto& a : j.at("arcs")) {
      auto name = a.at("symbol").get<std::string>();
      Symbol y;
      if (name == alphabet.delimiter_name()) {
        y = alphabet.delimiter();
      } else if (auto found = alphabet.find(name)) {
        y = *found;
      } else {
        throw DomainError("unknown symbol '" + name + "'");
      }
      auto from = a.at("from").get<StateId>();
      if (from >= m.num_states()) throw DomainError("arc source out of range");
      if (m.arc(from, y).present()) throw DomainError("duplicate arc: machine is not deterministic");
      m.set_arc(from, y, a.at("to").get<StateId>(), a.at("count").get<std::uint64_t>());
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed machine document: ") + e.what(), 0);
  }
}

inline std::string to_dot(const Pfsa& m, const std::string& name = "pfsa") {
  std::ostringstream out;
  out << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
  out << "  start [shape=point];\n  start -> 0;\n";
  for (StateId s = 0; s < m.num_states(); ++s) out << "  " << s << ";\n";
  for (StateId s = 0; s < m.num_states(); ++s)
    for (Symbol y = 0; y < m.width(); ++y) {
      const Arc& a = m.arc(s, y);
      if (!a.present()) continue;
      std::string label = m.alphabet().name(y);
      for (std::size_t p = 0; (p = label.find('"', p)) != std::string::npos; p += 2) label.insert(p, "\\");
      out << "  " << s << " -> " << a.dest << " [label=\"" << label << "/" << a.count << "\"";
      if (m.alphabet().is_delimiter(y)) out << ", style=dashed";
      out << "];\n";
    }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Induction results

inline json to_json(const MmlBreakdown& mml) {
  return {{"structure_nits", mml.structure_nits},
          {"data_nits", mml.data_nits},
          {"total_nits", mml.total_nits()},
          {"total_bits", mml.total_bits()}};
}

/// Elapsed time is left out unless asked for, so equal runs give equal bytes.
inline json to_json(const InductionResult& r, bool include_timing = false) {
  json j = {{"criterion", r.criterion},
            {"machine", to_json(r.machine)},
            {"mml", to_json(r.mml)},
            {"nodes_examined", r.nodes_examined},
            {"nodes_created", r.nodes_created},
            {"completed_pfsa", r.completed_pfsa},
            {"nodes_culled", r.nodes_culled},
            {"exhausted", r.exhausted},
            {"proven_optimal", r.proven_optimal}};
  if (include_timing) j["elapsed_seconds"] = r.elapsed_seconds;
  return j;
}

inline InductionResult result_from_json(const json& j) {
  try {
    InductionResult r;
    r.criterion = j.at("criterion").get<std::string>();
    r.machine = pfsa_from_json(j.at("machine"));
    r.mml.structure_nits = j.at("mml").at("structure_nits").get<double>();
    r.mml.data_nits = j.at("mml").at("data_nits").get<double>();
    r.nodes_examined = j.at("nodes_examined").get<std::uint64_t>();
    r.nodes_created = j.at("nodes_created").get<std::uint64_t>();
    r.completed_pfsa = j.at("completed_pfsa").get<std::uint64_t>();
    r.nodes_culled = j.value("nodes_culled", std::uint64_t{0});
    r.exhausted = j.at("exhausted").get<bool>();
    r.proven_optimal = j.at("proven_optimal").get<bool>();
    r.elapsed_seconds = j.value("elapsed_seconds", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed result document: ") + e.what(), 0);
  }
}

// ---------------------------------------------------------------------------
// Text tables

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string clock_time(double seconds) {
  auto total = static_cast<long long>(seconds);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", total / 3600, (total / 60) % 60, total % 60);
  return buf;
}

}  // namespace detail

/// Arc table: one row per state, one column per symbol (delimiter last),
/// destinations in brackets and '-' where there is no arc.
inline std::string format_state_table(const Pfsa& m) {
  const std::size_t width = m.width();
  std::vector<std::vector<std::string>> cells(m.num_states(), std::vector<std::string>(width, "-"));
  std::size_t col = 4;
  for (Symbol y = 0; y < width; ++y) col = std::max(col, m.alphabet().name(y).size() + 2);
  for (StateId s = 0; s < m.num_states(); ++s)
    for (Symbol y = 0; y < width; ++y)
      if (const Arc& a = m.arc(s, y); a.present()) {
        cells[s][y] = "[" + std::to_string(a.dest) + "]";
        col = std::max(col, cells[s][y].size() + 1);
      }
  std::size_t lead = std::max<std::size_t>(7, std::to_string(m.num_states()).size() + 2);
  std::ostringstream out;
  out << detail::pad("arc->", lead);
  for (Symbol y = 0; y < width; ++y) out << detail::pad(m.alphabet().name(y), col);
  out << "\nstate\n";
  for (StateId s = 0; s < m.num_states(); ++s) {
    out << detail::pad(std::to_string(s), lead);
    for (Symbol y = 0; y < width; ++y) out << detail::pad(cells[s][y], col);
    out << "\n";
  }
  return out.str();
}

inline std::string format_cost_line(const MmlBreakdown& mml) {
  return "Automata cost is: " + detail::fixed(mml.total_bits(), 5) + "bits";
}

inline std::string format_report(const InductionResult& r) {
  std::ostringstream out;
  out << "There are " << r.machine.num_states() << " states with a max of " << r.machine.max_out_degree()
      << " arcs\n";
  out << format_cost_line(r.mml) << "\n";
  out << format_state_table(r.machine);
  out << "Nodes examined " << r.nodes_examined << ", Nodes created " << r.nodes_created << ", Completed PFSA "
      << r.completed_pfsa << "\n";
  out << "Proven optimal: " << (r.proven_optimal ? "yes" : "no") << "\n";
  out << "Elapsed time: " << detail::clock_time(r.elapsed_seconds) << " (" << detail::fixed(r.elapsed_seconds, 3)
      << "s)\n";
  return out.str();
}

/// Short report for machines that did not come out of a search.
inline std::string format_machine_report(const Pfsa& m, const MmlBreakdown& mml) {
  std::ostringstream out;
  out << "There are " << m.num_states() << " states with a max of " << m.max_out_degree() << " arcs\n";
  out << format_cost_line(mml) << "\n";
  out << format_state_table(m);
  return out.str();
}

// ---------------------------------------------------------------------------
// Benchmarks

inline json to_json(const BenchReport& report, bool include_timing = false) {
  json rows = json::array();
  for (const BenchRow& r : report.rows) {
    json row = {{"trial", r.trial},         {"gen_states", r.gen_states}, {"gen_arcs", r.gen_arcs},
                {"sentences", r.sentences}, {"tokens", r.tokens},         {"algorithm", r.algorithm},
                {"ratio", r.ratio ? json(*r.ratio) : json(nullptr)},      {"isomorphic", r.isomorphic},
                {"induced_states", r.induced_states},                     {"nodes", r.nodes},
                {"dnf", r.dnf}};
    if (include_timing) row["elapsed_seconds"] = r.elapsed_seconds;
    rows.push_back(std::move(row));
  }
  json summary = json::object();
  for (const auto& [name, s] : report.summary)
    summary[name] = {{"exact", s.exact}, {"near", s.near}, {"poor", s.poor}, {"dnf", s.dnf}};
  return {{"rows", std::move(rows)}, {"summary", std::move(summary)}};
}

inline BenchReport bench_report_from_json(const json& j) {
  try {
    BenchReport report;
    for (const auto& row : j.at("rows")) {
      BenchRow r;
      r.trial = row.at("trial").get<std::size_t>();
      r.gen_states = row.at("gen_states").get<std::size_t>();
      r.gen_arcs = row.at("gen_arcs").get<std::size_t>();
      r.sentences = row.at("sentences").get<std::size_t>();
      r.tokens = row.at("tokens").get<std::uint64_t>();
      r.algorithm = row.at("algorithm").get<std::string>();
      if (!row.at("ratio").is_null()) r.ratio = row.at("ratio").get<double>();
      r.isomorphic = row.at("isomorphic").get<bool>();
      r.induced_states = row.at("induced_states").get<std::size_t>();
      r.nodes = row.at("nodes").get<std::uint64_t>();
      r.dnf = row.at("dnf").get<bool>();
      r.elapsed_seconds = row.value("elapsed_seconds", 0.0);
      report.rows.push_back(std::move(r));
    }
    summarize(report);
    return report;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed benchmark document: ") + e.what(), 0);
  }
}

/// One line per trial with each algorithm's MML ratio; '*' marks a ratio worse
/// than the 1-state machine's when "null" was run.
inline std::string format_bench_table(const BenchReport& report) {
  std::vector<std::string> algos;
  for (const BenchRow& r : report.rows)
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) algos.push_back(r.algorithm);
  std::map<std::size_t, std::map<std::string, const BenchRow*>> by_trial;
  for (const BenchRow& r : report.rows) by_trial[r.trial][r.algorithm] = &r;

  std::ostringstream out;
  out << detail::pad("No.", 5) << detail::pad("States", 8) << detail::pad("Arcs", 6) << detail::pad("Sentences", 11)
      << detail::pad("Tokens", 8);
  for (const auto& a : algos) out << detail::pad(a, 10);
  out << "\n";
  for (const auto& [trial, cells] : by_trial) {
    const BenchRow& first = *cells.begin()->second;
    out << detail::pad(std::to_string(trial), 5) << detail::pad(std::to_string(first.gen_states), 8)
        << detail::pad(std::to_string(first.gen_arcs), 6) << detail::pad(std::to_string(first.sentences), 11)
        << detail::pad(std::to_string(first.tokens), 8);
    const BenchRow* null_row = cells.contains("null") ? cells.at("null") : nullptr;
    for (const auto& a : algos) {
      std::string cell = "-";
      if (auto it = cells.find(a); it != cells.end()) {
        const BenchRow& r = *it->second;
        if (r.dnf) {
          cell = "DNF";
        } else {
          cell = detail::fixed(*r.ratio, 3);
          if (null_row && null_row->ratio && a != "null" && *r.ratio > *null_row->ratio) cell += "*";
        }
      }
      out << detail::pad(cell, 10);
    }
    out << "\n";
  }
  out << "\n";
  for (const auto& [name, s] : report.summary)
    out << name << ": " << s.exact << " exact, " << s.near << " near, " << s.poor << " poor (ratio > 1.2), "
        << s.dnf << " DNF\n";
  return out.str();
}

inline json to_json(const std::vector<SweepRow>& rows, bool include_timing = false) {
  json out = json::array();
  for (const SweepRow& r : rows) {
    json row = {{"multiplier", r.multiplier}, {"sentences", r.sentences},
                {"tokens", r.tokens},         {"induced_states", r.induced_states},
                {"mml_bits", r.mml_bits},     {"ratio", r.ratio},
                {"isomorphic", r.isomorphic}, {"nodes", r.nodes}};
    if (include_timing) row["elapsed_seconds"] = r.elapsed_seconds;
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string format_sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << detail::pad("Sentences", 11) << detail::pad("Tokens", 9) << detail::pad("States", 8)
      << detail::pad("MML (bits)", 13) << "MML Ratio\n";
  for (const SweepRow& r : rows)
    out << detail::pad(std::to_string(r.sentences), 11) << detail::pad(std::to_string(r.tokens), 9)
        << detail::pad(std::to_string(r.induced_states), 8) << detail::pad(detail::fixed(r.mml_bits, 1), 13)
        << detail::fixed(r.ratio, 3) << "\n";
  return out.str();
}

}  // namespace igs
