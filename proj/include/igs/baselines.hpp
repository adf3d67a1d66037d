#pragma once

// Reference inducers: the prefix-tree (canonical) machine, k-tails state
// merging, and exhaustive enumeration of every deterministic PFSA consistent
// with a dataset.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "igs/automaton.hpp"
#include "igs/error.hpp"
#include "igs/mml.hpp"
#include "igs/search.hpp"

namespace igs {

/// Trie of the sentences; every sentence end returns to the root on the
/// delimiter. States are numbered in creation order.
inline Pfsa build_prefix_tree(const Dataset& d) {
  Pfsa m(d.alphabet(), 1);
  const Symbol delim = d.alphabet().delimiter();
  for (const Sentence& s : d.sentences()) {
    StateId state = 0;
    for (Symbol y : s) {
      Arc a = m.arc(state, y);
      if (!a.present()) a = Arc{m.add_state(), 0};
      m.set_arc(state, y, a.dest, a.count + 1);
      state = a.dest;
    }
    m.set_arc(state, delim, 0, m.arc(state, delim).count + 1);
  }
  return m;
}

/// Strings of at most k symbols producible from a state; a delimiter ends a
/// string. Shorter prefixes are members too.
using TailSet = std::set<std::vector<Symbol>>;

inline std::vector<TailSet> tail_sets(const Pfsa& m, std::size_t k) {
  const Symbol delim = m.alphabet().delimiter();
  std::vector<TailSet> prev(m.num_states(), TailSet{{}});
  for (std::size_t depth = 1; depth <= k; ++depth) {
    std::vector<TailSet> next(m.num_states(), TailSet{{}});
    for (StateId s = 0; s < m.num_states(); ++s)
      for (Symbol y = 0; y < m.width(); ++y) {
        const Arc& a = m.arc(s, y);
        if (!a.present()) continue;
        if (y == delim) {
          next[s].insert({delim});
          continue;
        }
        for (const auto& tail : prev[a.dest]) {
          std::vector<Symbol> str;
          str.reserve(tail.size() + 1);
          str.push_back(y);
          str.insert(str.end(), tail.begin(), tail.end());
          next[s].insert(std::move(str));
        }
      }
    prev = std::move(next);
  }
  return prev;
}

namespace detail {

/// Union-find over states with arc maps, merging destinations of clashing
/// arcs until the machine is deterministic again.
class StateMerger {
 public:
  explicit StateMerger(const Pfsa& m) : alphabet_(m.alphabet()), parent_(m.num_states()), arcs_(m.num_states()) {
    std::iota(parent_.begin(), parent_.end(), StateId{0});
    for (StateId s = 0; s < m.num_states(); ++s)
      for (Symbol y = 0; y < m.width(); ++y)
        if (const Arc& a = m.arc(s, y); a.present()) arcs_[s][y] = a;
  }

  StateId find(StateId s) {
    while (parent_[s] != s) {
      parent_[s] = parent_[parent_[s]];
      s = parent_[s];
    }
    return s;
  }

  void merge(StateId a, StateId b) {
    std::vector<std::pair<StateId, StateId>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      StateId rx = find(x);
      StateId ry = find(y);
      if (rx == ry) continue;
      if (ry < rx) std::swap(rx, ry);
      parent_[ry] = rx;
      for (auto& [sym, arc] : arcs_[ry]) {
        auto it = arcs_[rx].find(sym);
        if (it == arcs_[rx].end()) {
          arcs_[rx].emplace(sym, arc);
        } else {
          it->second.count += arc.count;
          work.emplace_back(it->second.dest, arc.dest);
        }
      }
      arcs_[ry].clear();
    }
  }

  Pfsa build() {
    std::vector<StateId> label(parent_.size(), kNoState);
    StateId next = 0;
    for (StateId s = 0; s < parent_.size(); ++s)
      if (find(s) == s) label[s] = next++;
    Pfsa out(alphabet_, next);
    for (StateId s = 0; s < parent_.size(); ++s) {
      if (find(s) != s) continue;
      for (const auto& [sym, arc] : arcs_[s]) out.set_arc(label[s], sym, label[find(arc.dest)], arc.count);
    }
    return canonicalize(out);
  }

 private:
  Alphabet alphabet_;
  std::vector<StateId> parent_;
  std::vector<std::map<Symbol, Arc>> arcs_;
};

}  // namespace detail

/// Merges states whose k-tails agree, restores determinism by merging clashing
/// destinations, and repeats until no two states share a tail set.
inline Pfsa k_tails_reduce(const Pfsa& m, std::size_t k) {
  Pfsa current = m;
  for (;;) {
    auto tails = tail_sets(current, k);
    std::map<TailSet, StateId> first;
    detail::StateMerger merger(current);
    bool merged = false;
    for (StateId s = 0; s < current.num_states(); ++s) {
      auto [it, inserted] = first.emplace(std::move(tails[s]), s);
      if (!inserted) {
        merger.merge(it->second, s);
        merged = true;
      }
    }
    if (!merged) return current;
    current = merger.build();
  }
}

inline Pfsa k_tails(const Dataset& d, std::size_t k = 3) { return k_tails_reduce(build_prefix_tree(d), k); }

// ---------------------------------------------------------------------------
// Exhaustive enumeration

namespace detail {

/// Depth-first enumeration that follows sentences in order and branches on the
/// first transition without a destination. Shares no code with the
/// construction-tree expansion it is used to check.
class Enumerator {
 public:
  Enumerator(const Dataset& d, std::optional<std::uint64_t> budget, const Criterion& criterion)
      : d_(d), budget_(budget), criterion_(criterion), width_(d.alphabet().size()) {}

  InductionResult run() {
    auto start = std::chrono::steady_clock::now();
    dest_.assign(width_, kNoState);
    states_ = 1;
    visit();
    if (!best_) throw NoModelError();
    InductionResult r;
    r.machine = *best_;
    r.mml = best_mml_;
    r.criterion = std::string(criterion_.name());
    r.nodes_created = created_;
    r.nodes_examined = created_ + 1;
    r.completed_pfsa = leaves_;
    r.exhausted = true;
    r.proven_optimal = true;
    r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

 private:
  void visit() {
    const Symbol delim = d_.alphabet().delimiter();
    counts_.assign(states_ * width_, 0);
    std::optional<std::pair<StateId, Symbol>> open;
    for (std::size_t i = 0; i < d_.size() && !open; ++i) {
      StateId q = 0;
      for (std::size_t pos = 0;; ++pos) {
        Symbol y = d_.symbol_at(i, pos);
        ++counts_[std::size_t{q} * width_ + y];
        if (y == delim) break;
        StateId next = dest_[std::size_t{q} * width_ + y];
        if (next == kNoState) {
          open = std::pair{q, y};
          break;
        }
        q = next;
      }
    }
    if (!open) {
      leaf();
      return;
    }
    auto [q, y] = *open;
    std::size_t slot = std::size_t{q} * width_ + y;
    for (StateId to = 0; to <= states_; ++to) {
      if (budget_ && created_ + 1 >= *budget_) throw TooLargeError(created_ + 1, leaves_);
      ++created_;
      bool fresh = to == states_;
      if (fresh) {
        ++states_;
        dest_.resize(states_ * width_, kNoState);
      }
      dest_[slot] = to;
      visit();
      dest_[slot] = kNoState;
      if (fresh) {
        --states_;
        dest_.resize(states_ * width_);
      }
    }
  }

  void leaf() {
    ++leaves_;
    const Symbol delim = d_.alphabet().delimiter();
    MachineTally tally(states_, width_);
    tally.counts = counts_;
    for (StateId s = 0; s < states_; ++s)
      for (Symbol y = 0; y < width_; ++y)
        if (y != delim && counts_[std::size_t{s} * width_ + y] > 0) ++tally.routed_arcs[s];
    MmlBreakdown mml = criterion_.evaluate(tally);
    if (best_ && !(mml.total_nits() < best_mml_.total_nits())) return;
    best_mml_ = mml;
    Pfsa m(d_.alphabet(), states_);
    for (StateId s = 0; s < states_; ++s)
      for (Symbol y = 0; y < width_; ++y) {
        std::uint64_t n = counts_[std::size_t{s} * width_ + y];
        if (n == 0) continue;
        m.set_arc(s, y, y == delim ? 0 : dest_[std::size_t{s} * width_ + y], n);
      }
    best_ = std::move(m);
  }

  const Dataset& d_;
  std::optional<std::uint64_t> budget_;
  const Criterion& criterion_;
  std::size_t width_;
  std::vector<StateId> dest_;
  std::vector<std::uint64_t> counts_;
  std::size_t states_ = 1;
  std::uint64_t created_ = 0;
  std::uint64_t leaves_ = 0;
  std::optional<Pfsa> best_;
  MmlBreakdown best_mml_;
};

}  // namespace detail

/// Scores every leaf of the construction tree and returns the global minimum.
/// nodes_created counts nodes below the root; completed_pfsa counts leaves.
/// Throws TooLargeError once more than `node_budget` nodes would be visited.
inline InductionResult exhaustive_search(const Dataset& d, std::optional<std::uint64_t> node_budget = std::nullopt,
                                         const Criterion& criterion = default_criterion()) {
  return detail::Enumerator(d, node_budget, criterion).run();
}

}  // namespace igs
