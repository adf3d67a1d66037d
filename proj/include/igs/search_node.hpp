#pragma once

// Construction-tree nodes: partial PFSA whose fixed arcs carry traversal
// counts and whose dangling arcs hold the cursors of the sentences waiting to
// cross them.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "igs/automaton.hpp"
#include "igs/error.hpp"
#include "igs/mml.hpp"

namespace igs {

/// A sentence's read head. `position` indexes the next symbol to consume;
/// position == len means the delimiter is next.
struct Cursor {
  std::uint32_t sentence = 0;
  std::uint32_t position = 0;

  friend bool operator==(const Cursor&, const Cursor&) = default;
};

struct ArcKey {
  StateId state = 0;
  Symbol symbol = 0;

  friend auto operator<=>(const ArcKey&, const ArcKey&) = default;
};

/// A destination choice for one arc; a node is the root plus its ancestors'
/// decisions.
struct Decision {
  ArcKey arc;
  StateId dest = 0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

enum class ArcOrder {
  kMostTransitions,  // dangling arc with the most cursors
  kFifo,             // lowest (state, symbol) key
};

struct SearchNode {
  std::size_t num_states = 1;
  std::size_t width = 0;                              // alphabet classes
  std::vector<Arc> fixed;                             // num_states × width
  std::map<ArcKey, std::vector<Cursor>> dangling;     // never holds delimiter arcs
  std::uint64_t consumed = 0;                         // Σ fixed-arc counts
  double partial_mml = 0.0;
  double fraction_encoded = 0.0;
  double estimate = 0.0;

  bool complete() const noexcept { return dangling.empty(); }

  const Arc& fixed_arc(StateId s, Symbol y) const { return fixed.at(std::size_t{s} * width + y); }

  std::size_t fixed_arc_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(fixed.begin(), fixed.end(), [](const Arc& a) { return a.present(); }));
  }

  /// Outgoing counts of `s` over all classes: fixed traversals plus waiting cursors.
  ClassDistribution outgoing(StateId s) const {
    ClassDistribution dist(width);
    for (Symbol y = 0; y < width; ++y) dist.counts[y] = fixed_arc(s, y).count;
    for (auto it = dangling.lower_bound(ArcKey{s, 0}); it != dangling.end() && it->first.state == s;
         ++it)
      dist.counts[it->first.symbol] += it->second.size();
    return dist;
  }
};

namespace detail {

/// Moves a cursor through fixed arcs until it retires on a delimiter or parks
/// on a dangling arc. A missing delimiter arc is fixed to the start state on
/// the spot, since its destination is forced.
inline void propagate(SearchNode& node, const Dataset& d, Cursor cursor, StateId state) {
  const Symbol delim = d.alphabet().delimiter();
  for (;;) {
    Symbol y = d.symbol_at(cursor.sentence, cursor.position);
    Arc& arc = node.fixed[std::size_t{state} * node.width + y];
    if (arc.present()) {
      ++arc.count;
      ++node.consumed;
      if (y == delim) return;
      state = arc.dest;
      ++cursor.position;
      continue;
    }
    if (y == delim) {
      arc = Arc{0, 1};
      ++node.consumed;
      return;
    }
    node.dangling[ArcKey{state, y}].push_back(cursor);
    return;
  }
}

inline StateId add_state(SearchNode& node) {
  node.fixed.resize(node.fixed.size() + node.width);
  return static_cast<StateId>(node.num_states++);
}

}  // namespace detail

inline MachineTally tally_of(const SearchNode& node, const Alphabet& alphabet) {
  MachineTally tally(node.num_states, node.width);
  for (StateId s = 0; s < node.num_states; ++s)
    for (Symbol y = 0; y < node.width; ++y) {
      const Arc& a = node.fixed_arc(s, y);
      if (!a.present()) continue;
      tally.counts[std::size_t{s} * node.width + y] = a.count;
      if (!alphabet.is_delimiter(y)) ++tally.routed_arcs[s];
    }
  for (const auto& [key, cursors] : node.dangling) {
    tally.counts[std::size_t{key.state} * node.width + key.symbol] += cursors.size();
    ++tally.routed_arcs[key.state];
  }
  return tally;
}

/// Lower bound on the message length of every completion of `node`: the
/// criterion applied to the structure and counts present so far, with each
/// dangling arc priced like a fixed one. Unconsumed data adds nothing.
inline double partial_score(const SearchNode& node, const Alphabet& alphabet,
                            const Criterion& criterion = default_criterion()) {
  return criterion.evaluate(tally_of(node, alphabet)).total_nits();
}

inline void rescore(SearchNode& node, const Dataset& d, const Criterion& criterion) {
  node.partial_mml = partial_score(node, d.alphabet(), criterion);
  node.fraction_encoded =
      static_cast<double>(node.consumed) / static_cast<double>(d.total_transitions());
}

/// Rebuilds a node from its decisions by running every sentence through the
/// fixed arcs. Decisions must be listed root-first.
inline SearchNode replay(const Dataset& d, std::span<const Decision> decisions,
                         const Criterion& criterion = default_criterion()) {
  SearchNode node;
  node.width = d.alphabet().size();
  node.num_states = 1;
  for (const Decision& dec : decisions)
    node.num_states = std::max<std::size_t>(node.num_states, std::size_t{dec.dest} + 1);
  node.fixed.assign(node.num_states * node.width, Arc{});
  for (const Decision& dec : decisions)
    node.fixed[std::size_t{dec.arc.state} * node.width + dec.arc.symbol] = Arc{dec.dest, 0};
  for (std::uint32_t i = 0; i < d.size(); ++i) detail::propagate(node, d, Cursor{i, 0}, 0);
  rescore(node, d, criterion);
  return node;
}

/// Root of the construction tree: one state, one dangling arc per distinct
/// first symbol.
inline SearchNode build_root(const Dataset& d, const Criterion& criterion = default_criterion()) {
  return replay(d, {}, criterion);
}

inline ArcKey select_dangling_arc(const SearchNode& node, ArcOrder order = ArcOrder::kMostTransitions) {
  if (node.complete()) throw DomainError("select_dangling_arc: node is complete");
  if (order == ArcOrder::kFifo) return node.dangling.begin()->first;
  auto best = node.dangling.begin();
  for (auto it = std::next(best); it != node.dangling.end(); ++it)
    if (it->second.size() > best->second.size()) best = it;
  return best->first;
}

/// Fixes `arc` to `dest` (dest == num_states opens a new state) and moves the
/// arc's cursors on. The result is not scored.
inline SearchNode fix_arc(const SearchNode& parent, const Dataset& d, ArcKey arc, StateId dest) {
  auto it = parent.dangling.find(arc);
  if (it == parent.dangling.end()) throw DomainError("fix_arc: arc is not dangling");
  if (dest > parent.num_states) throw DomainError("fix_arc: destination out of range");
  SearchNode child = parent;
  std::vector<Cursor> cursors = std::move(child.dangling.at(arc));
  child.dangling.erase(arc);
  if (dest == child.num_states) detail::add_state(child);
  child.fixed[std::size_t{arc.state} * child.width + arc.symbol] = Arc{dest, cursors.size()};
  child.consumed += cursors.size();
  for (Cursor c : cursors) {
    ++c.position;
    detail::propagate(child, d, c, dest);
  }
  return child;
}

struct ExpandOptions {
  bool compat_test = false;
};

struct ExpansionStats {
  std::uint64_t examined = 0;        // children whose partial MML was computed or compat-tested
  std::uint64_t compat_rejected = 0;
  std::uint64_t pruned = 0;          // partial MML at or above the incumbent
};

/// Distribution of the symbols that follow `arc` for the cursors waiting on it.
inline ClassDistribution next_symbol_distribution(const SearchNode& node, const Dataset& d, ArcKey arc) {
  ClassDistribution dist(node.width);
  for (const Cursor& c : node.dangling.at(arc)) ++dist.counts[d.symbol_at(c.sentence, c.position + 1)];
  return dist;
}

/// One child per destination: each existing state in id order, then a new
/// state. Children whose partial MML reaches `best_mml` are dropped, and with
/// compat_test so are existing-state destinations whose outgoing distribution
/// does not pool with the arc's next-symbol distribution.
inline std::vector<SearchNode> expand_node(const SearchNode& node, ArcKey arc, const Dataset& d,
                                           const ExpandOptions& opts = {},
                                           std::optional<double> best_mml = std::nullopt,
                                           const Criterion& criterion = default_criterion(),
                                           ExpansionStats* stats = nullptr) {
  if (!node.dangling.contains(arc)) throw DomainError("expand_node: arc is not dangling");
  ExpansionStats local;
  ExpansionStats& st = stats ? *stats : local;
  std::vector<SearchNode> children;
  std::optional<ClassDistribution> next;
  if (opts.compat_test) next = next_symbol_distribution(node, d, arc);

  for (StateId dest = 0; dest <= node.num_states; ++dest) {
    ++st.examined;
    if (next && dest < node.num_states) {
      ClassDistribution out = node.outgoing(dest);
      if (out.total() > 0 && !compatible(*next, out)) {
        ++st.compat_rejected;
        continue;
      }
    }
    SearchNode child = fix_arc(node, d, arc, dest);
    rescore(child, d, criterion);
    if (best_mml && child.partial_mml >= *best_mml) {
      ++st.pruned;
      continue;
    }
    children.push_back(std::move(child));
  }
  return children;
}

/// The machine described by a complete node.
inline Pfsa extract_pfsa(const SearchNode& node, const Alphabet& alphabet) {
  if (!node.complete()) throw DomainError("extract_pfsa: node has dangling arcs");
  Pfsa m(alphabet, node.num_states);
  for (StateId s = 0; s < node.num_states; ++s)
    for (Symbol y = 0; y < node.width; ++y) {
      const Arc& a = node.fixed_arc(s, y);
      if (a.present()) m.set_arc(s, y, a.dest, a.count);
    }
  return m;
}

}  // namespace igs
