#pragma once

// Information-guided search over the construction tree.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "igs/automaton.hpp"
#include "igs/error.hpp"
#include "igs/mml.hpp"
#include "igs/search_node.hpp"

namespace igs {

// ---------------------------------------------------------------------------
// Final-MML estimation

/// (fraction encoded, partial MML) along the construction path of the
/// incumbent, ending at (1, incumbent MML).
class ReferenceCurve {
 public:
  ReferenceCurve() = default;

  explicit ReferenceCurve(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    if (points_.empty() || points_.back().first != 1.0)
      throw DomainError("reference curve must end at fraction 1");
    for (std::size_t i = 1; i < points_.size(); ++i)
      if (!(points_[i].first > points_[i - 1].first))
        throw DomainError("reference curve fractions must increase strictly");
  }

  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }
  double final_mml() const { return points_.back().second; }

  /// Piecewise-linear interpolation, clamped at both ends.
  double at(double fraction) const {
    if (fraction <= points_.front().first) return points_.front().second;
    if (fraction >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), fraction,
                               [](double f, const auto& p) { return f < p.first; });
    auto lo = std::prev(hi);
    double w = (fraction - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }

 private:
  std::vector<std::pair<double, double>> points_;
};

inline constexpr double kMinFraction = 1e-6;

/// Partial MML plus what the reference path still had to pay from this
/// fraction on; without a reference, linear extrapolation through the origin.
inline double estimate_final_mml(double partial_mml, double fraction, const ReferenceCurve* ref) {
  double estimate = ref != nullptr && !ref->points().empty()
                        ? partial_mml + (ref->final_mml() - ref->at(fraction))
                        : partial_mml / std::max(fraction, kMinFraction);
  return std::max(estimate, partial_mml);
}

inline double estimate_final_mml(const SearchNode& node, const ReferenceCurve* ref) {
  return estimate_final_mml(node.partial_mml, node.fraction_encoded, ref);
}

// ---------------------------------------------------------------------------
// Options and results

enum class SearchMode { kProve, kGreedy, kStochastic };

struct MuChoice {
  double mu = 1.0;
  double probability = 1.0;
};

/// Chance that the walk takes the best child at each level, and how often
/// each value is drawn.
inline std::vector<MuChoice> default_mu_table() {
  return {{1.00, 0.50}, {0.80, 0.35}, {0.50, 0.10}, {0.00, 0.05}};
}

struct SwitchRatio {
  unsigned by_estimate = 3;
  unsigned by_partial = 1;
};

using ExpansionObserver =
    std::function<void(const SearchNode& parent, std::span<const SearchNode> children)>;

struct SearchOptions {
  SearchMode mode = SearchMode::kStochastic;
  bool compat_test = true;
  std::size_t node_cap = 150000;
  ArcOrder expansion_order = ArcOrder::kMostTransitions;
  std::vector<MuChoice> mu_table = default_mu_table();
  SwitchRatio switch_ratio{};
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> max_nodes;  // nodes examined
  std::optional<double> timeout_seconds;
  ExpansionObserver observer;  // sees every expansion with the surviving children

  void validate() const {
    if (node_cap < 1000) throw DomainError("node_cap must be at least 1000");
    if (mu_table.empty()) throw DomainError("mu table is empty");
    double total = 0.0;
    for (const MuChoice& c : mu_table) {
      if (c.mu < 0.0 || c.mu > 1.0 || c.probability < 0.0)
        throw DomainError("mu table entries must lie in [0, 1]");
      total += c.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("mu table probabilities must sum to 1");
    if (switch_ratio.by_estimate + switch_ratio.by_partial == 0)
      throw DomainError("switch ratio must select something");
    if (timeout_seconds && *timeout_seconds < 0.0) throw DomainError("timeout must be non-negative");
  }
};

struct InductionResult {
  Pfsa machine;
  MmlBreakdown mml;
  std::string criterion = "wg";
  std::uint64_t nodes_examined = 0;
  std::uint64_t nodes_created = 0;
  std::uint64_t completed_pfsa = 0;
  std::uint64_t nodes_culled = 0;
  bool exhausted = false;
  bool proven_optimal = false;
  double elapsed_seconds = 0.0;

  friend bool operator==(const InductionResult&, const InductionResult&) = default;
};

// ---------------------------------------------------------------------------
// Random helpers; plain arithmetic on mt19937_64 output so streams are the same
// on every standard library.

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline double draw_mu(std::mt19937_64& rng, std::span<const MuChoice> table) {
  double u = uniform_unit(rng);
  double acc = 0.0;
  for (const MuChoice& c : table) {
    acc += c.probability;
    if (u < acc) return c.mu;
  }
  return table.back().mu;
}

// ---------------------------------------------------------------------------
// In-memory construction tree. Nodes store only their decision and scores; the
// partial machine is rebuilt by replay when a node is expanded.

class SearchTree {
 public:
  using Id = std::int32_t;
  static constexpr Id kNone = -1;

  struct Node {
    Id parent = kNone;
    Decision decision;
    std::uint32_t num_states = 1;
    double partial_mml = 0.0;
    double fraction_encoded = 0.0;
    std::uint64_t serial = 0;
    bool expanded = false;
    bool alive = false;
    std::vector<Id> children;
  };

  Id add_root(const SearchNode& node) {
    if (root_ != kNone) throw DomainError("tree already has a root");
    root_ = allocate(kNone, Decision{}, node);
    return root_;
  }

  Id add_child(Id parent, Decision decision, const SearchNode& node) {
    Id id = allocate(parent, decision, node);
    nodes_[parent].children.push_back(id);
    return id;
  }

  void mark_expanded(Id id) { nodes_.at(id).expanded = true; }

  /// Drops a node and, transitively, expanded ancestors left without children.
  void remove(Id id) {
    while (id != kNone) {
      Node& n = nodes_[id];
      n.alive = false;
      n.children.clear();
      free_.push_back(id);
      --live_;
      Id parent = n.parent;
      if (parent == kNone) {
        root_ = kNone;
        return;
      }
      auto& siblings = nodes_[parent].children;
      siblings.erase(std::find(siblings.begin(), siblings.end(), id));
      if (!siblings.empty() || !nodes_[parent].expanded) return;
      id = parent;
    }
  }

  const Node& operator[](Id id) const { return nodes_.at(id); }
  bool alive(Id id) const { return id >= 0 && id < static_cast<Id>(nodes_.size()) && nodes_[id].alive; }
  Id root() const noexcept { return root_; }
  bool empty() const noexcept { return root_ == kNone; }
  std::size_t live_count() const noexcept { return live_; }

  /// Unexpanded live nodes in slot order.
  std::vector<Id> frontier() const {
    std::vector<Id> out;
    for (Id id = 0; id < static_cast<Id>(nodes_.size()); ++id)
      if (nodes_[id].alive && !nodes_[id].expanded) out.push_back(id);
    return out;
  }

  /// Root-first decisions leading to `id`.
  std::vector<Decision> decisions(Id id) const {
    std::vector<Decision> out;
    for (; nodes_.at(id).parent != kNone; id = nodes_[id].parent) out.push_back(nodes_[id].decision);
    std::reverse(out.begin(), out.end());
    return out;
  }

  /// Root-first (fraction, partial) pairs along the path to `id`.
  std::vector<std::pair<double, double>> path_profile(Id id) const {
    std::vector<std::pair<double, double>> out;
    for (; id != kNone; id = nodes_.at(id).parent)
      out.emplace_back(nodes_[id].fraction_encoded, nodes_[id].partial_mml);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  Id allocate(Id parent, Decision decision, const SearchNode& node) {
    Id id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
    } else {
      id = static_cast<Id>(nodes_.size());
      nodes_.emplace_back();
    }
    Node& n = nodes_[id];
    n = Node{};
    n.parent = parent;
    n.decision = decision;
    n.num_states = static_cast<std::uint32_t>(node.num_states);
    n.partial_mml = node.partial_mml;
    n.fraction_encoded = node.fraction_encoded;
    n.serial = next_serial_++;
    n.alive = true;
    ++live_;
    return id;
  }

  std::vector<Node> nodes_;
  std::vector<Id> free_;
  Id root_ = kNone;
  std::size_t live_ = 0;
  std::uint64_t next_serial_ = 0;
};

using NodeEstimator = std::function<double(const SearchTree::Node&)>;

/// Walks from the root to an unexpanded node. At each level the lowest-estimate
/// child is taken with probability μ, otherwise a uniformly random child; μ is
/// drawn once per walk.
inline SearchTree::Id select_node_tiered(const SearchTree& tree, std::mt19937_64& rng,
                                         std::span<const MuChoice> mu_table,
                                         const NodeEstimator& estimate) {
  if (tree.empty()) throw DomainError("select_node_tiered: tree is empty");
  const double mu = draw_mu(rng, mu_table);
  SearchTree::Id id = tree.root();
  while (tree[id].expanded) {
    const auto& kids = tree[id].children;
    if (mu > 0.0 && (mu >= 1.0 || uniform_unit(rng) < mu)) {
      SearchTree::Id best = kids.front();
      double best_est = estimate(tree[best]);
      for (SearchTree::Id k : kids) {
        double e = estimate(tree[k]);
        if (e < best_est || (e == best_est && tree[k].serial < tree[best].serial)) {
          best = k;
          best_est = e;
        }
      }
      id = best;
    } else {
      id = kids[uniform_index(rng, kids.size())];
    }
  }
  return id;
}

/// Evicts the highest-estimate unexpanded nodes until at most `node_cap` nodes
/// are live. Returns the number of unexpanded nodes evicted.
inline std::size_t cull_frontier(SearchTree& tree, std::size_t node_cap, const NodeEstimator& estimate) {
  if (tree.live_count() <= node_cap) return 0;
  std::vector<std::pair<double, SearchTree::Id>> ranked;
  for (SearchTree::Id id : tree.frontier()) ranked.emplace_back(estimate(tree[id]), id);
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return tree[a.second].serial > tree[b.second].serial;
  });
  std::size_t evicted = 0;
  for (const auto& [est, id] : ranked) {
    if (tree.live_count() <= node_cap) break;
    tree.remove(id);
    ++evicted;
  }
  return evicted;
}

// ---------------------------------------------------------------------------
// The engine

namespace detail {

class InformationGuidedSearch {
 public:
  InformationGuidedSearch(const Dataset& d, const SearchOptions& opts, const Criterion& criterion)
      : data_(d), opts_(opts), criterion_(criterion), rng_(opts.seed) {}

  InductionResult run() {
    opts_.validate();
    start_ = std::chrono::steady_clock::now();
    result_.criterion = std::string(criterion_.name());

    if (out_of_budget()) throw NoModelError();
    seed_with_null_machine();
    if (out_of_budget()) return finish();

    SearchNode root = build_root(data_, criterion_);
    ++result_.nodes_examined;
    ++result_.nodes_created;
    if (root.partial_mml < best_mml_) {
      SearchTree::Id id = tree_.add_root(root);
      enqueue(id);
    }

    while (!tree_.empty()) {
      if (out_of_budget()) break;
      std::optional<SearchTree::Id> pick = select();
      if (!pick) break;
      expand(*pick);
      if (opts_.mode != SearchMode::kProve && tree_.live_count() > opts_.node_cap)
        result_.nodes_culled += cull_frontier(tree_, opts_.node_cap, estimator());
    }

    result_.exhausted = tree_.empty();
    result_.proven_optimal = opts_.mode == SearchMode::kProve && !opts_.compat_test &&
                             result_.exhausted && result_.nodes_culled == 0;
    return finish();
  }

 private:
  using Id = SearchTree::Id;
  using Keyed = std::tuple<double, std::uint64_t, Id>;
  using MinHeap = std::priority_queue<Keyed, std::vector<Keyed>, std::greater<>>;

  InductionResult finish() {
    result_.elapsed_seconds = elapsed();
    return result_;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool out_of_budget() const {
    if (opts_.max_nodes && result_.nodes_examined >= *opts_.max_nodes) return true;
    if (opts_.timeout_seconds && elapsed() >= *opts_.timeout_seconds) return true;
    return false;
  }

  void seed_with_null_machine() {
    Pfsa null = null_machine(data_);
    ++result_.nodes_examined;
    ++result_.completed_pfsa;
    result_.machine = null;
    result_.mml = criterion_.evaluate(tally_of(null));
    best_mml_ = result_.mml.total_nits();
  }

  NodeEstimator estimator() const {
    const ReferenceCurve* ref = curve_ ? &*curve_ : nullptr;
    return [ref](const SearchTree::Node& n) {
      return estimate_final_mml(n.partial_mml, n.fraction_encoded, ref);
    };
  }

  double estimate_of(Id id) const {
    const auto& n = tree_[id];
    return estimate_final_mml(n.partial_mml, n.fraction_encoded, curve_ ? &*curve_ : nullptr);
  }

  void enqueue(Id id) {
    const auto& n = tree_[id];
    if (opts_.mode == SearchMode::kProve) {
      by_partial_.emplace(n.partial_mml, n.serial, id);
    } else if (opts_.mode == SearchMode::kGreedy) {
      by_partial_.emplace(n.partial_mml, n.serial, id);
      by_estimate_.emplace(estimate_of(id), n.serial, id);
    }
  }

  bool current(const Keyed& k) const {
    Id id = std::get<2>(k);
    return tree_.alive(id) && tree_[id].serial == std::get<1>(k) && !tree_[id].expanded;
  }

  std::optional<Id> pop(MinHeap& heap) {
    while (!heap.empty()) {
      Keyed top = heap.top();
      heap.pop();
      if (current(top)) return std::get<2>(top);
    }
    return std::nullopt;
  }

  std::optional<Id> select() {
    switch (opts_.mode) {
      case SearchMode::kProve:
        return pop(by_partial_);
      case SearchMode::kGreedy: {
        unsigned cycle = opts_.switch_ratio.by_estimate + opts_.switch_ratio.by_partial;
        bool use_estimate = (selections_++ % cycle) < opts_.switch_ratio.by_estimate;
        auto picked = pop(use_estimate ? by_estimate_ : by_partial_);
        if (!picked) picked = pop(use_estimate ? by_partial_ : by_estimate_);
        return picked;
      }
      case SearchMode::kStochastic:
        return select_node_tiered(tree_, rng_, opts_.mu_table, estimator());
    }
    return std::nullopt;
  }

  void expand(Id id) {
    std::vector<Decision> path = tree_.decisions(id);
    SearchNode node = replay(data_, path, criterion_);
    ArcKey arc = select_dangling_arc(node, opts_.expansion_order);

    ExpansionStats stats;
    std::vector<SearchNode> children =
        expand_node(node, arc, data_, ExpandOptions{opts_.compat_test}, best_mml_, criterion_, &stats);
    result_.nodes_examined += stats.examined;
    tree_.mark_expanded(id);
    if (opts_.observer) opts_.observer(node, children);

    std::optional<std::size_t> improved;
    for (std::size_t i = 0; i < children.size(); ++i) {
      SearchNode& child = children[i];
      ++result_.nodes_created;
      if (!child.complete()) continue;
      ++result_.completed_pfsa;
      if (child.partial_mml < best_mml_) {
        best_mml_ = child.partial_mml;
        improved = i;
      }
    }

    std::vector<Id> added;
    for (std::size_t i = 0; i < children.size(); ++i) {
      const SearchNode& child = children[i];
      if (child.complete() || child.partial_mml >= best_mml_) continue;
      StateId dest = child.fixed_arc(arc.state, arc.symbol).dest;
      added.push_back(tree_.add_child(id, Decision{arc, dest}, child));
    }

    if (improved) adopt_incumbent(id, children[*improved]);
    if (tree_.alive(id) && tree_[id].children.empty()) tree_.remove(id);
    for (Id child : added)
      if (tree_.alive(child)) enqueue(child);
  }

  /// New incumbent: record it, rebuild the reference curve from its path and
  /// drop everything its MML now bounds out.
  void adopt_incumbent(Id parent, const SearchNode& leaf) {
    result_.machine = extract_pfsa(leaf, data_.alphabet());
    result_.mml = criterion_.evaluate(tally_of(result_.machine));
    auto profile = tree_.path_profile(parent);
    profile.emplace_back(1.0, leaf.partial_mml);
    curve_ = ReferenceCurve(std::move(profile));

    for (Id f : tree_.frontier())
      if (tree_.alive(f) && tree_[f].partial_mml >= best_mml_) tree_.remove(f);

    if (opts_.mode == SearchMode::kGreedy) {
      by_estimate_ = MinHeap();
      for (Id f : tree_.frontier()) by_estimate_.emplace(estimate_of(f), tree_[f].serial, f);
    }
  }

  const Dataset& data_;
  SearchOptions opts_;
  const Criterion& criterion_;
  std::mt19937_64 rng_;
  std::chrono::steady_clock::time_point start_;

  SearchTree tree_;
  MinHeap by_partial_;
  MinHeap by_estimate_;
  std::uint64_t selections_ = 0;

  double best_mml_ = std::numeric_limits<double>::infinity();
  std::optional<ReferenceCurve> curve_;
  InductionResult result_;
};

}  // namespace detail

/// Best complete PFSA found for `d`. The 1-state machine seeds the incumbent,
/// so a result exists once a single node of budget is available.
inline InductionResult induce(const Dataset& d, const SearchOptions& opts = {},
                              const Criterion& criterion = default_criterion()) {
  return detail::InformationGuidedSearch(d, opts, criterion).run();
}

}  // namespace igs
