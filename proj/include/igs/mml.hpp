#pragma once

// Message lengths for multistate distributions and PFSA, in nits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "igs/automaton.hpp"
#include "igs/error.hpp"

namespace igs {

inline constexpr double kBitsPerNit = std::numbers::log2e;

/// ln(n!) through a lazily built table; lgamma past the table.
inline double log_factorial(std::uint64_t n) {
  static constexpr std::size_t kTableSize = 1 << 16;
  static const std::vector<double> table = [] {
    std::vector<double> t(kTableSize);
    for (std::size_t i = 0; i < kTableSize; ++i) t[i] = std::lgamma(static_cast<double>(i) + 1.0);
    return t;
  }();
  if (n < kTableSize) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

struct MmlBreakdown {
  double structure_nits = 0.0;
  double data_nits = 0.0;

  double total_nits() const noexcept { return structure_nits + data_nits; }
  double total_bits() const noexcept { return total_nits() * kBitsPerNit; }

  friend bool operator==(const MmlBreakdown&, const MmlBreakdown&) = default;
};

/// Counts over A classes known a priori.
struct ClassDistribution {
  std::vector<std::uint64_t> counts;

  ClassDistribution() = default;
  explicit ClassDistribution(std::size_t classes) : counts(classes, 0) {}
  explicit ClassDistribution(std::vector<std::uint64_t> c) : counts(std::move(c)) {}

  std::size_t classes() const noexcept { return counts.size(); }

  std::size_t present() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](std::uint64_t n) { return n > 0; }));
  }

  std::uint64_t total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  }

  ClassDistribution operator+(const ClassDistribution& other) const {
    if (other.classes() != classes()) throw DomainError("class counts differ");
    ClassDistribution sum(classes());
    for (std::size_t i = 0; i < classes(); ++i) sum.counts[i] = counts[i] + other.counts[i];
    return sum;
  }
};

/// Cost of stating how many of the A classes occur and which ones:
/// ln A + ln C(A, a).
inline double structure_cost(std::size_t classes, std::size_t present) {
  if (present < 1 || present > classes)
    throw DomainError("structure_cost needs 1 <= a <= A (A=" + std::to_string(classes) +
                      ", a=" + std::to_string(present) + ")");
  return std::log(static_cast<double>(classes)) + log_factorial(classes) -
         log_factorial(classes - present) - log_factorial(present);
}

/// Cost of the class counts given t and the present classes:
/// ln((t+a-1)!/(a-1)!) - Σ ln(n_i!).
inline double data_cost(std::span<const std::uint64_t> counts) {
  std::uint64_t t = 0;
  std::size_t a = 0;
  double sum_logs = 0.0;
  for (std::uint64_t n : counts) {
    if (n == 0) continue;
    t += n;
    ++a;
    sum_logs += log_factorial(n);
  }
  if (t == 0) return 0.0;
  return log_factorial(t + a - 1) - log_factorial(a - 1) - sum_logs;
}

inline double data_cost(const ClassDistribution& dist) { return data_cost(dist.counts); }

/// structure_cost + data_cost; an empty distribution costs nothing.
inline double distribution_ml(const ClassDistribution& dist) {
  std::size_t a = dist.present();
  if (a == 0) return 0.0;
  return structure_cost(dist.classes(), a) + data_cost(dist);
}

/// Whether the pooled distribution is no more expensive than stating the two
/// separately.
inline bool compatible(const ClassDistribution& d1, const ClassDistribution& d2) {
  if (d1.classes() != d2.classes()) throw DomainError("compatible: class counts differ");
  return distribution_ml(d1 + d2) <= distribution_ml(d1) + distribution_ml(d2);
}

// ---------------------------------------------------------------------------
// Criterion

/// What a criterion sees of a (possibly partial) machine: the state count, each
/// state's per-class transition counts, and how many of its arcs need a
/// destination stated.
struct MachineTally {
  std::size_t num_states = 0;
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;         // num_states × classes
  std::vector<std::uint32_t> routed_arcs;    // per state: non-delimiter arcs

  MachineTally() = default;
  MachineTally(std::size_t states, std::size_t width)
      : num_states(states), classes(width), counts(states * width, 0), routed_arcs(states, 0) {}

  std::span<const std::uint64_t> state_counts(std::size_t s) const {
    return std::span<const std::uint64_t>(counts).subspan(s * classes, classes);
  }
};

class Criterion {
 public:
  virtual ~Criterion() = default;
  virtual std::string_view name() const = 0;
  virtual MmlBreakdown evaluate(const MachineTally& tally) const = 0;
};

/// Two-part code in the Wallace–Georgeff style: state count, then per state the
/// set of outgoing arc classes, a destination for each non-delimiter arc, and
/// the transition counts as a multistate distribution.
class WallaceGeorgeffCriterion final : public Criterion {
 public:
  std::string_view name() const override { return "wg"; }

  MmlBreakdown evaluate(const MachineTally& tally) const override {
    const double states = static_cast<double>(tally.num_states);
    const double ln_states = std::log(states);
    MmlBreakdown out;
    out.structure_nits = ln_states + std::log(states + 1.0);
    for (std::size_t s = 0; s < tally.num_states; ++s) {
      auto row = tally.state_counts(s);
      std::size_t a = static_cast<std::size_t>(
          std::count_if(row.begin(), row.end(), [](std::uint64_t n) { return n > 0; }));
      if (a > 0) out.structure_nits += structure_cost(tally.classes, a);
      out.structure_nits += tally.routed_arcs[s] * ln_states;
      out.data_nits += data_cost(row);
    }
    return out;
  }
};

inline const Criterion& default_criterion() {
  static const WallaceGeorgeffCriterion criterion;
  return criterion;
}

inline std::vector<std::string> criterion_names() { return {"wg"}; }

inline std::unique_ptr<Criterion> make_criterion(std::string_view name) {
  if (name == "wg") return std::make_unique<WallaceGeorgeffCriterion>();
  throw DomainError("unknown criterion '" + std::string(name) + "'");
}

inline MachineTally tally_of(const Pfsa& m) {
  MachineTally tally(m.num_states(), m.width());
  for (StateId s = 0; s < m.num_states(); ++s)
    for (Symbol y = 0; y < m.width(); ++y) {
      const Arc& a = m.arc(s, y);
      if (!a.present()) continue;
      tally.counts[std::size_t{s} * m.width() + y] = a.count;
      if (!m.alphabet().is_delimiter(y)) ++tally.routed_arcs[s];
    }
  return tally;
}

/// Message length of a complete machine whose counts match `d`.
inline MmlBreakdown score(const Pfsa& m, const Dataset& d,
                          const Criterion& criterion = default_criterion()) {
  if (!(fit_counts(m, d) == m))
    throw DomainError("machine counts are inconsistent with the dataset");
  return criterion.evaluate(tally_of(m));
}

}  // namespace igs
