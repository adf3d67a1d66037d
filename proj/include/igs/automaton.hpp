#pragma once

// Datasets of token sentences and deterministic PFSA with per-arc transition
// counts. Symbols are dense indices into an Alphabet; the delimiter is always
// the last symbol.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "igs/error.hpp"

namespace igs {

using Symbol = std::uint32_t;
using StateId = std::uint32_t;
inline constexpr StateId kNoState = std::numeric_limits<StateId>::max();
using Sentence = std::vector<Symbol>;

class Alphabet {
 public:
  Alphabet() = default;

  /// Tokens are sorted; the delimiter becomes symbol `tokens.size()`.
  explicit Alphabet(std::vector<std::string> tokens, std::string delimiter = "d")
      : tokens_(std::move(tokens)), delimiter_(std::move(delimiter)) {
    std::sort(tokens_.begin(), tokens_.end());
    if (tokens_.empty()) throw DomainError("alphabet needs at least one token");
    if (std::adjacent_find(tokens_.begin(), tokens_.end()) != tokens_.end())
      throw DomainError("alphabet tokens must be distinct");
    if (std::binary_search(tokens_.begin(), tokens_.end(), delimiter_))
      throw DomainError("delimiter '" + delimiter_ + "' collides with a token");
  }

  /// Number of arc classes: tokens plus the delimiter.
  std::size_t size() const noexcept { return tokens_.size() + 1; }
  std::size_t token_count() const noexcept { return tokens_.size(); }
  Symbol delimiter() const noexcept { return static_cast<Symbol>(tokens_.size()); }
  bool is_delimiter(Symbol s) const noexcept { return s == delimiter(); }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& delimiter_name() const noexcept { return delimiter_; }

  const std::string& name(Symbol s) const {
    if (s == delimiter()) return delimiter_;
    return tokens_.at(s);
  }

  std::optional<Symbol> find(std::string_view token) const {
    auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
    if (it == tokens_.end() || *it != token) return std::nullopt;
    return static_cast<Symbol>(it - tokens_.begin());
  }

  /// Delimiter name that does not clash with any of `tokens`.
  static std::string pick_delimiter(const std::vector<std::string>& tokens) {
    for (std::string candidate : {"d", "$", "<d>", "<eos>"})
      if (std::find(tokens.begin(), tokens.end(), candidate) == tokens.end()) return candidate;
    std::string fallback = "<eos>";
    while (std::find(tokens.begin(), tokens.end(), fallback) != tokens.end()) fallback += "_";
    return fallback;
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> tokens_;
  std::string delimiter_ = "d";
};

class Dataset {
 public:
  Dataset() = default;

  Dataset(Alphabet alphabet, std::vector<Sentence> sentences)
      : alphabet_(std::move(alphabet)), sentences_(std::move(sentences)) {
    if (sentences_.empty()) throw DomainError("dataset has no sentences");
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
      if (sentences_[i].empty())
        throw DomainError("sentence " + std::to_string(i) + " is empty");
      for (Symbol s : sentences_[i])
        if (s >= alphabet_.token_count())
          throw DomainError("sentence " + std::to_string(i) + " has a symbol outside the alphabet");
      total_ += sentences_[i].size() + 1;
    }
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
  std::size_t size() const noexcept { return sentences_.size(); }
  const Sentence& operator[](std::size_t i) const { return sentences_[i]; }

  /// Σ (len + 1): every sentence ends with an implicit delimiter transition.
  std::uint64_t total_transitions() const noexcept { return total_; }

  /// Symbol consumed at `position` of sentence `i`; the delimiter at the end.
  Symbol symbol_at(std::size_t i, std::size_t position) const {
    const Sentence& s = sentences_[i];
    return position < s.size() ? s[position] : alphabet_.delimiter();
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.alphabet_ == b.alphabet_ && a.sentences_ == b.sentences_;
  }

 private:
  Alphabet alphabet_;
  std::vector<Sentence> sentences_;
  std::uint64_t total_ = 0;
};

struct Arc {
  StateId dest = kNoState;
  std::uint64_t count = 0;

  bool present() const noexcept { return dest != kNoState; }
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Deterministic PFSA stored as a dense (state × symbol) arc table. State 0 is
/// the start state.
class Pfsa {
 public:
  Pfsa() = default;

  Pfsa(Alphabet alphabet, std::size_t num_states)
      : alphabet_(std::move(alphabet)),
        num_states_(num_states),
        table_(num_states * alphabet_.size()) {
    if (num_states == 0) throw DomainError("a PFSA needs at least one state");
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t width() const noexcept { return alphabet_.size(); }

  const Arc& arc(StateId state, Symbol symbol) const { return table_.at(index(state, symbol)); }

  std::span<const Arc> arcs_from(StateId state) const {
    return std::span<const Arc>(table_).subspan(std::size_t{state} * width(), width());
  }

  void set_arc(StateId state, Symbol symbol, StateId dest, std::uint64_t count) {
    if (dest >= num_states_) throw DomainError("arc destination out of range");
    table_.at(index(state, symbol)) = Arc{dest, count};
  }

  void remove_arc(StateId state, Symbol symbol) { table_.at(index(state, symbol)) = Arc{}; }

  StateId add_state() {
    table_.resize(table_.size() + width());
    return static_cast<StateId>(num_states_++);
  }

  std::size_t arc_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(table_.begin(), table_.end(), [](const Arc& a) { return a.present(); }));
  }

  std::size_t out_degree(StateId state) const {
    auto arcs = arcs_from(state);
    return static_cast<std::size_t>(
        std::count_if(arcs.begin(), arcs.end(), [](const Arc& a) { return a.present(); }));
  }

  std::size_t max_out_degree() const {
    std::size_t best = 0;
    for (StateId s = 0; s < num_states_; ++s) best = std::max(best, out_degree(s));
    return best;
  }

  std::uint64_t total_count() const noexcept {
    std::uint64_t total = 0;
    for (const Arc& a : table_)
      if (a.present()) total += a.count;
    return total;
  }

  /// States in breadth-first discovery order from the start state.
  std::vector<bool> reachable() const {
    std::vector<bool> seen(num_states_, false);
    std::deque<StateId> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      StateId s = queue.front();
      queue.pop_front();
      for (const Arc& a : arcs_from(s))
        if (a.present() && !seen[a.dest]) {
          seen[a.dest] = true;
          queue.push_back(a.dest);
        }
    }
    return seen;
  }

  /// Throws DomainError when a structural invariant is broken.
  void validate() const {
    for (StateId s = 0; s < num_states_; ++s)
      for (Symbol y = 0; y < width(); ++y) {
        const Arc& a = arc(s, y);
        if (!a.present()) continue;
        if (a.count == 0)
          throw DomainError("arc (" + std::to_string(s) + ", " + alphabet_.name(y) +
                            ") has zero count");
        if (alphabet_.is_delimiter(y) && a.dest != 0)
          throw DomainError("delimiter arc of state " + std::to_string(s) +
                            " does not return to the start state");
      }
    auto seen = reachable();
    for (StateId s = 0; s < num_states_; ++s)
      if (!seen[s]) throw DomainError("state " + std::to_string(s) + " is unreachable");
  }

  friend bool operator==(const Pfsa&, const Pfsa&) = default;

 private:
  std::size_t index(StateId state, Symbol symbol) const {
    if (state >= num_states_ || symbol >= width()) throw DomainError("arc index out of range");
    return std::size_t{state} * width() + symbol;
  }

  Alphabet alphabet_;
  std::size_t num_states_ = 0;
  std::vector<Arc> table_;
};

// ---------------------------------------------------------------------------
// Dataset text formats

enum class DatasetFormat {
  kAuto,   // slash when the text has no whitespace inside sentences, else lines
  kSlash,  // "CAAAB/BBAAB/CB": one token per UTF-8 scalar, '/' or newline ends a sentence
  kLines,  // one sentence per line, tokens separated by whitespace
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

/// Length in bytes of the UTF-8 scalar starting at `text[pos]`.
inline std::size_t utf8_length(std::string_view text, std::size_t pos) {
  auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3
                                    : (lead >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || pos + len > text.size()) throw ParseError("invalid UTF-8", pos);
  for (std::size_t k = 1; k < len; ++k)
    if ((static_cast<unsigned char>(text[pos + k]) >> 6) != 0x2)
      throw ParseError("invalid UTF-8", pos);
  return len;
}

inline Dataset intern(const std::vector<std::vector<std::string>>& raw) {
  std::set<std::string> seen;
  for (const auto& sentence : raw) seen.insert(sentence.begin(), sentence.end());
  std::vector<std::string> tokens(seen.begin(), seen.end());
  std::string delim = Alphabet::pick_delimiter(tokens);
  Alphabet alphabet(std::move(tokens), std::move(delim));
  std::vector<Sentence> sentences;
  sentences.reserve(raw.size());
  for (const auto& sentence : raw) {
    Sentence s;
    s.reserve(sentence.size());
    for (const auto& tok : sentence) s.push_back(*alphabet.find(tok));
    sentences.push_back(std::move(s));
  }
  return Dataset(std::move(alphabet), std::move(sentences));
}

}  // namespace detail

inline Dataset parse_dataset(std::string_view text, DatasetFormat format = DatasetFormat::kAuto) {
  std::string_view body = detail::trim(text);
  if (body.empty()) throw ParseError("dataset text is empty", 0);
  std::size_t offset = static_cast<std::size_t>(body.data() - text.data());

  if (format == DatasetFormat::kAuto) {
    bool inner_space = std::any_of(body.begin(), body.end(),
                                   [](char c) { return c == ' ' || c == '\t'; });
    format = inner_space ? DatasetFormat::kLines : DatasetFormat::kSlash;
  }

  std::vector<std::vector<std::string>> raw;
  if (format == DatasetFormat::kSlash) {
    std::vector<std::string> current;
    std::size_t start = 0;
    auto finish = [&](std::size_t pos) {
      if (current.empty()) throw ParseError("empty sentence", offset + pos);
      raw.push_back(std::move(current));
      current.clear();
    };
    for (std::size_t pos = 0; pos < body.size();) {
      char c = body[pos];
      if (c == '/' || c == '\n') {
        finish(start);
        ++pos;
        start = pos;
        continue;
      }
      if (c == '\r') {
        ++pos;
        continue;
      }
      if (detail::is_space(c)) throw ParseError("whitespace inside a slash-separated sentence", offset + pos);
      std::size_t len = detail::utf8_length(body, pos);
      current.emplace_back(body.substr(pos, len));
      pos += len;
    }
    finish(start);
  } else {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t end = body.find('\n', pos);
      if (end == std::string_view::npos) end = body.size();
      std::string_view line = body.substr(pos, end - pos);
      ++line_no;
      std::vector<std::string> tokens;
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && detail::is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !detail::is_space(line[j])) ++j;
        if (j > i) tokens.emplace_back(line.substr(i, j - i));
        i = j;
      }
      if (tokens.empty()) throw ParseError("empty sentence on line " + std::to_string(line_no), offset + pos);
      raw.push_back(std::move(tokens));
      pos = end + 1;
    }
  }
  if (raw.empty()) throw ParseError("dataset has no sentences", offset);
  return detail::intern(raw);
}

/// Inverse of parse_dataset. Slash format requires single-scalar tokens.
inline std::string format_dataset(const Dataset& d, DatasetFormat format = DatasetFormat::kAuto) {
  const Alphabet& alpha = d.alphabet();
  if (format == DatasetFormat::kAuto) {
    bool single = std::all_of(alpha.tokens().begin(), alpha.tokens().end(), [](const std::string& t) {
      return !t.empty() && t != "/" && detail::utf8_length(t, 0) == t.size() &&
             !detail::is_space(t[0]);
    });
    format = single ? DatasetFormat::kSlash : DatasetFormat::kLines;
  }
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i > 0) out += format == DatasetFormat::kSlash ? "/" : "\n";
    for (std::size_t j = 0; j < d[i].size(); ++j) {
      if (format == DatasetFormat::kLines && j > 0) out += ' ';
      out += alpha.name(d[i][j]);
    }
  }
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Tracing and counting

/// States visited while reading `sentence` and its delimiter: len + 2 entries.
inline std::vector<StateId> trace(const Pfsa& m, std::span<const Symbol> sentence,
                                  std::size_t sentence_index = 0) {
  std::vector<StateId> path;
  path.reserve(sentence.size() + 2);
  StateId state = 0;
  path.push_back(state);
  for (std::size_t pos = 0; pos <= sentence.size(); ++pos) {
    Symbol y = pos < sentence.size() ? sentence[pos] : m.alphabet().delimiter();
    if (y >= m.width()) throw NotAcceptedError(sentence_index, pos);
    const Arc& a = m.arc(state, y);
    if (!a.present()) throw NotAcceptedError(sentence_index, pos);
    state = a.dest;
    path.push_back(state);
  }
  return path;
}

/// Keeps only the states reachable from the start, preserving their order.
inline Pfsa prune_unreachable(const Pfsa& m) {
  auto seen = m.reachable();
  std::vector<StateId> remap(m.num_states(), kNoState);
  StateId next = 0;
  for (StateId s = 0; s < m.num_states(); ++s)
    if (seen[s]) remap[s] = next++;
  Pfsa out(m.alphabet(), next);
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (!seen[s]) continue;
    for (Symbol y = 0; y < m.width(); ++y) {
      const Arc& a = m.arc(s, y);
      if (a.present()) out.set_arc(remap[s], y, remap[a.dest], a.count);
    }
  }
  return out;
}

/// Same structure with counts refit to the traversals of `d`; dead arcs and
/// the states they stranded are dropped.
inline Pfsa fit_counts(const Pfsa& m, const Dataset& d) {
  if (!(m.alphabet() == d.alphabet())) throw DomainError("machine and dataset alphabets differ");
  std::vector<std::uint64_t> tally(m.num_states() * m.width(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto path = trace(m, d[i], i);
    for (std::size_t pos = 0; pos + 1 < path.size(); ++pos)
      ++tally[std::size_t{path[pos]} * m.width() + d.symbol_at(i, pos)];
  }
  Pfsa out(m.alphabet(), m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s)
    for (Symbol y = 0; y < m.width(); ++y) {
      std::uint64_t n = tally[std::size_t{s} * m.width() + y];
      if (n > 0) out.set_arc(s, y, m.arc(s, y).dest, n);
    }
  return prune_unreachable(out);
}

inline bool accepts_all(const Pfsa& m, const Dataset& d) {
  if (!(m.alphabet() == d.alphabet())) return false;
  try {
    for (std::size_t i = 0; i < d.size(); ++i) trace(m, d[i], i);
  } catch (const NotAcceptedError&) {
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Canonical form

/// Relabels states in breadth-first discovery order, visiting arcs in symbol
/// order. Unreachable states are dropped.
inline Pfsa canonicalize(const Pfsa& m) {
  std::vector<StateId> label(m.num_states(), kNoState);
  std::vector<StateId> order;
  order.reserve(m.num_states());
  label[0] = 0;
  order.push_back(0);
  for (std::size_t head = 0; head < order.size(); ++head)
    for (const Arc& a : m.arcs_from(order[head]))
      if (a.present() && label[a.dest] == kNoState) {
        label[a.dest] = static_cast<StateId>(order.size());
        order.push_back(a.dest);
      }
  Pfsa out(m.alphabet(), order.size());
  for (StateId s : order)
    for (Symbol y = 0; y < m.width(); ++y) {
      const Arc& a = m.arc(s, y);
      if (a.present()) out.set_arc(label[s], y, label[a.dest], a.count);
    }
  return out;
}

/// Equal up to a relabeling of states; `strict` also compares counts.
inline bool is_isomorphic(const Pfsa& a, const Pfsa& b, bool strict = false) {
  if (!(a.alphabet() == b.alphabet())) return false;
  Pfsa ca = canonicalize(a);
  Pfsa cb = canonicalize(b);
  if (ca.num_states() != cb.num_states()) return false;
  for (StateId s = 0; s < ca.num_states(); ++s)
    for (Symbol y = 0; y < ca.width(); ++y) {
      const Arc& x = ca.arc(s, y);
      const Arc& z = cb.arc(s, y);
      if (x.dest != z.dest) return false;
      if (strict && x.count != z.count) return false;
    }
  return true;
}

/// Single-state machine with a self-loop for every symbol seen in `d`.
inline Pfsa null_machine(const Dataset& d) {
  Pfsa m(d.alphabet(), 1);
  for (const Sentence& s : d.sentences())
    for (Symbol y : s) m.set_arc(0, y, 0, 1);
  m.set_arc(0, d.alphabet().delimiter(), 0, 1);
  return fit_counts(m, d);
}

}  // namespace igs
