#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace igs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset or document text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A sentence has no path through a machine.
class NotAcceptedError : public Error {
 public:
  NotAcceptedError(std::size_t sentence, std::size_t position)
      : Error("sentence " + std::to_string(sentence) + " not accepted at position " +
              std::to_string(position)),
        sentence_(sentence),
        position_(position) {}

  std::size_t sentence() const noexcept { return sentence_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t sentence_;
  std::size_t position_;
};

/// Argument outside an operation's domain (bad class counts, mismatched alphabets, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Search budget ran out before any complete machine was found.
class NoModelError : public Error {
 public:
  NoModelError() : Error("no model found within budget") {}
};

/// Exhaustive enumeration exceeded its node budget.
class TooLargeError : public Error {
 public:
  TooLargeError(std::uint64_t nodes, std::uint64_t leaves)
      : Error("too large to enumerate: budget exhausted after " + std::to_string(nodes) +
              " nodes (" + std::to_string(leaves) + " complete machines)"),
        nodes_(nodes),
        leaves_(leaves) {}

  std::uint64_t nodes() const noexcept { return nodes_; }
  std::uint64_t leaves() const noexcept { return leaves_; }

 private:
  std::uint64_t nodes_;
  std::uint64_t leaves_;
};

}  // namespace igs
