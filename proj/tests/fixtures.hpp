#pragma once

#include <random>
#include <string>

#include "igs/igs.hpp"

namespace igs::testing {

inline constexpr const char* kDatasetD = "CAAAB/BBAAB/CAAB/BBAB/CAB/BBB/CB";

// Nit values for dataset D, evaluated independently of the library.
inline constexpr double kNullMmlD = 48.9501700900;
inline constexpr double kOptimumMmlD = 39.6413633965;
inline constexpr double kRootPartialD = 9.5059906141;

/// Up to `max_sentences` sentences of length 1..max_len over the first
/// `tokens` letters.
inline Dataset random_small_dataset(std::mt19937_64& rng, std::size_t max_sentences, std::size_t tokens,
                                    std::size_t max_len) {
  std::size_t n = 1 + uniform_index(rng, max_sentences);
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) text += '/';
    std::size_t len = 1 + uniform_index(rng, max_len);
    for (std::size_t k = 0; k < len; ++k) text += static_cast<char>('A' + uniform_index(rng, tokens));
  }
  return parse_dataset(text);
}

}  // namespace igs::testing
