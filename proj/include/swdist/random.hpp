#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace swdist {

/// Engine keyed by a tuple of integers, e.g. {seed, split_index}. Streams for
/// different keys are independent and do not depend on call order.
inline std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * key.size());
  for (std::uint64_t k : key) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) {
  auto engine = make_engine(key);
  return engine();
}

}  // namespace swdist
