#pragma once

#include <compare>
#include <cstdint>
#include <functional>

#include <absl/container/flat_hash_map.h>

#include "pmctag/interner.hpp"

namespace pmctag {

// Label ids are packed into 16 bits inside composite keys.
inline constexpr std::size_t kMaxLabels = 1u << 16;

// Open-addressing table used for every count and parameter map.
template <class K, class V, class Hash = std::hash<K>>
using HashMap = absl::flat_hash_map<K, V, Hash>;

inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// (x_t = i, y_t = k)
struct LabelWord {
  LabelId label = 0;
  WordId word = 0;
  auto operator<=>(const LabelWord&) const = default;
};

// (x_t = i, y_t = k, x_{t+1} = j)
struct LabelWordLabel {
  LabelId label = 0;
  WordId word = 0;
  LabelId next_label = 0;
  auto operator<=>(const LabelWordLabel&) const = default;
};

// (x_t = i, y_t = k, x_{t+1} = j, y_{t+1} = l)
struct Pattern {
  LabelId label = 0;
  WordId word = 0;
  LabelId next_label = 0;
  WordId next_word = 0;
  auto operator<=>(const Pattern&) const = default;

  LabelWordLabel prefix() const { return {label, word, next_label}; }
};

// (y_t = k, y_{t+1} = l)
struct WordBigram {
  WordId word = 0;
  WordId next_word = 0;
  auto operator<=>(const WordBigram&) const = default;
};

}  // namespace pmctag

template <>
struct std::hash<pmctag::LabelWord> {
  std::size_t operator()(const pmctag::LabelWord& k) const noexcept {
    return pmctag::mix64((std::uint64_t{k.label} << 32) | k.word);
  }
};

template <>
struct std::hash<pmctag::LabelWordLabel> {
  std::size_t operator()(const pmctag::LabelWordLabel& k) const noexcept {
    return pmctag::mix64((std::uint64_t{k.label} << 48) | (std::uint64_t{k.word} << 16) |
                         k.next_label);
  }
};

template <>
struct std::hash<pmctag::Pattern> {
  std::size_t operator()(const pmctag::Pattern& k) const noexcept {
    const std::uint64_t head =
        (std::uint64_t{k.label} << 48) | (std::uint64_t{k.word} << 16) | k.next_label;
    return pmctag::mix64(head ^ pmctag::mix64(k.next_word + 0x9e3779b97f4a7c15ULL));
  }
};

template <>
struct std::hash<pmctag::WordBigram> {
  std::size_t operator()(const pmctag::WordBigram& k) const noexcept {
    return pmctag::mix64((std::uint64_t{k.word} << 32) | k.next_word);
  }
};
