#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "pmctag/counts.hpp"
#include "pmctag/interner.hpp"

namespace pmctag {

struct LabeledCorpus;

// Orthographic view of a token used to score words missing from the
// vocabulary.
struct WordFeatures {
  bool cap = false;     // first character is an uppercase letter
  bool hyphen = false;  // contains '-'
  bool first = false;   // sentence-initial token
  bool digit = false;   // contains a decimal digit
  std::string suffix;   // last min(m, length) code points

  std::uint8_t bits() const {
    return static_cast<std::uint8_t>(cap | (hyphen << 1) | (first << 2) | (digit << 3));
  }
  auto operator<=>(const WordFeatures&) const = default;
};

// Throws kEmptyToken for an empty word. Suffix length is counted in UTF-8 code
// points.
WordFeatures extract_features(std::string_view word, std::size_t position, std::size_t suffix_len);

// Key of one cell of a feature table: label plus the joint feature tuple.
struct FeatureKey {
  LabelId label = 0;
  std::uint8_t bits = 0;
  std::string suffix;
  auto operator<=>(const FeatureKey&) const = default;
};

struct FeatureKeyHash {
  std::size_t operator()(const FeatureKey& k) const noexcept;
};

// Per suffix level m in 0..max_suffix: counts of (label, u, h, f, d, s_m) over
// all training tokens, plus per-label token totals.
struct FeatureCounts {
  std::size_t max_suffix = 0;
  std::vector<HashMap<FeatureKey, Count, FeatureKeyHash>> levels;
  std::vector<Count> label_tokens;

  void resize_labels(std::size_t labels);
  void add_token(LabelId label, std::string_view word, std::size_t position);
  void merge(const FeatureCounts& other);

  friend bool operator==(const FeatureCounts&, const FeatureCounts&) = default;
};

// Conditional tables p(u, h, f, d, s_m | label) with the set of suffixes seen
// at each level, which drives back-off.
struct FeatureEmissionTables {
  std::size_t max_suffix = 0;
  std::size_t num_labels = 0;
  std::vector<HashMap<FeatureKey, double, FeatureKeyHash>> levels;
  std::vector<std::unordered_set<std::string>> seen_suffixes;

  // Largest m <= max_suffix whose suffix of `word` was seen in training.
  std::size_t backoff_level(const WordFeatures& full) const;

  friend bool operator==(const FeatureEmissionTables&, const FeatureEmissionTables&) = default;
};

FeatureCounts count_features(const LabeledCorpus& corpus, const LabelAlphabet& alphabet,
                             std::size_t max_suffix);

FeatureEmissionTables fit_feature_tables(const FeatureCounts& counts);

// Interns labels of `corpus` into a fresh alphabet and fits the tables.
// Throws kEmptyCorpus for an empty corpus.
FeatureEmissionTables fit_feature_tables(const LabeledCorpus& corpus, std::size_t max_suffix,
                                         LabelAlphabet* alphabet = nullptr);

double feature_emission_prob(const FeatureEmissionTables& tables, LabelId label,
                             std::string_view word, std::size_t position);

// Same as feature_emission_prob for every label at once; the back-off level is
// chosen once per token.
std::vector<double> feature_emission_column(const FeatureEmissionTables& tables,
                                            std::string_view word, std::size_t position);

}  // namespace pmctag
