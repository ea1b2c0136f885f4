#pragma once

#include <cstdint>
#include <vector>

#include "pmctag/keys.hpp"

namespace pmctag {

using Count = std::uint64_t;

// Occurrence counts of label/word patterns over L training chains.
//
// The primary tables are `initial` (N0_{i,k}), `patterns` (N_{i,k,j,l}) and
// `chains` (L). Everything else is a cached marginal rebuilt by
// rebuild_marginals():
//   N0_i   = sum_k N0_{i,k}
//   N_ikj  = sum_l N_{i,k,j,l}
//   N_ij   = sum_k N_{i,k,j}        (dense N x N, row-major)
//   M_ik   = sum_j N_{i,k,j}
//   N_i    = sum_j N_{i,j}
//   N_kl   = sum_{i,j} N_{i,k,j,l}  (observed word bigrams)
struct CountTables {
  std::size_t num_labels = 0;
  Count chains = 0;
  HashMap<LabelWord, Count> initial;
  HashMap<Pattern, Count> patterns;

  std::vector<Count> initial_label;
  HashMap<LabelWordLabel, Count> label_word_label;
  std::vector<Count> label_bigram;
  HashMap<LabelWord, Count> label_word;
  std::vector<Count> label_total;
  HashMap<WordBigram, Count> word_bigram;

  Count bigram(LabelId i, LabelId j) const { return label_bigram[i * num_labels + j]; }

  // Adds `other` into this table. Both must already share id spaces.
  void merge(const CountTables& other);

  // Recomputes every cached marginal from the primary tables for an alphabet
  // of `labels` entries.
  void rebuild_marginals(std::size_t labels);

  friend bool operator==(const CountTables&, const CountTables&) = default;
};

}  // namespace pmctag
