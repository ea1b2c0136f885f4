#pragma once

#include <cstddef>
#include <random>

#include "pmctag/corpus.hpp"

namespace pmctag::synthetic {

struct CorpusShape {
  std::size_t sentences = 200;
  std::size_t labels = 5;
  std::size_t words_per_label = 40;
  std::size_t min_length = 1;
  std::size_t max_length = 12;
  // Probability that a word's choice depends on the previous word, which is
  // the dependence an HMC cannot represent.
  double pair_dependence = 0.5;
};

// Random labeled corpus drawn from a fixed random generator: labels follow a
// Markov chain, words are Zipf-distributed per label with some dependence on
// the previous (label, word). Word strings mix case, hyphens and digits so the
// orthographic features are exercised. Deterministic for a given seed.
LabeledCorpus random_corpus(std::uint64_t seed, const CorpusShape& shape);

}  // namespace pmctag::synthetic
