#pragma once

#include <cstddef>

#include "pmctag/corpus.hpp"
#include "pmctag/model.hpp"

namespace pmctag {

struct TrainConfig {
  Task task = Task::kPos;
  std::size_t suffix_max_len = 3;
  int tag_column = 1;
};

// Interns words and labels of `corpus` (appending to `alphabet`/`vocabulary`)
// and counts initial pairs and adjacent patterns. Marginals are rebuilt for
// the final alphabet size. Throws kEmptyCorpus / kEmptySentence.
CountTables accumulate_counts(const LabeledCorpus& corpus, LabelAlphabet& alphabet,
                              Vocabulary& vocabulary);

// pi(i) = N0_i / L, a_i(j) = N_ij / N_i, b_i(k) = M_ik / N_i.
HmcParams fit_hmc(const CountTables& counts);

// pi(i,k) = N0_ik / L, a_{i,k}(j) = N_ikj / M_ik, b_{i,j,k}(l) = N_ikjl / N_ikj.
PmcParams fit_pmc(const CountTables& counts);

// One pass over the corpus producing every table of the bundle.
ModelBundle train(const LabeledCorpus& corpus, const TrainConfig& config);

// Adds `delta` to the model's counts and re-derives all tables. The result is
// identical to train() on the concatenation of the original corpus and
// `delta`. Throws kEmptyCorpus when `delta` has no sentences.
ModelBundle update_online(const ModelBundle& model, const LabeledCorpus& delta);

// Recomputes hmc, pmc and feature tables from the bundle's counts.
void refit(ModelBundle& model);

// HMC-only training path that counts label bigrams and emissions directly,
// without the pair-pattern tables. Used for timing comparisons.
struct HmcModel {
  LabelAlphabet alphabet;
  Vocabulary vocabulary;
  HmcParams hmc;
  FeatureEmissionTables features;
};

HmcModel train_hmc_only(const LabeledCorpus& corpus, const TrainConfig& config);

}  // namespace pmctag
