#pragma once

// Exhaustive reference implementations for small instances. Exponential in
// sentence length by construction; used by tests and `pmctag verify`.

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "pmctag/corpus.hpp"
#include "pmctag/inference.hpp"
#include "pmctag/params.hpp"

namespace pmctag::oracle {

inline constexpr std::size_t kMaxLabels = 4;
inline constexpr std::size_t kMaxWords = 5;
inline constexpr std::size_t kMaxLength = 7;

// Dense PMC over N labels and M words with an observation sequence.
struct TinyInstance {
  std::size_t num_labels = 0;
  std::size_t num_words = 0;
  std::vector<double> initial;     // [i][k]
  std::vector<double> transition;  // [i][k][j]
  std::vector<double> emission;    // [i][j][k][l]
  std::vector<WordId> observations;

  double init(std::size_t i, std::size_t k) const { return initial[i * num_words + k]; }
  double trans(std::size_t i, std::size_t k, std::size_t j) const {
    return transition[(i * num_words + k) * num_labels + j];
  }
  double emit(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return emission[((i * num_labels + j) * num_words + k) * num_words + l];
  }
};

// Random normalized instance with N in [1, max_labels], M in [1, max_words],
// T in [1, max_length]. `zero_fraction` of the raw weights are zeroed before
// normalization (keeping at least one positive entry per distribution).
TinyInstance random_instance(std::mt19937_64& rng, std::size_t max_labels = kMaxLabels,
                             std::size_t max_words = kMaxWords, std::size_t max_length = kMaxLength,
                             double zero_fraction = 0.0);

PmcParams to_pmc_params(const TinyInstance& instance);

// Factors of the instance read straight from the dense tables.
FactorProvider instance_factors(const TinyInstance& instance);

// Joint probability of (x_{1:T}, y_{1:T}) as the product of the PMC factors.
double joint_probability(const TinyInstance& instance, const std::vector<LabelId>& labels);

// p(x_t = i | y_{1:T}) by summing the joint over all N^T label sequences.
// Throws DeadEndError when the total is zero.
PosteriorMatrix enumerate_posteriors(const TinyInstance& instance);

// Exhaustive argmax; among equal scores the lexicographically smallest
// sequence wins (sequences are visited in lexicographic order).
ScoredPath enumerate_map(const TinyInstance& instance);

// Same two routines over arbitrary factors (T <= kMaxLength, N <= kMaxLabels).
PosteriorMatrix enumerate_posteriors(const FactorProvider& factors);
ScoredPath enumerate_map(const FactorProvider& factors);

// HMC as a PMC: pi(i,k) = pi(i) b_i(k), a_{i,k}(j) = a_i(j),
// b_{i,j,k}(l) = b_j(l), for k in [0, num_words). Zero-support keys are left
// absent.
PmcParams embed_hmc_as_pmc(const HmcParams& hmc, std::size_t num_words);
PmcParams embed_hmc_as_pmc(const HmcParams& hmc);

HmcParams random_hmc(std::mt19937_64& rng, std::size_t num_labels, std::size_t num_words);

// Textbook scaled HMC forward pass: alpha_1(i) = pi(i) b_i(o_1),
// alpha_{t+1}(j) = b_j(o_{t+1}) sum_i alpha_t(i) a_i(j), rows normalized.
LabelMatrix classic_hmc_forward(const HmcParams& hmc, const std::vector<WordId>& words);

// Forward-backward with no per-step normalization; only safe for short
// chains.
PosteriorMatrix unscaled_posteriors(const FactorProvider& factors);

// Maximum likelihood estimates by direct scanning of a labeled corpus, keyed
// by strings so that no id interning is shared with the trainer.
struct BruteForceEstimates {
  std::map<std::string, double> hmc_initial;                                  // i
  std::map<std::tuple<std::string, std::string>, double> hmc_transition;      // (i, j)
  std::map<std::tuple<std::string, std::string>, double> hmc_emission;        // (i, word)
  std::map<std::tuple<std::string, std::string>, double> pmc_initial;         // (i, k)
  std::map<std::tuple<std::string, std::string, std::string>, double> pmc_transition;  // (i, k, j)
  std::map<std::tuple<std::string, std::string, std::string, std::string>, double> pmc_emission;  // (i, k, j, l)
  // (m, label, bits, suffix)
  std::map<std::tuple<std::size_t, std::string, int, std::string>, double> features;
};

BruteForceEstimates brute_force_estimates(const LabeledCorpus& corpus, std::size_t suffix_max_len);

}  // namespace pmctag::oracle
