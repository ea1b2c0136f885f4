#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pmctag/corpus.hpp"
#include "pmctag/model.hpp"

namespace pmctag {

enum class DecodeMode { kHmc, kPmc };
enum class Decoder { kMpm, kMap };

// Which factor a transition step (or the initial position) was scored with.
enum class Regime : std::uint8_t {
  kPmc,             // a_{i,k}(j) b_{i,j,k}(l)
  kHmc,             // a_i(j) b_j(l), b falling back to feature tables for unseen words
  kHmcFeatures,     // dead-end rescue: a_i(j) times the feature-table emission
  kTransitionOnly,  // dead-end rescue: a_i(j) alone
};

// When a PMC step is replaced by its HMC counterpart.
enum class DowngradeTrigger {
  kBigramSupport,  // observed word bigram never seen in training, or either word unknown
  kZeroFactor,     // PMC factor is zero for every (i, j)
};

std::string_view to_string(DecodeMode mode);
std::string_view to_string(Decoder decoder);
std::string_view to_string(Regime regime);
std::string_view to_string(DowngradeTrigger trigger);

struct ResolveOptions {
  DecodeMode mode = DecodeMode::kPmc;
  DowngradeTrigger trigger = DowngradeTrigger::kBigramSupport;
  // Walk down the kHmc -> kHmcFeatures -> kTransitionOnly ladder at any step
  // whose factor would leave no reachable label. Off: such steps raise
  // DeadEndError during inference.
  bool rescue_dead_ends = true;
};

// Per-sentence factors of the chain: an initial factor over x_1 and, for each
// step t -> t+1, a dense N x N factor over (x_t, x_{t+1}).
struct FactorProvider {
  std::size_t num_labels = 0;
  std::size_t length = 0;
  std::vector<double> initial;
  std::vector<double> steps;  // (length - 1) blocks of N * N, row index x_t
  Regime initial_regime = Regime::kPmc;
  std::vector<Regime> regimes;

  FactorProvider() = default;
  FactorProvider(std::size_t labels, std::size_t len)
      : num_labels(labels),
        length(len),
        initial(labels, 0.0),
        steps(len > 0 ? (len - 1) * labels * labels : 0, 0.0),
        regimes(len > 0 ? len - 1 : 0, Regime::kPmc) {}

  std::span<double> step(std::size_t t) {
    return {steps.data() + t * num_labels * num_labels, num_labels * num_labels};
  }
  std::span<const double> step(std::size_t t) const {
    return {steps.data() + t * num_labels * num_labels, num_labels * num_labels};
  }
  double at(std::size_t t, std::size_t i, std::size_t j) const {
    return steps[(t * num_labels + i) * num_labels + j];
  }
};

// T x N row-major matrix.
struct LabelMatrix {
  std::size_t length = 0;
  std::size_t num_labels = 0;
  std::vector<double> values;

  LabelMatrix() = default;
  LabelMatrix(std::size_t len, std::size_t labels) : length(len), num_labels(labels), values(len * labels, 0.0) {}

  double& at(std::size_t t, std::size_t i) { return values[t * num_labels + i]; }
  double at(std::size_t t, std::size_t i) const { return values[t * num_labels + i]; }
  std::span<const double> row(std::size_t t) const { return {values.data() + t * num_labels, num_labels}; }
};

using PosteriorMatrix = LabelMatrix;

struct ForwardResult {
  LabelMatrix alpha;          // rows sum to 1
  std::vector<double> scale;  // sum of each row before normalization

  // log p(y_{1:T}) under the factors: sum of log scale.
  double log_likelihood() const;
};

struct BackwardResult {
  LabelMatrix beta;  // rows sum to 1; the last row is uniform
  std::vector<double> scale;
};

// Throw DeadEndError when a row loses all mass.
ForwardResult forward(const FactorProvider& factors);
BackwardResult backward(const FactorProvider& factors);
PosteriorMatrix posterior_marginals(const FactorProvider& factors);

// Position-wise argmax; ties go to the lowest label id.
std::vector<LabelId> mpm_path(const PosteriorMatrix& posteriors);

struct ScoredPath {
  std::vector<LabelId> labels;
  double log_score = 0.0;  // log of the product of the factors along the path
};

// Max-product in log space. Among equal-score paths the lexicographically
// smallest id sequence wins.
ScoredPath viterbi(const FactorProvider& factors);

// Factors straight from parameter tables, with no downgrade. Every word id
// must be in range of the tables.
FactorProvider hmc_factors(const HmcParams& hmc, std::span<const WordId> words);
FactorProvider pmc_factors(const PmcParams& pmc, std::span<const WordId> words);

struct DecodeResult {
  std::vector<LabelId> labels;
  std::size_t steps = 0;       // transitions in the sentence
  std::size_t downgraded = 0;  // steps not scored by the PMC factor (pmc mode only)
  std::size_t rescued = 0;     // steps or initial positions that needed the dead-end ladder
};

// Decoding front end over an immutable model. Holds per-word lookup tables
// built once at construction; const member functions are safe to call from
// several threads.
class Tagger {
 public:
  explicit Tagger(const ModelBundle& model);

  const ModelBundle& model() const { return model_; }

  FactorProvider resolve_factors(std::span<const std::string> words, const ResolveOptions& options) const;

  DecodeResult decode(std::span<const std::string> words, const ResolveOptions& options, Decoder decoder) const;

  // Emission column for the token at `position`: b_j(k) for a word with
  // emission support, otherwise the feature back-off value.
  std::vector<double> emission_column(const std::string& word, std::size_t position) const;

 private:
  bool pmc_step(WordId k, WordId l, std::span<double> out) const;
  void hmc_step(std::span<const double> emit_next, std::span<double> out) const;
  void rescue(FactorProvider& factors, std::span<const std::string> words) const;

  const ModelBundle& model_;
  std::vector<std::vector<std::pair<LabelId, double>>> emission_by_word_;
};

std::vector<std::string> words_of(const Sentence& sentence);

// Convenience wrappers building a temporary Tagger. Throw kEmptySentence.
FactorProvider resolve_factors(const ModelBundle& model, std::span<const std::string> words,
                               const ResolveOptions& options = {});
std::vector<LabelId> decode_mpm(const ModelBundle& model, std::span<const std::string> words,
                                const ResolveOptions& options = {});
std::vector<LabelId> decode_map(const ModelBundle& model, std::span<const std::string> words,
                                const ResolveOptions& options = {});

}  // namespace pmctag
