#include "pmctag/synthetic.hpp"

#include <string>
#include <vector>

namespace pmctag::synthetic {

namespace {

std::string make_word(std::size_t label, std::size_t index) {
  static const char* const kStems[] = {"an", "bel", "cor", "dun", "el", "fa", "gri", "hol", "is", "jun"};
  static const char* const kEnds[] = {"ing", "ed", "s", "ly", "er", "ion", "", "est"};
  std::string w = kStems[index % 10];
  w += std::to_string(label);
  w += kStems[(index / 10) % 10];
  w += kEnds[(index + label) % 8];
  if (index % 7 == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
  if (index % 11 == 3) w += "-x";
  if (index % 13 == 5) w += "9";
  // Index keeps words distinct even when the decorations collide.
  w += std::string(1 + index / 100, 'q');
  return w;
}

}  // namespace

LabeledCorpus random_corpus(std::uint64_t seed, const CorpusShape& shape) {
  std::mt19937_64 rng(seed);
  const std::size_t n = shape.labels;
  const std::size_t v = shape.words_per_label;

  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<std::discrete_distribution<std::size_t>> trans;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(n);
    for (auto& x : w) x = unit(rng);
    trans.emplace_back(w.begin(), w.end());
  }
  std::vector<double> zipf(v);
  for (std::size_t r = 0; r < v; ++r) zipf[r] = 1.0 / static_cast<double>(r + 1);
  std::discrete_distribution<std::size_t> word_rank(zipf.begin(), zipf.end());
  std::bernoulli_distribution follow(shape.pair_dependence);
  std::uniform_int_distribution<std::size_t> length(shape.min_length, shape.max_length);
  std::uniform_int_distribution<std::size_t> label_pick(0, n - 1);

  LabeledCorpus corpus;
  corpus.sentences.reserve(shape.sentences);
  for (std::size_t s = 0; s < shape.sentences; ++s) {
    const std::size_t len = length(rng);
    Sentence sentence;
    std::size_t label = label_pick(rng);
    std::size_t word = word_rank(rng);
    for (std::size_t t = 0; t < len; ++t) {
      if (t > 0) {
        const std::size_t next = trans[label](rng);
        // Deterministic successor of the previous pair, or a fresh Zipf draw.
        word = follow(rng) ? (word * 7 + label * 3 + next) % v : word_rank(rng);
        label = next;
      }
      sentence.push_back({make_word(label, word), "L" + std::to_string(label)});
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

}  // namespace pmctag::synthetic
