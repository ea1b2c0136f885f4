#include "pmctag/counts.hpp"

#include <algorithm>

namespace pmctag {

void CountTables::merge(const CountTables& other) {
  chains += other.chains;
  for (const auto& [key, c] : other.initial) initial[key] += c;
  for (const auto& [key, c] : other.patterns) patterns[key] += c;
  rebuild_marginals(std::max(num_labels, other.num_labels));
}

void CountTables::rebuild_marginals(std::size_t labels) {
  num_labels = labels;
  initial_label.assign(labels, 0);
  label_bigram.assign(labels * labels, 0);
  label_total.assign(labels, 0);
  label_word_label.clear();
  label_word.clear();
  word_bigram.clear();

  for (const auto& [key, c] : initial) initial_label[key.label] += c;
  for (const auto& [key, c] : patterns) {
    label_word_label[key.prefix()] += c;
    label_bigram[key.label * labels + key.next_label] += c;
    label_word[{key.label, key.word}] += c;
    label_total[key.label] += c;
    word_bigram[{key.word, key.next_word}] += c;
  }
}

}  // namespace pmctag
