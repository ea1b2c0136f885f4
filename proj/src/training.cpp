#include "pmctag/training.hpp"

#include <algorithm>
#include <string>

#include "pmctag/error.hpp"

namespace pmctag {

namespace {

void require_nonempty(const LabeledCorpus& corpus, const char* what) {
  if (corpus.sentences.empty()) throw Error(ErrorCode::kEmptyCorpus, std::string(what) + ": empty corpus");
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    if (corpus.sentences[s].empty()) {
      throw Error(ErrorCode::kEmptySentence, std::string(what) + ": sentence " + std::to_string(s) + " is empty");
    }
  }
}

LabelId intern_label(LabelAlphabet& alphabet, const std::string& label) {
  const auto id = alphabet.intern(label);
  if (alphabet.size() > kMaxLabels) throw Error(ErrorCode::kShape, "label alphabet exceeds 65536 entries");
  return id;
}

double ratio(Count num, Count den) { return static_cast<double>(num) / static_cast<double>(den); }

}  // namespace

CountTables accumulate_counts(const LabeledCorpus& corpus, LabelAlphabet& alphabet,
                              Vocabulary& vocabulary) {
  require_nonempty(corpus, "accumulate_counts");
  CountTables counts;
  std::vector<LabelId> labels;
  std::vector<WordId> words;
  for (const auto& sentence : corpus.sentences) {
    labels.clear();
    words.clear();
    for (const auto& token : sentence) {
      if (token.word.empty()) throw Error(ErrorCode::kEmptyToken, "accumulate_counts: empty token");
      labels.push_back(intern_label(alphabet, token.label));
      words.push_back(vocabulary.intern(token.word));
    }
    ++counts.chains;
    ++counts.initial[{labels[0], words[0]}];
    for (std::size_t t = 0; t + 1 < sentence.size(); ++t) {
      ++counts.patterns[{labels[t], words[t], labels[t + 1], words[t + 1]}];
    }
  }
  counts.rebuild_marginals(alphabet.size());
  return counts;
}

HmcParams fit_hmc(const CountTables& counts) {
  const std::size_t n = counts.num_labels;
  HmcParams hmc;
  hmc.num_labels = n;
  hmc.initial.assign(n, 0.0);
  hmc.transition.assign(n * n, 0.0);
  hmc.row_supported.assign(n, false);
  if (counts.chains > 0) {
    for (std::size_t i = 0; i < n; ++i) hmc.initial[i] = ratio(counts.initial_label[i], counts.chains);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Count total = counts.label_total[i];
    if (total == 0) continue;
    hmc.row_supported[i] = true;
    for (std::size_t j = 0; j < n; ++j) hmc.transition[i * n + j] = ratio(counts.label_bigram[i * n + j], total);
  }
  for (const auto& [key, c] : counts.label_word) {
    hmc.emission.emplace(key, ratio(c, counts.label_total[key.label]));
  }
  return hmc;
}

PmcParams fit_pmc(const CountTables& counts) {
  const std::size_t n = counts.num_labels;
  PmcParams pmc;
  pmc.num_labels = n;
  for (const auto& [key, c] : counts.initial) pmc.initial.emplace(key, ratio(c, counts.chains));

  for (const auto& [key, c] : counts.label_word_label) {
    const Count m = counts.label_word.at({key.label, key.word});
    auto& row = pmc.transition[{key.label, key.word}];
    row.resize(n, 0.0);
    row[key.next_label] = ratio(c, m);
  }
  for (const auto& [key, c] : counts.patterns) {
    const Count denom = counts.label_word_label.at(key.prefix());
    pmc.emission[key.prefix()].emplace_back(key.next_word, ratio(c, denom));
  }
  for (auto& [key, dist] : pmc.emission) std::sort(dist.begin(), dist.end());
  return pmc;
}

void refit(ModelBundle& model) {
  model.hmc = fit_hmc(model.counts);
  model.pmc = fit_pmc(model.counts);
  model.feature_counts.resize_labels(model.alphabet.size());
  model.features = fit_feature_tables(model.feature_counts);
}

ModelBundle train(const LabeledCorpus& corpus, const TrainConfig& config) {
  ModelBundle model;
  model.task = config.task;
  model.counts = accumulate_counts(corpus, model.alphabet, model.vocabulary);
  model.feature_counts = count_features(corpus, model.alphabet, config.suffix_max_len);
  refit(model);
  return model;
}

ModelBundle update_online(const ModelBundle& model, const LabeledCorpus& delta) {
  if (delta.sentences.empty()) throw Error(ErrorCode::kEmptyCorpus, "update_online: empty delta corpus");
  ModelBundle out = model;
  const CountTables added = accumulate_counts(delta, out.alphabet, out.vocabulary);
  out.counts.merge(added);
  out.feature_counts.merge(count_features(delta, out.alphabet, model.feature_counts.max_suffix));
  refit(out);
  return out;
}

HmcModel train_hmc_only(const LabeledCorpus& corpus, const TrainConfig& config) {
  require_nonempty(corpus, "train_hmc_only");
  HmcModel model;
  // Dense label tables; emissions keyed sparsely.
  std::vector<Count> first;
  std::vector<Count> bigram;
  std::vector<Count> total;
  HashMap<LabelWord, Count> emit;
  std::vector<LabelId> labels;
  std::size_t capacity = 0;
  auto grow = [&](std::size_t n) {
    if (n <= capacity) return;
    std::size_t next = std::max<std::size_t>(n, capacity * 2);
    std::vector<Count> resized(next * next, 0);
    for (std::size_t i = 0; i < capacity; ++i)
      for (std::size_t j = 0; j < capacity; ++j) resized[i * next + j] = bigram[i * capacity + j];
    bigram = std::move(resized);
    first.resize(next, 0);
    total.resize(next, 0);
    capacity = next;
  };
  for (const auto& sentence : corpus.sentences) {
    labels.clear();
    for (const auto& token : sentence) labels.push_back(intern_label(model.alphabet, token.label));
    grow(model.alphabet.size());
    ++first[labels[0]];
    for (std::size_t t = 0; t + 1 < sentence.size(); ++t) {
      ++bigram[labels[t] * capacity + labels[t + 1]];
      ++total[labels[t]];
      ++emit[{labels[t], model.vocabulary.intern(sentence[t].word)}];
    }
    model.vocabulary.intern(sentence.back().word);
  }

  const std::size_t n = model.alphabet.size();
  const auto chains = static_cast<Count>(corpus.sentences.size());
  HmcParams& hmc = model.hmc;
  hmc.num_labels = n;
  hmc.initial.assign(n, 0.0);
  hmc.transition.assign(n * n, 0.0);
  hmc.row_supported.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    hmc.initial[i] = ratio(first[i], chains);
    if (total[i] == 0) continue;
    hmc.row_supported[i] = true;
    for (std::size_t j = 0; j < n; ++j) hmc.transition[i * n + j] = ratio(bigram[i * capacity + j], total[i]);
  }
  for (const auto& [key, c] : emit) hmc.emission.emplace(key, ratio(c, total[key.label]));
  model.features = fit_feature_tables(count_features(corpus, model.alphabet, config.suffix_max_len));
  return model;
}

}  // namespace pmctag
