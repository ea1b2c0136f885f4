#include "pmctag/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "pmctag/error.hpp"

namespace pmctag {

std::string_view to_string(DecodeMode mode) { return mode == DecodeMode::kHmc ? "hmc" : "pmc"; }
std::string_view to_string(Decoder decoder) { return decoder == Decoder::kMpm ? "mpm" : "map"; }
std::string_view to_string(DowngradeTrigger trigger) {
  return trigger == DowngradeTrigger::kBigramSupport ? "bigram-support" : "zero-factor";
}
std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kPmc: return "pmc";
    case Regime::kHmc: return "hmc";
    case Regime::kHmcFeatures: return "hmc-features";
    case Regime::kTransitionOnly: return "transition-only";
  }
  return "pmc";
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void dead_end(std::size_t t, const char* where) {
  throw DeadEndError(t, std::string(where) + ": all labels have zero mass at position " + std::to_string(t));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

double ForwardResult::log_likelihood() const {
  double ll = 0.0;
  for (double c : scale) ll += std::log(c);
  return ll;
}

ForwardResult forward(const FactorProvider& f) {
  const std::size_t n = f.num_labels;
  ForwardResult out{LabelMatrix(f.length, n), std::vector<double>(f.length, 0.0)};
  if (f.length == 0) return out;

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += out.alpha.at(0, i) = f.initial[i];
  if (!(sum > 0.0)) dead_end(0, "forward");
  out.scale[0] = sum;
  for (std::size_t i = 0; i < n; ++i) out.alpha.at(0, i) /= sum;

  for (std::size_t t = 0; t + 1 < f.length; ++t) {
    const auto factor = f.step(t);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = out.alpha.at(t, i);
      if (a == 0.0) continue;
      const double* row = factor.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) out.alpha.at(t + 1, j) += a * row[j];
    }
    sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += out.alpha.at(t + 1, j);
    if (!(sum > 0.0)) dead_end(t + 1, "forward");
    out.scale[t + 1] = sum;
    for (std::size_t j = 0; j < n; ++j) out.alpha.at(t + 1, j) /= sum;
  }
  return out;
}

BackwardResult backward(const FactorProvider& f) {
  const std::size_t n = f.num_labels;
  BackwardResult out{LabelMatrix(f.length, n), std::vector<double>(f.length, 0.0)};
  if (f.length == 0) return out;

  const std::size_t last = f.length - 1;
  for (std::size_t i = 0; i < n; ++i) out.beta.at(last, i) = 1.0 / static_cast<double>(n);
  out.scale[last] = static_cast<double>(n);

  for (std::size_t t = last; t-- > 0;) {
    const auto factor = f.step(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = factor.data() + i * n;
      double b = 0.0;
      for (std::size_t j = 0; j < n; ++j) b += row[j] * out.beta.at(t + 1, j);
      out.beta.at(t, i) = b;
      sum += b;
    }
    if (!(sum > 0.0)) dead_end(t, "backward");
    out.scale[t] = sum;
    for (std::size_t i = 0; i < n; ++i) out.beta.at(t, i) /= sum;
  }
  return out;
}

PosteriorMatrix posterior_marginals(const FactorProvider& f) {
  const auto fwd = forward(f);
  const auto bwd = backward(f);
  const std::size_t n = f.num_labels;
  PosteriorMatrix post(f.length, n);
  for (std::size_t t = 0; t < f.length; ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += post.at(t, i) = fwd.alpha.at(t, i) * bwd.beta.at(t, i);
    if (!(sum > 0.0)) dead_end(t, "posterior_marginals");
    for (std::size_t i = 0; i < n; ++i) post.at(t, i) /= sum;
  }
  return post;
}

std::vector<LabelId> mpm_path(const PosteriorMatrix& post) {
  std::vector<LabelId> path(post.length, 0);
  for (std::size_t t = 0; t < post.length; ++t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < post.num_labels; ++i) {
      if (post.at(t, i) > post.at(t, best)) best = i;
    }
    path[t] = static_cast<LabelId>(best);
  }
  return path;
}

// Runs right to left: psi_t(i) is the best log score of x_{t+1..T} given
// x_t = i, and next_t(i) the smallest x_{t+1} attaining it. Reading the path
// left to right with smallest-id choices yields the lexicographically smallest
// optimal sequence.
ScoredPath viterbi(const FactorProvider& f) {
  const std::size_t n = f.num_labels;
  ScoredPath out;
  if (f.length == 0) return out;

  std::vector<double> psi(n, 0.0);
  std::vector<double> prev(n);
  std::vector<LabelId> next(f.length > 1 ? (f.length - 1) * n : 0, 0);
  for (std::size_t t = f.length - 1; t-- > 0;) {
    prev.swap(psi);
    const auto factor = f.step(t);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = factor.data() + i * n;
      double best = kNegInf;
      LabelId arg = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (row[j] <= 0.0 || prev[j] == kNegInf) continue;
        const double score = std::log(row[j]) + prev[j];
        if (score > best) {
          best = score;
          arg = static_cast<LabelId>(j);
        }
      }
      psi[i] = best;
      next[t * n + i] = arg;
    }
  }

  double best = kNegInf;
  LabelId arg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (psi[i] == kNegInf) continue;
    const double score = safe_log(f.initial[i]) + psi[i];
    if (score > best) {
      best = score;
      arg = static_cast<LabelId>(i);
    }
  }
  if (best == kNegInf) dead_end(0, "viterbi");

  out.log_score = best;
  out.labels.resize(f.length);
  out.labels[0] = arg;
  for (std::size_t t = 0; t + 1 < f.length; ++t) out.labels[t + 1] = next[t * n + out.labels[t]];
  return out;
}

FactorProvider hmc_factors(const HmcParams& hmc, std::span<const WordId> words) {
  const std::size_t n = hmc.num_labels;
  FactorProvider f(n, words.size());
  f.initial_regime = Regime::kHmc;
  std::fill(f.regimes.begin(), f.regimes.end(), Regime::kHmc);
  if (words.empty()) return f;
  for (std::size_t i = 0; i < n; ++i) {
    f.initial[i] = hmc.initial[i] * hmc.emit(static_cast<LabelId>(i), words[0]);
  }
  std::vector<double> emit(n);
  for (std::size_t t = 0; t + 1 < words.size(); ++t) {
    for (std::size_t j = 0; j < n; ++j) emit[j] = hmc.emit(static_cast<LabelId>(j), words[t + 1]);
    auto block = f.step(t);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) block[i * n + j] = hmc.trans(i, j) * emit[j];
    }
  }
  return f;
}

FactorProvider pmc_factors(const PmcParams& pmc, std::span<const WordId> words) {
  const std::size_t n = pmc.num_labels;
  FactorProvider f(n, words.size());
  if (words.empty()) return f;
  for (std::size_t i = 0; i < n; ++i) f.initial[i] = pmc.init(static_cast<LabelId>(i), words[0]);
  for (std::size_t t = 0; t + 1 < words.size(); ++t) {
    auto block = f.step(t);
    const WordId k = words[t];
    const WordId l = words[t + 1];
    for (std::size_t i = 0; i < n; ++i) {
      const auto li = static_cast<LabelId>(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double a = pmc.trans(li, k, static_cast<LabelId>(j));
        if (a == 0.0) continue;
        block[i * n + j] = a * pmc.emit(li, k, static_cast<LabelId>(j), l);
      }
    }
  }
  return f;
}

Tagger::Tagger(const ModelBundle& model) : model_(model), emission_by_word_(model.vocabulary.size()) {
  for (const auto& [key, p] : model.hmc.emission) {
    if (p > 0.0) emission_by_word_[key.word].emplace_back(key.label, p);
  }
  for (auto& column : emission_by_word_) std::sort(column.begin(), column.end());
}

std::vector<double> Tagger::emission_column(const std::string& word, std::size_t position) const {
  if (auto id = model_.vocabulary.find(word); id && !emission_by_word_[*id].empty()) {
    std::vector<double> column(model_.num_labels(), 0.0);
    for (const auto& [label, p] : emission_by_word_[*id]) column[label] = p;
    return column;
  }
  return feature_emission_column(model_.features, word, position);
}

bool Tagger::pmc_step(WordId k, WordId l, std::span<double> out) const {
  const std::size_t n = model_.num_labels();
  const auto& pmc = model_.pmc;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = static_cast<LabelId>(i);
    auto row = pmc.transition.find({li, k});
    if (row == pmc.transition.end()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = row->second[j];
      if (a == 0.0) continue;
      auto dist = pmc.emission.find({li, k, static_cast<LabelId>(j)});
      if (dist == pmc.emission.end()) continue;
      const double v = a * probability_of(dist->second, l);
      out[i * n + j] = v;
      any = any || v > 0.0;
    }
  }
  return any;
}

void Tagger::hmc_step(std::span<const double> emit_next, std::span<double> out) const {
  const std::size_t n = model_.num_labels();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = model_.hmc.trans(i, j) * emit_next[j];
  }
}

FactorProvider Tagger::resolve_factors(std::span<const std::string> words, const ResolveOptions& options) const {
  if (words.empty()) throw Error(ErrorCode::kEmptySentence, "resolve_factors: empty sentence");
  const std::size_t n = model_.num_labels();
  const std::size_t len = words.size();
  FactorProvider f(n, len);

  std::vector<std::optional<WordId>> ids(len);
  for (std::size_t t = 0; t < len; ++t) ids[t] = model_.vocabulary.find(words[t]);

  std::vector<std::vector<double>> emit(len);
  auto emission = [&](std::size_t t) -> const std::vector<double>& {
    if (emit[t].empty()) emit[t] = emission_column(words[t], t);
    return emit[t];
  };

  const bool pmc_mode = options.mode == DecodeMode::kPmc;
  bool pmc_initial = false;
  if (pmc_mode && ids[0]) {
    for (std::size_t i = 0; i < n; ++i) {
      f.initial[i] = model_.pmc.init(static_cast<LabelId>(i), *ids[0]);
      pmc_initial = pmc_initial || f.initial[i] > 0.0;
    }
  }
  if (pmc_initial) {
    f.initial_regime = Regime::kPmc;
  } else {
    const auto& e = emission(0);
    for (std::size_t i = 0; i < n; ++i) f.initial[i] = model_.hmc.initial[i] * e[i];
    f.initial_regime = Regime::kHmc;
  }

  for (std::size_t t = 0; t + 1 < len; ++t) {
    auto block = f.step(t);
    bool use_pmc = false;
    if (pmc_mode && ids[t] && ids[t + 1]) {
      if (options.trigger == DowngradeTrigger::kBigramSupport) {
        if (model_.counts.word_bigram.contains({*ids[t], *ids[t + 1]})) {
          use_pmc = pmc_step(*ids[t], *ids[t + 1], block);
        }
      } else {
        use_pmc = pmc_step(*ids[t], *ids[t + 1], block);
      }
    }
    if (use_pmc) {
      f.regimes[t] = Regime::kPmc;
    } else {
      std::fill(block.begin(), block.end(), 0.0);
      hmc_step(emission(t + 1), block);
      f.regimes[t] = Regime::kHmc;
    }
  }

  if (options.rescue_dead_ends) rescue(f, words);
  return f;
}

// Forward reachability pass. A position whose factor leaves no label reachable
// from the previous support is re-scored with progressively weaker factors.
void Tagger::rescue(FactorProvider& f, std::span<const std::string> words) const {
  const std::size_t n = f.num_labels;
  const auto& hmc = model_.hmc;

  std::vector<bool> alive(n, false);
  auto any_alive = [&] { return std::find(alive.begin(), alive.end(), true) != alive.end(); };

  for (std::size_t i = 0; i < n; ++i) alive[i] = f.initial[i] > 0.0;
  if (!any_alive()) {
    const auto e = feature_emission_column(model_.features, words[0], 0);
    for (std::size_t i = 0; i < n; ++i) alive[i] = (f.initial[i] = hmc.initial[i] * e[i]) > 0.0;
    f.initial_regime = Regime::kHmcFeatures;
    if (!any_alive()) {
      for (std::size_t i = 0; i < n; ++i) alive[i] = (f.initial[i] = hmc.initial[i]) > 0.0;
      f.initial_regime = Regime::kTransitionOnly;
    }
  }

  std::vector<bool> next(n);
  auto propagate = [&](std::span<const double> block) {
    std::fill(next.begin(), next.end(), false);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (block[i * n + j] > 0.0) {
          next[j] = true;
          any = true;
        }
      }
    }
    return any;
  };

  std::vector<double> ones(n, 1.0);
  for (std::size_t t = 0; t + 1 < f.length; ++t) {
    auto block = f.step(t);
    if (!propagate(block) && f.regimes[t] == Regime::kPmc) {
      hmc_step(emission_column(words[t + 1], t + 1), block);
      f.regimes[t] = Regime::kHmc;
    }
    if (!propagate(block)) {
      hmc_step(feature_emission_column(model_.features, words[t + 1], t + 1), block);
      f.regimes[t] = Regime::kHmcFeatures;
    }
    if (!propagate(block)) {
      hmc_step(ones, block);
      f.regimes[t] = Regime::kTransitionOnly;
    }
    // A step that is still dead is left for forward() to report.
    alive.swap(next);
  }
}

DecodeResult Tagger::decode(std::span<const std::string> words, const ResolveOptions& options,
                            Decoder decoder) const {
  const FactorProvider f = resolve_factors(words, options);
  DecodeResult out;
  out.labels = decoder == Decoder::kMpm ? mpm_path(posterior_marginals(f)) : viterbi(f).labels;
  out.steps = f.regimes.size();
  for (Regime r : f.regimes) {
    if (options.mode == DecodeMode::kPmc && r != Regime::kPmc) ++out.downgraded;
    if (r == Regime::kHmcFeatures || r == Regime::kTransitionOnly) ++out.rescued;
  }
  if (f.initial_regime == Regime::kHmcFeatures || f.initial_regime == Regime::kTransitionOnly) ++out.rescued;
  return out;
}

std::vector<std::string> words_of(const Sentence& sentence) {
  std::vector<std::string> words;
  words.reserve(sentence.size());
  for (const auto& token : sentence) words.push_back(token.word);
  return words;
}

FactorProvider resolve_factors(const ModelBundle& model, std::span<const std::string> words,
                               const ResolveOptions& options) {
  return Tagger(model).resolve_factors(words, options);
}

std::vector<LabelId> decode_mpm(const ModelBundle& model, std::span<const std::string> words,
                                const ResolveOptions& options) {
  return Tagger(model).decode(words, options, Decoder::kMpm).labels;
}

std::vector<LabelId> decode_map(const ModelBundle& model, std::span<const std::string> words,
                                const ResolveOptions& options) {
  return Tagger(model).decode(words, options, Decoder::kMap).labels;
}

}  // namespace pmctag
