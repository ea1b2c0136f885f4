#include "pmctag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmctag/error.hpp"
#include "pmctag/features.hpp"

namespace pmctag::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Fills `out` with a random distribution; some entries zeroed on request.
void random_distribution(std::mt19937_64& rng, std::span<double> out, double zero_fraction) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::bernoulli_distribution drop(zero_fraction);
  double sum = 0.0;
  for (auto& p : out) sum += p = drop(rng) ? 0.0 : weight(rng);
  if (sum == 0.0) {
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    sum = out[pick(rng)] = weight(rng);
  }
  for (auto& p : out) p /= sum;
}

// Visits every label sequence of length T over N labels in lexicographic
// order.
template <typename Fn>
void for_each_sequence(std::size_t labels, std::size_t length, Fn&& fn) {
  std::vector<LabelId> seq(length, 0);
  while (true) {
    fn(seq);
    std::size_t pos = length;
    while (pos > 0) {
      --pos;
      if (++seq[pos] < labels) break;
      seq[pos] = 0;
      if (pos == 0) return;
    }
    if (length == 0) return;
  }
}

void check_tiny(const FactorProvider& f) {
  double sequences = 1.0;
  for (std::size_t t = 0; t < f.length; ++t) sequences *= static_cast<double>(f.num_labels);
  if (f.length == 0 || sequences > double(1 << 20)) {
    throw Error(ErrorCode::kShape, "oracle: instance too large to enumerate");
  }
}

double factor_product(const FactorProvider& f, const std::vector<LabelId>& seq) {
  double p = f.initial[seq[0]];
  for (std::size_t t = 0; t + 1 < f.length && p > 0.0; ++t) p *= f.at(t, seq[t], seq[t + 1]);
  return p;
}

double factor_log_score(const FactorProvider& f, const std::vector<LabelId>& seq) {
  double s = f.initial[seq[0]] > 0.0 ? std::log(f.initial[seq[0]]) : kNegInf;
  for (std::size_t t = 0; t + 1 < f.length && s != kNegInf; ++t) {
    const double v = f.at(t, seq[t], seq[t + 1]);
    s = v > 0.0 ? s + std::log(v) : kNegInf;
  }
  return s;
}

}  // namespace

TinyInstance random_instance(std::mt19937_64& rng, std::size_t max_labels, std::size_t max_words,
                             std::size_t max_length, double zero_fraction) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_labels);
  std::uniform_int_distribution<std::size_t> m_dist(1, max_words);
  std::uniform_int_distribution<std::size_t> t_dist(1, max_length);
  TinyInstance inst;
  const std::size_t n = inst.num_labels = n_dist(rng);
  const std::size_t m = inst.num_words = m_dist(rng);
  inst.initial.resize(n * m);
  inst.transition.resize(n * m * n);
  inst.emission.resize(n * n * m * m);
  random_distribution(rng, inst.initial, zero_fraction);
  for (std::size_t ik = 0; ik < n * m; ++ik) {
    random_distribution(rng, std::span(inst.transition).subspan(ik * n, n), zero_fraction);
  }
  for (std::size_t ijk = 0; ijk < n * n * m; ++ijk) {
    random_distribution(rng, std::span(inst.emission).subspan(ijk * m, m), zero_fraction);
  }
  const std::size_t len = t_dist(rng);
  // Draw the observations from the instance itself so that they have mass.
  auto sample = [&](std::span<const double> dist) {
    std::discrete_distribution<std::size_t> d(dist.begin(), dist.end());
    return d(rng);
  };
  const std::size_t z0 = sample(inst.initial);
  std::size_t x = z0 / m;
  std::size_t y = z0 % m;
  inst.observations.push_back(static_cast<WordId>(y));
  for (std::size_t t = 1; t < len; ++t) {
    const std::size_t next_x = sample(std::span<const double>(inst.transition).subspan((x * m + y) * n, n));
    const std::size_t next_y =
        sample(std::span<const double>(inst.emission).subspan(((x * n + next_x) * m + y) * m, m));
    x = next_x;
    y = next_y;
    inst.observations.push_back(static_cast<WordId>(y));
  }
  return inst;
}

PmcParams to_pmc_params(const TinyInstance& inst) {
  const std::size_t n = inst.num_labels;
  const std::size_t m = inst.num_words;
  PmcParams pmc;
  pmc.num_labels = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto li = static_cast<LabelId>(i);
      const auto wk = static_cast<WordId>(k);
      if (inst.init(i, k) > 0.0) pmc.initial[{li, wk}] = inst.init(i, k);
      std::vector<double> row(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = inst.trans(i, k, j);
      pmc.transition[{li, wk}] = std::move(row);
      for (std::size_t j = 0; j < n; ++j) {
        WordDistribution dist;
        for (std::size_t l = 0; l < m; ++l) {
          if (inst.emit(i, j, k, l) > 0.0) dist.emplace_back(static_cast<WordId>(l), inst.emit(i, j, k, l));
        }
        pmc.emission[{li, wk, static_cast<LabelId>(j)}] = std::move(dist);
      }
    }
  }
  return pmc;
}

FactorProvider instance_factors(const TinyInstance& inst) {
  const std::size_t n = inst.num_labels;
  const auto& obs = inst.observations;
  FactorProvider f(n, obs.size());
  for (std::size_t i = 0; i < n; ++i) f.initial[i] = inst.init(i, obs[0]);
  for (std::size_t t = 0; t + 1 < obs.size(); ++t) {
    auto block = f.step(t);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        block[i * n + j] = inst.trans(i, obs[t], j) * inst.emit(i, j, obs[t], obs[t + 1]);
      }
    }
  }
  return f;
}

double joint_probability(const TinyInstance& inst, const std::vector<LabelId>& x) {
  const auto& y = inst.observations;
  double p = inst.init(x[0], y[0]);
  for (std::size_t t = 0; t + 1 < y.size(); ++t) {
    p *= inst.trans(x[t], y[t], x[t + 1]) * inst.emit(x[t], x[t + 1], y[t], y[t + 1]);
  }
  return p;
}

PosteriorMatrix enumerate_posteriors(const TinyInstance& inst) {
  const std::size_t n = inst.num_labels;
  const std::size_t len = inst.observations.size();
  if (len == 0 || len > kMaxLength || n > kMaxLabels) throw Error(ErrorCode::kShape, "oracle: instance too large");
  PosteriorMatrix post(len, n);
  double total = 0.0;
  for_each_sequence(n, len, [&](const std::vector<LabelId>& x) {
    const double p = joint_probability(inst, x);
    total += p;
    for (std::size_t t = 0; t < len; ++t) post.at(t, x[t]) += p;
  });
  if (!(total > 0.0)) throw DeadEndError(0, "oracle: observation sequence has zero probability");
  for (auto& v : post.values) v /= total;
  return post;
}

ScoredPath enumerate_map(const TinyInstance& inst) { return enumerate_map(instance_factors(inst)); }

PosteriorMatrix enumerate_posteriors(const FactorProvider& f) {
  check_tiny(f);
  PosteriorMatrix post(f.length, f.num_labels);
  double total = 0.0;
  for_each_sequence(f.num_labels, f.length, [&](const std::vector<LabelId>& x) {
    const double p = factor_product(f, x);
    total += p;
    for (std::size_t t = 0; t < f.length; ++t) post.at(t, x[t]) += p;
  });
  if (!(total > 0.0)) throw DeadEndError(0, "oracle: factors have zero total mass");
  for (auto& v : post.values) v /= total;
  return post;
}

ScoredPath enumerate_map(const FactorProvider& f) {
  check_tiny(f);
  ScoredPath best;
  best.log_score = kNegInf;
  for_each_sequence(f.num_labels, f.length, [&](const std::vector<LabelId>& x) {
    const double s = factor_log_score(f, x);
    if (s > best.log_score) {
      best.log_score = s;
      best.labels = x;
    }
  });
  if (best.log_score == kNegInf) throw DeadEndError(0, "oracle: every sequence has zero probability");
  return best;
}

PmcParams embed_hmc_as_pmc(const HmcParams& hmc, std::size_t num_words) {
  const std::size_t n = hmc.num_labels;
  // b_j as sparse distributions over words.
  std::vector<WordDistribution> emit(n);
  for (const auto& [key, p] : hmc.emission) {
    if (p > 0.0 && key.word < num_words) emit[key.label].emplace_back(key.word, p);
  }
  for (auto& d : emit) std::sort(d.begin(), d.end());

  PmcParams pmc;
  pmc.num_labels = n;
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = static_cast<LabelId>(i);
    for (const auto& [k, b] : emit[i]) {
      if (hmc.initial[i] * b > 0.0) pmc.initial[{li, k}] = hmc.initial[i] * b;
    }
    if (!hmc.row_supported[i]) continue;
    std::vector<double> row(hmc.transition.begin() + static_cast<std::ptrdiff_t>(i * n),
                            hmc.transition.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    for (std::size_t k = 0; k < num_words; ++k) {
      const auto wk = static_cast<WordId>(k);
      pmc.transition[{li, wk}] = row;
      for (std::size_t j = 0; j < n; ++j) {
        if (!emit[j].empty()) pmc.emission[{li, wk, static_cast<LabelId>(j)}] = emit[j];
      }
    }
  }
  return pmc;
}

PmcParams embed_hmc_as_pmc(const HmcParams& hmc) {
  std::size_t words = 0;
  for (const auto& [key, p] : hmc.emission) words = std::max<std::size_t>(words, key.word + 1);
  return embed_hmc_as_pmc(hmc, words);
}

HmcParams random_hmc(std::mt19937_64& rng, std::size_t num_labels, std::size_t num_words) {
  HmcParams hmc;
  hmc.num_labels = num_labels;
  hmc.initial.resize(num_labels);
  hmc.transition.resize(num_labels * num_labels);
  hmc.row_supported.assign(num_labels, true);
  random_distribution(rng, hmc.initial, 0.0);
  std::vector<double> row(num_words);
  for (std::size_t i = 0; i < num_labels; ++i) {
    random_distribution(rng, std::span(hmc.transition).subspan(i * num_labels, num_labels), 0.0);
    random_distribution(rng, row, 0.2);
    for (std::size_t k = 0; k < num_words; ++k) {
      if (row[k] > 0.0) hmc.emission[{static_cast<LabelId>(i), static_cast<WordId>(k)}] = row[k];
    }
  }
  return hmc;
}

LabelMatrix classic_hmc_forward(const HmcParams& hmc, const std::vector<WordId>& words) {
  const std::size_t n = hmc.num_labels;
  LabelMatrix alpha(words.size(), n);
  auto normalize = [&](std::size_t t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += alpha.at(t, i);
    if (!(s > 0.0)) throw DeadEndError(t, "classic_hmc_forward: zero mass");
    for (std::size_t i = 0; i < n; ++i) alpha.at(t, i) /= s;
  };
  for (std::size_t i = 0; i < n; ++i) alpha.at(0, i) = hmc.initial[i] * hmc.emit(static_cast<LabelId>(i), words[0]);
  normalize(0);
  for (std::size_t t = 1; t < words.size(); ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += alpha.at(t - 1, i) * hmc.trans(i, j);
      alpha.at(t, j) = s * hmc.emit(static_cast<LabelId>(j), words[t]);
    }
    normalize(t);
  }
  return alpha;
}

PosteriorMatrix unscaled_posteriors(const FactorProvider& f) {
  const std::size_t n = f.num_labels;
  const std::size_t len = f.length;
  LabelMatrix alpha(len, n), beta(len, n);
  for (std::size_t i = 0; i < n; ++i) alpha.at(0, i) = f.initial[i];
  for (std::size_t t = 0; t + 1 < len; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += alpha.at(t, i) * f.at(t, i, j);
      alpha.at(t + 1, j) = s;
    }
  }
  for (std::size_t i = 0; i < n; ++i) beta.at(len - 1, i) = 1.0;
  for (std::size_t t = len - 1; t-- > 0;) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += f.at(t, i, j) * beta.at(t + 1, j);
      beta.at(t, i) = s;
    }
  }
  PosteriorMatrix post(len, n);
  for (std::size_t t = 0; t < len; ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += post.at(t, i) = alpha.at(t, i) * beta.at(t, i);
    if (!(s > 0.0)) throw DeadEndError(t, "unscaled_posteriors: zero mass (underflow or dead end)");
    for (std::size_t i = 0; i < n; ++i) post.at(t, i) /= s;
  }
  return post;
}

BruteForceEstimates brute_force_estimates(const LabeledCorpus& corpus, std::size_t suffix_max_len) {
  using Key2 = std::tuple<std::string, std::string>;
  using Key3 = std::tuple<std::string, std::string, std::string>;
  using Key4 = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<std::string, std::size_t> first_label, nonfinal_label, token_label;
  std::map<Key2, std::size_t> label_pair, nonfinal_emission, first_pair, label_word_nonfinal;
  std::map<Key3, std::size_t> triple;
  std::map<Key4, std::size_t> quad;
  std::map<std::tuple<std::size_t, std::string, int, std::string>, std::size_t> feature;
  const std::size_t chains = corpus.sentences.size();

  for (const auto& s : corpus.sentences) {
    ++first_label[s[0].label];
    ++first_pair[{s[0].label, s[0].word}];
    for (std::size_t t = 0; t < s.size(); ++t) {
      ++token_label[s[t].label];
      for (std::size_t m = 0; m <= suffix_max_len; ++m) {
        const WordFeatures f = extract_features(s[t].word, t, m);
        const int bits = (f.cap ? 1 : 0) + (f.hyphen ? 2 : 0) + (f.first ? 4 : 0) + (f.digit ? 8 : 0);
        ++feature[{m, s[t].label, bits, f.suffix}];
      }
      if (t + 1 == s.size()) continue;
      ++nonfinal_label[s[t].label];
      ++nonfinal_emission[{s[t].label, s[t].word}];
      ++label_pair[{s[t].label, s[t + 1].label}];
      ++label_word_nonfinal[{s[t].label, s[t].word}];
      ++triple[{s[t].label, s[t].word, s[t + 1].label}];
      ++quad[{s[t].label, s[t].word, s[t + 1].label, s[t + 1].word}];
    }
  }

  auto ratio = [](std::size_t a, std::size_t b) { return static_cast<double>(a) / static_cast<double>(b); };
  BruteForceEstimates e;
  for (const auto& [label, c] : token_label) {
    auto it = first_label.find(label);
    e.hmc_initial[label] = ratio(it == first_label.end() ? 0 : it->second, chains);
  }
  for (const auto& [key, c] : label_pair) e.hmc_transition[key] = ratio(c, nonfinal_label.at(std::get<0>(key)));
  for (const auto& [key, c] : nonfinal_emission) e.hmc_emission[key] = ratio(c, nonfinal_label.at(std::get<0>(key)));
  for (const auto& [key, c] : first_pair) e.pmc_initial[key] = ratio(c, chains);
  for (const auto& [key, c] : triple) {
    e.pmc_transition[key] = ratio(c, label_word_nonfinal.at({std::get<0>(key), std::get<1>(key)}));
  }
  for (const auto& [key, c] : quad) {
    const auto& [i, k, j, l] = key;
    e.pmc_emission[key] = ratio(c, triple.at({i, k, j}));
  }
  for (const auto& [key, c] : feature) e.features[key] = ratio(c, token_label.at(std::get<1>(key)));
  return e;
}

}  // namespace pmctag::oracle
