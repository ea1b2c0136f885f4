#include "pmctag/features.hpp"

#include <algorithm>
#include <locale>
#include <string>

#include "pmctag/corpus.hpp"
#include "pmctag/error.hpp"
#include "pmctag/keys.hpp"

namespace pmctag {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

char32_t first_code_point(std::string_view s) {
  const auto b0 = static_cast<unsigned char>(s[0]);
  auto cont = [&](std::size_t i) -> char32_t {
    return i < s.size() ? static_cast<unsigned char>(s[i]) & 0x3F : 0;
  };
  if (b0 < 0x80) return b0;
  if ((b0 & 0xE0) == 0xC0) return ((b0 & 0x1F) << 6) | cont(1);
  if ((b0 & 0xF0) == 0xE0) return ((b0 & 0x0F) << 12) | (cont(1) << 6) | cont(2);
  if ((b0 & 0xF8) == 0xF0) return ((b0 & 0x07) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3);
  return 0xFFFD;
}

const std::locale& unicode_locale() {
  static const std::locale loc = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    return std::locale::classic();
  }();
  return loc;
}

bool is_upper(char32_t cp) {
  if (cp < 0x80) return cp >= 'A' && cp <= 'Z';
  const auto& ctype = std::use_facet<std::ctype<wchar_t>>(unicode_locale());
  return ctype.is(std::ctype_base::upper, static_cast<wchar_t>(cp));
}

std::string_view utf8_suffix(std::string_view word, std::size_t code_points) {
  std::size_t pos = word.size();
  while (code_points > 0 && pos > 0) {
    --pos;
    while (pos > 0 && is_continuation(static_cast<unsigned char>(word[pos]))) --pos;
    --code_points;
  }
  return word.substr(pos);
}

}  // namespace

WordFeatures extract_features(std::string_view word, std::size_t position, std::size_t suffix_len) {
  if (word.empty()) throw Error(ErrorCode::kEmptyToken, "extract_features: empty token");
  WordFeatures f;
  f.cap = is_upper(first_code_point(word));
  f.hyphen = word.find('-') != std::string_view::npos;
  f.first = position == 0;
  f.digit = std::any_of(word.begin(), word.end(), [](char c) { return c >= '0' && c <= '9'; });
  f.suffix = std::string(utf8_suffix(word, suffix_len));
  return f;
}

std::size_t FeatureKeyHash::operator()(const FeatureKey& k) const noexcept {
  const std::size_t h = std::hash<std::string>{}(k.suffix);
  return mix64(h ^ (std::uint64_t{k.label} << 8 | k.bits));
}

void FeatureCounts::resize_labels(std::size_t labels) {
  if (label_tokens.size() < labels) label_tokens.resize(labels, 0);
  if (levels.size() != max_suffix + 1) levels.resize(max_suffix + 1);
}

void FeatureCounts::add_token(LabelId label, std::string_view word, std::size_t position) {
  resize_labels(label + 1);
  ++label_tokens[label];
  const WordFeatures full = extract_features(word, position, max_suffix);
  for (std::size_t m = 0; m <= max_suffix; ++m) {
    FeatureKey key{label, full.bits(), std::string(utf8_suffix(full.suffix, m))};
    ++levels[m][std::move(key)];
  }
}

void FeatureCounts::merge(const FeatureCounts& other) {
  if (other.max_suffix != max_suffix) {
    throw Error(ErrorCode::kShape, "feature counts: suffix length mismatch");
  }
  resize_labels(other.label_tokens.size());
  for (std::size_t i = 0; i < other.label_tokens.size(); ++i) label_tokens[i] += other.label_tokens[i];
  for (std::size_t m = 0; m < other.levels.size(); ++m) {
    for (const auto& [key, c] : other.levels[m]) levels[m][key] += c;
  }
}

FeatureCounts count_features(const LabeledCorpus& corpus, const LabelAlphabet& alphabet,
                             std::size_t max_suffix) {
  FeatureCounts counts;
  counts.max_suffix = max_suffix;
  counts.resize_labels(alphabet.size());
  for (const auto& sentence : corpus.sentences) {
    for (std::size_t t = 0; t < sentence.size(); ++t) {
      const auto label = alphabet.find(sentence[t].label);
      if (!label) throw Error(ErrorCode::kUnknownTag, "count_features: label not interned: " + sentence[t].label);
      counts.add_token(*label, sentence[t].word, t);
    }
  }
  return counts;
}

FeatureEmissionTables fit_feature_tables(const FeatureCounts& counts) {
  FeatureEmissionTables tables;
  tables.max_suffix = counts.max_suffix;
  tables.num_labels = counts.label_tokens.size();
  tables.levels.resize(counts.max_suffix + 1);
  tables.seen_suffixes.resize(counts.max_suffix + 1);
  for (std::size_t m = 0; m < counts.levels.size(); ++m) {
    for (const auto& [key, c] : counts.levels[m]) {
      tables.levels[m].emplace(
          key, static_cast<double>(c) / static_cast<double>(counts.label_tokens[key.label]));
      tables.seen_suffixes[m].insert(key.suffix);
    }
  }
  return tables;
}

FeatureEmissionTables fit_feature_tables(const LabeledCorpus& corpus, std::size_t max_suffix,
                                         LabelAlphabet* alphabet) {
  if (corpus.sentences.empty()) throw Error(ErrorCode::kEmptyCorpus, "fit_feature_tables: empty corpus");
  LabelAlphabet local;
  LabelAlphabet& labels = alphabet ? *alphabet : local;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence) labels.intern(token.label);
  }
  return fit_feature_tables(count_features(corpus, labels, max_suffix));
}

std::size_t FeatureEmissionTables::backoff_level(const WordFeatures& full) const {
  for (std::size_t m = max_suffix; m > 0; --m) {
    if (seen_suffixes[m].contains(std::string(utf8_suffix(full.suffix, m)))) return m;
  }
  return 0;
}

double feature_emission_prob(const FeatureEmissionTables& tables, LabelId label,
                             std::string_view word, std::size_t position) {
  const WordFeatures full = extract_features(word, position, tables.max_suffix);
  const std::size_t m = tables.backoff_level(full);
  FeatureKey key{label, full.bits(), std::string(utf8_suffix(full.suffix, m))};
  auto it = tables.levels[m].find(key);
  return it == tables.levels[m].end() ? 0.0 : it->second;
}

std::vector<double> feature_emission_column(const FeatureEmissionTables& tables,
                                            std::string_view word, std::size_t position) {
  const WordFeatures full = extract_features(word, position, tables.max_suffix);
  const std::size_t m = tables.backoff_level(full);
  std::vector<double> column(tables.num_labels, 0.0);
  FeatureKey key{0, full.bits(), std::string(utf8_suffix(full.suffix, m))};
  for (std::size_t i = 0; i < tables.num_labels; ++i) {
    key.label = static_cast<LabelId>(i);
    if (auto it = tables.levels[m].find(key); it != tables.levels[m].end()) column[i] = it->second;
  }
  return column;
}

}  // namespace pmctag
