#include "pmctag/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pmctag/error.hpp"

namespace pmctag {

ErrorRates token_accuracy(const std::vector<std::string>& gold, const std::vector<std::string>& predicted,
                          const std::vector<bool>& known) {
  if (gold.size() != predicted.size() || gold.size() != known.size()) {
    throw Error(ErrorCode::kShape, "token_accuracy: sequence lengths differ");
  }
  std::size_t wrong = 0, wrong_known = 0, wrong_unknown = 0;
  ErrorRates r;
  r.tokens = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool miss = gold[i] != predicted[i];
    wrong += miss;
    if (known[i]) {
      ++r.known_tokens;
      wrong_known += miss;
    } else {
      ++r.unknown_tokens;
      wrong_unknown += miss;
    }
  }
  auto rate = [](std::size_t num, std::size_t den) { return static_cast<double>(num) / static_cast<double>(den); };
  r.overall = r.tokens ? rate(wrong, r.tokens) : 0.0;
  if (r.known_tokens) r.known = rate(wrong_known, r.known_tokens);
  if (r.unknown_tokens) r.unknown = rate(wrong_unknown, r.unknown_tokens);
  return r;
}

SpanScheme parse_scheme(std::string_view name) {
  if (name == "bio") return SpanScheme::kBio;
  if (name == "plain") return SpanScheme::kPlain;
  throw Error(ErrorCode::kUsage, "unknown span scheme: " + std::string(name));
}

std::string_view to_string(SpanScheme scheme) { return scheme == SpanScheme::kBio ? "bio" : "plain"; }

namespace {

struct TagParts {
  std::string tag;
  std::string type;
};

// "B-NP" -> (B, NP); "O" -> (O, ""); a label without '-' keeps an empty type.
TagParts split_tag(const std::string& label) {
  const auto dash = label.find('-');
  if (dash == std::string::npos) return {label, ""};
  return {label.substr(0, dash), label.substr(dash + 1)};
}

bool end_of_chunk(const TagParts& prev, const TagParts& cur) {
  const auto& p = prev.tag;
  const auto& c = cur.tag;
  if (p == "B" && (c == "B" || c == "O")) return true;
  if (p == "I" && (c == "B" || c == "O")) return true;
  if (p == "E" && (c == "E" || c == "I" || c == "O")) return true;
  if (p != "O" && p != "." && prev.type != cur.type) return true;
  if (p == "]" || p == "[") return true;
  return false;
}

bool start_of_chunk(const TagParts& prev, const TagParts& cur) {
  const auto& p = prev.tag;
  const auto& c = cur.tag;
  if (c == "B" && (p == "B" || p == "I" || p == "O")) return true;
  if (p == "O" && (c == "I" || c == "E")) return true;
  if (p == "E" && (c == "E" || c == "I")) return true;
  if (c != "O" && c != "." && prev.type != cur.type) return true;
  if (c == "[" || c == "]") return true;
  return false;
}

SpanExtraction extract_bio(const std::vector<std::string>& labels) {
  SpanExtraction out;
  TagParts prev{"O", ""};
  std::optional<std::size_t> open;
  std::string open_type;
  for (std::size_t t = 0; t <= labels.size(); ++t) {
    // A virtual O closes the sentence.
    const TagParts cur = t < labels.size() ? split_tag(labels[t]) : TagParts{"O", ""};
    if (open && end_of_chunk(prev, cur)) {
      out.spans.push_back({*open, t - 1, open_type});
      open.reset();
    }
    if (t < labels.size() && start_of_chunk(prev, cur)) {
      open = t;
      open_type = cur.type;
      if (cur.tag != "B") ++out.repairs;
    }
    prev = cur;
  }
  return out;
}

SpanExtraction extract_plain(const std::vector<std::string>& labels) {
  SpanExtraction out;
  std::size_t t = 0;
  while (t < labels.size()) {
    if (labels[t] == "O") {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end + 1 < labels.size() && labels[end + 1] == labels[t]) ++end;
    out.spans.push_back({t, end, labels[t]});
    t = end + 1;
  }
  return out;
}

}  // namespace

SpanExtraction extract_spans(const std::vector<std::string>& labels, SpanScheme scheme) {
  return scheme == SpanScheme::kBio ? extract_bio(labels) : extract_plain(labels);
}

SpanScore score_from_counts(std::size_t gold, std::size_t predicted, std::size_t correct) {
  SpanScore s;
  s.gold = gold;
  s.predicted = predicted;
  s.correct = correct;
  s.precision = predicted ? static_cast<double>(correct) / static_cast<double>(predicted) : 0.0;
  s.recall = gold ? static_cast<double>(correct) / static_cast<double>(gold) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

std::size_t count_matches(const std::vector<Span>& gold, const std::vector<Span>& predicted) {
  std::vector<Span> g = gold;
  std::sort(g.begin(), g.end());
  std::size_t correct = 0;
  for (const auto& span : predicted) correct += std::binary_search(g.begin(), g.end(), span);
  return correct;
}

SpanScore span_f1(const std::vector<std::vector<Span>>& gold, const std::vector<std::vector<Span>>& predicted) {
  if (gold.size() != predicted.size()) throw Error(ErrorCode::kShape, "span_f1: sentence counts differ");
  std::size_t g = 0, p = 0, c = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    g += gold[s].size();
    p += predicted[s].size();
    c += count_matches(gold[s], predicted[s]);
  }
  return score_from_counts(g, p, c);
}

EvalReport evaluate(const LabeledCorpus& gold, const std::vector<std::vector<std::string>>& predicted,
                    const std::vector<std::vector<bool>>& known, std::optional<SpanScheme> scheme) {
  if (gold.sentences.size() != predicted.size() || gold.sentences.size() != known.size()) {
    throw Error(ErrorCode::kShape, "evaluate: sentence counts differ");
  }
  EvalReport report;
  report.sentences = gold.sentences.size();
  std::vector<std::string> g_all, p_all;
  std::vector<bool> k_all;
  std::vector<std::vector<Span>> g_spans, p_spans, g_known, p_known, g_unknown, p_unknown;
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    const auto& sentence = gold.sentences[s];
    if (sentence.size() != predicted[s].size() || sentence.size() != known[s].size()) {
      throw Error(ErrorCode::kShape, "evaluate: sentence " + std::to_string(s) + " length differs");
    }
    std::vector<std::string> g_labels;
    for (const auto& token : sentence) g_labels.push_back(token.label);
    g_all.insert(g_all.end(), g_labels.begin(), g_labels.end());
    p_all.insert(p_all.end(), predicted[s].begin(), predicted[s].end());
    k_all.insert(k_all.end(), known[s].begin(), known[s].end());
    if (!scheme) continue;

    auto gx = extract_spans(g_labels, *scheme);
    auto px = extract_spans(predicted[s], *scheme);
    report.repairs += px.repairs;
    auto all_known = [&](const Span& span) {
      for (std::size_t t = span.start; t <= span.end; ++t)
        if (!known[s][t]) return false;
      return true;
    };
    auto split = [&](const std::vector<Span>& spans, std::vector<std::vector<Span>>& kw,
                     std::vector<std::vector<Span>>& uw) {
      kw.emplace_back();
      uw.emplace_back();
      for (const auto& span : spans) (all_known(span) ? kw.back() : uw.back()).push_back(span);
    };
    split(gx.spans, g_known, g_unknown);
    split(px.spans, p_known, p_unknown);
    g_spans.push_back(std::move(gx.spans));
    p_spans.push_back(std::move(px.spans));
  }
  report.errors = token_accuracy(g_all, p_all, k_all);
  if (scheme) {
    report.scheme = std::string(to_string(*scheme));
    report.spans = span_f1(g_spans, p_spans);
    report.known_spans = span_f1(g_known, p_known);
    report.unknown_spans = span_f1(g_unknown, p_unknown);
  }
  return report;
}

namespace {

std::string percent(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << 100.0 * v;
  return ss.str();
}

std::string error_rate(const std::optional<double>& v) { return v ? percent(*v) + "%" : std::string("n/a"); }

void kv_optional(std::ostream& out, const char* key, const std::optional<double>& v) {
  out << key << ' ';
  if (v) {
    out << *v;
  } else {
    out << "absent";
  }
  out << '\n';
}

}  // namespace

void write_report_text(const EvalReport& r, std::ostream& out) {
  out << "# task=" << r.task << " mode=" << r.mode << " decoder=" << r.decoder << " downgrade-trigger=" << r.trigger;
  if (r.spans) out << " scheme=" << r.scheme << " unknown-span-rule=contains-unknown-word";
  out << '\n';
  out << std::left << std::setw(22) << "sentences" << r.sentences << '\n';
  out << std::setw(22) << "tokens" << r.errors.tokens << " (known " << r.errors.known_tokens << ", unknown "
      << r.errors.unknown_tokens << ")\n";
  if (r.spans) {
    auto row = [&](const char* name, const SpanScore& s) {
      out << std::setw(22) << name << "F1 " << percent(s.f1) << "  P " << percent(s.precision) << "  R "
          << percent(s.recall) << "  (gold " << s.gold << ", predicted " << s.predicted << ", correct " << s.correct
          << ")\n";
    };
    row("all", *r.spans);
    row("known words (KW)", *r.known_spans);
    row("unknown words (UW)", *r.unknown_spans);
    out << std::setw(22) << "bio repairs" << r.repairs << '\n';
  } else {
    out << std::setw(22) << "error" << error_rate(r.errors.overall) << '\n';
    out << std::setw(22) << "error KW" << error_rate(r.errors.known) << '\n';
    out << std::setw(22) << "error UW" << error_rate(r.errors.unknown) << '\n';
  }
  out << std::setw(22) << "downgrade rate" << std::fixed << std::setprecision(4) << r.downgrade_rate << '\n';
  out << std::setw(22) << "rescue rate" << r.rescue_rate << '\n';
  out << std::setw(22) << "dead ends" << r.dead_ends << '\n';
  if (r.train_time > 0.0) out << std::setw(22) << "train time (s)" << std::setprecision(3) << r.train_time << '\n';
  out << std::setw(22) << "decode time (s)" << std::setprecision(3) << r.decode_time << '\n';
  out.unsetf(std::ios::floatfield);
  out << std::right;
}

void write_report_kv(const EvalReport& r, std::ostream& out) {
  out << std::setprecision(17);
  out << "task " << r.task << '\n';
  out << "mode " << r.mode << '\n';
  out << "decoder " << r.decoder << '\n';
  out << "downgrade_trigger " << r.trigger << '\n';
  out << "sentences " << r.sentences << '\n';
  out << "tokens " << r.errors.tokens << '\n';
  out << "known_tokens " << r.errors.known_tokens << '\n';
  out << "unknown_tokens " << r.errors.unknown_tokens << '\n';
  out << "overall_error " << r.errors.overall << '\n';
  kv_optional(out, "known_error", r.errors.known);
  kv_optional(out, "unknown_error", r.errors.unknown);
  if (r.spans) {
    out << "scheme " << r.scheme << '\n';
    auto block = [&](const std::string& prefix, const SpanScore& s) {
      out << prefix << "precision " << s.precision << '\n';
      out << prefix << "recall " << s.recall << '\n';
      out << prefix << "f1 " << s.f1 << '\n';
      out << prefix << "gold_spans " << s.gold << '\n';
      out << prefix << "predicted_spans " << s.predicted << '\n';
      out << prefix << "correct_spans " << s.correct << '\n';
    };
    block("", *r.spans);
    block("known_", *r.known_spans);
    block("unknown_", *r.unknown_spans);
    out << "bio_repairs " << r.repairs << '\n';
  }
  out << "downgrade_rate " << r.downgrade_rate << '\n';
  out << "rescue_rate " << r.rescue_rate << '\n';
  out << "dead_ends " << r.dead_ends << '\n';
  out << "train_time " << r.train_time << '\n';
  out << "decode_time " << r.decode_time << '\n';
}

TimingSummary summarize(std::vector<double> samples) {
  TimingSummary s;
  s.samples = samples;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  s.median = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  s.min = samples.front();
  s.max = samples.back();
  return s;
}

TimingSummary time_repeated(const std::function<void()>& fn, std::size_t repetitions) {
  if (repetitions == 0) throw Error(ErrorCode::kUsage, "benchmark: repetitions must be >= 1");
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return summarize(std::move(samples));
}

void write_benchmark_text(const BenchmarkReport& r, std::ostream& out) {
  out << "train corpus: " << r.train_sentences << " sentences, " << r.train_tokens << " tokens\n";
  out << "test corpus:  " << r.test_sentences << " sentences, " << r.test_tokens << " tokens\n";
  out << "alphabet: " << r.labels << " labels, vocabulary: " << r.words << " words\n";
  out << std::fixed << std::setprecision(4);
  auto row = [&](const char* name, const TimingSummary& s) {
    out << std::left << std::setw(12) << name << "median " << s.median << " s  min " << s.min << " s  max " << s.max
        << " s  (n=" << s.samples.size() << ")\n";
  };
  row("hmc train", r.hmc_train);
  row("pmc train", r.pmc_train);
  row("hmc decode", r.hmc_decode);
  row("pmc decode", r.pmc_decode);
  out << std::setprecision(0);
  out << "hmc decode throughput: " << r.hmc_tokens_per_second << " tokens/s\n";
  out << "pmc decode throughput: " << r.pmc_tokens_per_second << " tokens/s\n";
  out.unsetf(std::ios::floatfield);
  out << std::right << std::setprecision(6);
}

void write_benchmark_kv(const BenchmarkReport& r, std::ostream& out) {
  out << std::setprecision(17);
  out << "train_sentences " << r.train_sentences << '\n';
  out << "train_tokens " << r.train_tokens << '\n';
  out << "test_sentences " << r.test_sentences << '\n';
  out << "test_tokens " << r.test_tokens << '\n';
  out << "labels " << r.labels << '\n';
  out << "words " << r.words << '\n';
  auto block = [&](const char* prefix, const TimingSummary& s) {
    out << prefix << "_median " << s.median << '\n';
    out << prefix << "_min " << s.min << '\n';
    out << prefix << "_max " << s.max << '\n';
    out << prefix << "_samples " << s.samples.size() << '\n';
  };
  block("hmc_train", r.hmc_train);
  block("pmc_train", r.pmc_train);
  block("hmc_decode", r.hmc_decode);
  block("pmc_decode", r.pmc_decode);
  out << "hmc_tokens_per_second " << r.hmc_tokens_per_second << '\n';
  out << "pmc_tokens_per_second " << r.pmc_tokens_per_second << '\n';
}

}  // namespace pmctag
