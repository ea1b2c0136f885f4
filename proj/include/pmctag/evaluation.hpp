#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmctag/corpus.hpp"

namespace pmctag {

struct ErrorRates {
  double overall = 0.0;
  std::optional<double> known;    // absent when no known token was scored
  std::optional<double> unknown;  // absent when no unknown token was scored
  std::size_t tokens = 0;
  std::size_t known_tokens = 0;
  std::size_t unknown_tokens = 0;
};

// Throws kShape when the three sequences differ in length.
ErrorRates token_accuracy(const std::vector<std::string>& gold, const std::vector<std::string>& predicted,
                          const std::vector<bool>& known);

enum class SpanScheme { kBio, kPlain };

SpanScheme parse_scheme(std::string_view name);
std::string_view to_string(SpanScheme scheme);

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::string type;
  auto operator<=>(const Span&) const = default;
};

struct SpanExtraction {
  std::vector<Span> spans;
  std::size_t repairs = 0;  // spans opened by something other than a B- tag
};

// kBio follows conlleval's chunk boundary rules, so an I-X after O or after a
// different type opens a new span (counted as a repair). kPlain yields maximal
// runs of equal non-O labels.
SpanExtraction extract_spans(const std::vector<std::string>& labels, SpanScheme scheme);

struct SpanScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
};

SpanScore score_from_counts(std::size_t gold, std::size_t predicted, std::size_t correct);

// Exact (start, end, type) matches within one sentence.
std::size_t count_matches(const std::vector<Span>& gold, const std::vector<Span>& predicted);

// Micro-averaged over sentences: gold[s] and predicted[s] come from sentence s.
SpanScore span_f1(const std::vector<std::vector<Span>>& gold, const std::vector<std::vector<Span>>& predicted);

// Corpus-level report for one (model, test set, decoder configuration).
struct EvalReport {
  std::string task;
  std::string mode;
  std::string decoder;
  std::string trigger;
  std::string scheme;
  ErrorRates errors;
  std::optional<SpanScore> spans;
  std::optional<SpanScore> known_spans;    // spans made only of known words
  std::optional<SpanScore> unknown_spans;  // spans with at least one unknown word
  std::size_t repairs = 0;
  std::size_t sentences = 0;
  double train_time = 0.0;   // seconds, when known
  double decode_time = 0.0;  // seconds
  double downgrade_rate = 0.0;
  double rescue_rate = 0.0;
  std::size_t dead_ends = 0;
};

// Token errors always; span metrics when `scheme` is set. Known/unknown span
// subsets use the token-level known bits.
EvalReport evaluate(const LabeledCorpus& gold, const std::vector<std::vector<std::string>>& predicted,
                    const std::vector<std::vector<bool>>& known, std::optional<SpanScheme> scheme);

void write_report_text(const EvalReport& report, std::ostream& out);
void write_report_kv(const EvalReport& report, std::ostream& out);

struct TimingSummary {
  std::vector<double> samples;  // seconds
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

TimingSummary summarize(std::vector<double> samples);

// Wall-clock timing of `fn`, `repetitions` times (>= 1, else kUsage).
TimingSummary time_repeated(const std::function<void()>& fn, std::size_t repetitions);

struct BenchmarkReport {
  std::size_t train_sentences = 0;
  std::size_t train_tokens = 0;
  std::size_t test_sentences = 0;
  std::size_t test_tokens = 0;
  std::size_t labels = 0;
  std::size_t words = 0;
  TimingSummary hmc_train;
  TimingSummary pmc_train;
  TimingSummary hmc_decode;
  TimingSummary pmc_decode;
  double hmc_tokens_per_second = 0.0;
  double pmc_tokens_per_second = 0.0;
};

void write_benchmark_text(const BenchmarkReport& report, std::ostream& out);
void write_benchmark_kv(const BenchmarkReport& report, std::ostream& out);

}  // namespace pmctag
