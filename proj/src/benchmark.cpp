#include "pmctag/benchmark.hpp"

#include <optional>

#include "pmctag/error.hpp"

namespace pmctag {

BenchmarkReport run_benchmark(const LabeledCorpus& train_corpus, const LabeledCorpus& test,
                              const TrainConfig& config, std::size_t repetitions,
                              const ResolveOptions& pmc_options) {
  BenchmarkReport report;
  report.train_sentences = train_corpus.sentences.size();
  report.train_tokens = train_corpus.token_count();
  report.test_sentences = test.sentences.size();
  report.test_tokens = test.token_count();

  report.hmc_train = time_repeated([&] { (void)train_hmc_only(train_corpus, config); }, repetitions);
  std::optional<ModelBundle> model;
  report.pmc_train = time_repeated([&] { model = train(train_corpus, config); }, repetitions);
  report.labels = model->alphabet.size();
  report.words = model->vocabulary.size();

  const Tagger tagger(*model);
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(test.sentences.size());
  for (const auto& s : test.sentences) sentences.push_back(words_of(s));

  auto decode_all = [&](DecodeMode mode) {
    ResolveOptions options = pmc_options;
    options.mode = mode;
    return [&tagger, &sentences, options] {
      for (const auto& words : sentences) {
        try {
          (void)tagger.decode(words, options, Decoder::kMpm);
        } catch (const DeadEndError&) {
        }
      }
    };
  };
  report.hmc_decode = time_repeated(decode_all(DecodeMode::kHmc), repetitions);
  report.pmc_decode = time_repeated(decode_all(DecodeMode::kPmc), repetitions);
  auto throughput = [&](const TimingSummary& s) {
    return s.median > 0.0 ? static_cast<double>(report.test_tokens) / s.median : 0.0;
  };
  report.hmc_tokens_per_second = throughput(report.hmc_decode);
  report.pmc_tokens_per_second = throughput(report.pmc_decode);
  return report;
}

}  // namespace pmctag
