#include "pmctag/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <regex>
#include <thread>

#include <CLI11.hpp>

#include "pmctag/benchmark.hpp"
#include "pmctag/corpus.hpp"
#include "pmctag/error.hpp"
#include "pmctag/oracle.hpp"
#include "pmctag/training.hpp"

namespace pmctag::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::kUsage, std::string("missing required ") + what + " path");
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::kIo, std::string(what) + " not found: " + path);
}

ReadOptions read_options(const CliConfig& c) {
  ReadOptions options;
  if (!c.skip_pattern.empty()) options.skip_pattern = std::regex(c.skip_pattern);
  options.skip_column = static_cast<std::size_t>(c.word_column);
  return options;
}

LabeledCorpus load_labeled(const CliConfig& c, const std::string& path) {
  LabeledCorpus corpus = read_conll_file(path, c.word_column, c.tag_column, read_options(c));
  if (!c.mapping_path.empty()) corpus = apply_mapping(corpus, read_tag_mapping_file(c.mapping_path));
  return corpus;
}

std::optional<SpanScheme> effective_scheme(const CliConfig& c, Task task) {
  if (c.scheme) return c.scheme;
  if (task == Task::kPos) return std::nullopt;
  return SpanScheme::kBio;
}

ResolveOptions resolve_options(const CliConfig& c) {
  ResolveOptions options;
  options.mode = c.mode;
  options.trigger = c.trigger;
  options.rescue_dead_ends = c.rescue;
  return options;
}

// Runs `fn` writing either to the named file or to `fallback`.
template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kIo, "cannot open for writing: " + path);
  fn(file);
  if (!file) throw Error(ErrorCode::kIo, "write failed: " + path);
}

void print_model_summary(const ModelBundle& m, std::ostream& out) {
  out << "labels " << m.alphabet.size() << "\n"
      << "words " << m.vocabulary.size() << "\n"
      << "chains " << m.counts.chains << "\n"
      << "pair_patterns " << m.counts.patterns.size() << "\n"
      << "pmc_transitions " << m.pmc.transition.size() << "\n"
      << "pmc_emissions " << m.pmc.emission.size() << "\n"
      << "hmc_emissions " << m.hmc.emission.size() << "\n";
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kDeadEnd:
    case ErrorCode::kEmptySupport:
      return kExitRuntime;
    default:
      return kExitUsage;
  }
}

}  // namespace

BatchResult decode_batch(const Tagger& tagger, const std::vector<std::vector<std::string>>& sentences,
                         const ResolveOptions& options, Decoder decoder, std::size_t threads) {
  BatchResult result;
  const std::size_t count = sentences.size();
  result.labels.resize(count);
  std::vector<DecodeResult> decoded(count);
  std::vector<char> failed(count, 0);
  const auto start = Clock::now();

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < count; s = next++) {
      try {
        decoded[s] = tagger.decode(sentences[s], options, decoder);
      } catch (const DeadEndError&) {
        failed[s] = 1;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  result.seconds = seconds_since(start);

  const auto& alphabet = tagger.model().alphabet;
  for (std::size_t s = 0; s < count; ++s) {
    if (failed[s]) {
      result.dead_ends.push_back(s);
      continue;
    }
    auto& labels = result.labels[s];
    for (LabelId id : decoded[s].labels) labels.push_back(alphabet.at(id));
    result.steps += decoded[s].steps;
    result.downgraded += decoded[s].downgraded;
    result.rescued += decoded[s].rescued;
  }
  return result;
}

int cmd_train(const CliConfig& c, std::ostream& out, std::ostream& err) {
  require_file(c.train_path, "training corpus");
  if (!c.update_path.empty()) require_file(c.update_path, "update corpus");
  if (!c.mapping_path.empty()) require_file(c.mapping_path, "mapping");
  if (c.model_path.empty()) throw Error(ErrorCode::kUsage, "missing --model output path");

  const LabeledCorpus corpus = load_labeled(c, c.train_path);
  TrainConfig config{c.task, c.suffix_max_len, c.tag_column};
  const auto start = Clock::now();
  ModelBundle model = train(corpus, config);
  if (!c.update_path.empty()) model = update_online(model, load_labeled(c, c.update_path));
  const double elapsed = seconds_since(start);
  save_model(model, c.model_path);

  out << "train_time " << std::fixed << std::setprecision(3) << elapsed << "\n";
  out.unsetf(std::ios::floatfield);
  print_model_summary(model, out);
  err << "wrote " << c.model_path << "\n";
  return kExitOk;
}

int cmd_tag(const CliConfig& c, std::ostream& out, std::ostream& err) {
  require_file(c.model_path, "model");
  require_file(c.input_path, "input corpus");
  const ModelBundle model = load_model(c.model_path);
  const Tagger tagger(model);

  std::ifstream in(c.input_path);
  ReadOptions options = read_options(c);
  options.source_name = c.input_path;
  ConllDocument doc = read_conll_document(in, options);
  const LabeledCorpus corpus = to_labeled(doc, c.word_column, -1, c.input_path);

  std::vector<std::vector<std::string>> sentences;
  for (const auto& s : corpus.sentences) sentences.push_back(words_of(s));
  const BatchResult batch = decode_batch(tagger, sentences, resolve_options(c), c.decoder, c.threads);

  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    for (std::size_t t = 0; t < doc.sentences[s].size(); ++t) {
      doc.sentences[s][t].push_back(batch.labels[s].empty() ? "_" : batch.labels[s][t]);
    }
  }
  with_output(c.output_path, out, [&](std::ostream& o) { write_conll(doc, o); });

  for (std::size_t s : batch.dead_ends) err << "dead end in sentence " << s << "\n";
  const double rate = batch.steps ? static_cast<double>(batch.downgraded) / static_cast<double>(batch.steps) : 0.0;
  err << "sentences " << sentences.size() << " downgrade_rate " << rate << " rescued " << batch.rescued << "\n";
  return batch.dead_ends.empty() ? kExitOk : kExitRuntime;
}

int cmd_eval(const CliConfig& c, std::ostream& out, std::ostream& err) {
  require_file(c.model_path, "model");
  require_file(c.input_path, "gold corpus");
  if (!c.mapping_path.empty()) require_file(c.mapping_path, "mapping");
  const ModelBundle model = load_model(c.model_path);
  const LabeledCorpus gold = load_labeled(c, c.input_path);
  const Tagger tagger(model);

  std::vector<std::vector<std::string>> sentences;
  for (const auto& s : gold.sentences) sentences.push_back(words_of(s));
  BatchResult batch = decode_batch(tagger, sentences, resolve_options(c), c.decoder, c.threads);
  for (std::size_t s : batch.dead_ends) {
    batch.labels[s].assign(sentences[s].size(), "_");
    err << "dead end in sentence " << s << "\n";
  }

  EvalReport report = evaluate(gold, batch.labels, mark_known(gold, model.vocabulary), effective_scheme(c, model.task));
  report.task = std::string(to_string(model.task));
  report.mode = std::string(to_string(c.mode));
  report.decoder = std::string(to_string(c.decoder));
  report.trigger = std::string(to_string(c.trigger));
  report.decode_time = batch.seconds;
  report.dead_ends = batch.dead_ends.size();
  if (batch.steps) {
    report.downgrade_rate = static_cast<double>(batch.downgraded) / static_cast<double>(batch.steps);
    report.rescue_rate = static_cast<double>(batch.rescued) / static_cast<double>(batch.steps);
  }

  write_report_text(report, out);
  if (!c.report_kv_path.empty()) {
    with_output(c.report_kv_path, out, [&](std::ostream& o) { write_report_kv(report, o); });
  }
  if (!c.output_path.empty()) {
    LabeledCorpus predicted = gold;
    for (std::size_t s = 0; s < predicted.sentences.size(); ++s)
      for (std::size_t t = 0; t < predicted.sentences[s].size(); ++t)
        predicted.sentences[s][t].label = batch.labels[s][t];
    with_output(c.output_path, out, [&](std::ostream& o) { write_conll(predicted, o); });
  }
  return batch.dead_ends.empty() ? kExitOk : kExitRuntime;
}

int cmd_bench(const CliConfig& c, std::ostream& out, std::ostream&) {
  require_file(c.train_path, "training corpus");
  require_file(c.input_path, "test corpus");
  if (!c.mapping_path.empty()) require_file(c.mapping_path, "mapping");
  const LabeledCorpus train_corpus = load_labeled(c, c.train_path);
  const LabeledCorpus test = load_labeled(c, c.input_path);
  TrainConfig config{c.task, c.suffix_max_len, c.tag_column};
  const BenchmarkReport report = run_benchmark(train_corpus, test, config, c.repetitions, resolve_options(c));
  write_benchmark_text(report, out);
  if (!c.report_kv_path.empty()) {
    with_output(c.report_kv_path, out, [&](std::ostream& o) { write_benchmark_kv(report, o); });
  }
  return kExitOk;
}

int cmd_verify(const CliConfig& c, std::ostream& out, std::ostream&) {
  std::mt19937_64 rng(c.seed);
  double worst_posterior = 0.0;
  double worst_score = 0.0;
  std::size_t path_mismatch = 0;
  for (std::size_t trial = 0; trial < c.trials; ++trial) {
    const auto instance = oracle::random_instance(rng);
    const auto factors = pmc_factors(oracle::to_pmc_params(instance), instance.observations);
    const auto post = posterior_marginals(factors);
    const auto expected = oracle::enumerate_posteriors(instance);
    for (std::size_t v = 0; v < post.values.size(); ++v) {
      worst_posterior = std::max(worst_posterior, std::abs(post.values[v] - expected.values[v]));
    }
    const auto path = viterbi(factors);
    const auto best = oracle::enumerate_map(instance);
    worst_score = std::max(worst_score, std::abs(path.log_score - best.log_score));
    path_mismatch += path.labels != best.labels;
  }
  const bool ok = worst_posterior <= 1e-9 && worst_score <= 1e-9;
  out << std::setprecision(3) << "trials " << c.trials << "\n"
      << "max_posterior_deviation " << worst_posterior << "\n"
      << "max_map_score_deviation " << worst_score << "\n"
      << "map_path_mismatches " << path_mismatch << "\n"
      << "status " << (ok ? "ok" : "FAILED") << "\n";
  return ok ? kExitOk : kExitRuntime;
}

int cmd_dump(const CliConfig& c, std::ostream& out, std::ostream&) {
  require_file(c.model_path, "model");
  dump_model(load_model(c.model_path), out);
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Pairwise and hidden Markov chain sequence labeling"};
  app.set_config("--config", "", "Optional TOML/INI configuration file; flags override it");
  app.require_subcommand(1, 1);

  const std::map<std::string, Task> tasks{{"pos", Task::kPos}, {"chunk", Task::kChunk}, {"ner", Task::kNer}};
  const std::map<std::string, DecodeMode> modes{{"hmc", DecodeMode::kHmc}, {"pmc", DecodeMode::kPmc}};
  const std::map<std::string, Decoder> decoders{{"mpm", Decoder::kMpm}, {"map", Decoder::kMap}};
  const std::map<std::string, DowngradeTrigger> triggers{{"bigram-support", DowngradeTrigger::kBigramSupport},
                                                          {"zero-factor", DowngradeTrigger::kZeroFactor}};
  const std::map<std::string, SpanScheme> schemes{{"bio", SpanScheme::kBio}, {"plain", SpanScheme::kPlain}};
  std::string task_name = "pos", mode_name = "pmc", decoder_name = "mpm", trigger_name = "bigram-support",
              scheme_name;

  auto columns = [&](CLI::App* sub) {
    sub->add_option("--word-column", c.word_column, "0-based word column")->check(CLI::NonNegativeNumber);
    sub->add_option("--tag-column", c.tag_column, "0-based tag column");
    sub->add_option("--mapping", c.mapping_path, "Tag mapping file (source<TAB>target)");
    sub->add_option("--skip-pattern", c.skip_pattern, "Regex on the word column for lines to drop");
  };
  auto decoding = [&](CLI::App* sub) {
    sub->add_option("--mode", mode_name, "hmc or pmc")->check(CLI::IsMember(modes, CLI::ignore_case));
    sub->add_option("--decoder", decoder_name, "mpm or map")->check(CLI::IsMember(decoders, CLI::ignore_case));
    sub->add_option("--downgrade-trigger", trigger_name, "bigram-support or zero-factor")
        ->check(CLI::IsMember(triggers, CLI::ignore_case));
    sub->add_flag("!--no-rescue", c.rescue, "Report dead ends instead of rescuing them");
    sub->add_option("--threads", c.threads, "Decoding threads")->check(CLI::PositiveNumber);
  };
  auto training = [&](CLI::App* sub) {
    sub->add_option("--task", task_name, "pos, chunk or ner")->check(CLI::IsMember(tasks, CLI::ignore_case));
    sub->add_option("--suffix-max-len", c.suffix_max_len, "Longest suffix used for unknown words");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a model from a labeled corpus");
  train_cmd->add_option("--train", c.train_path, "Training corpus")->required();
  train_cmd->add_option("--update", c.update_path, "Second corpus added by online update");
  train_cmd->add_option("--model", c.model_path, "Output model file")->required();
  columns(train_cmd);
  training(train_cmd);

  auto* tag_cmd = app.add_subcommand("tag", "Append predicted labels to a CoNLL file");
  tag_cmd->add_option("--model", c.model_path, "Model file")->required();
  tag_cmd->add_option("--input", c.input_path, "Input corpus")->required();
  tag_cmd->add_option("--output", c.output_path, "Output file (default stdout)");
  tag_cmd->add_option("--word-column", c.word_column, "0-based word column")->check(CLI::NonNegativeNumber);
  tag_cmd->add_option("--skip-pattern", c.skip_pattern, "Regex on the word column for lines to drop");
  decoding(tag_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Score a model against a gold corpus");
  eval_cmd->add_option("--model", c.model_path, "Model file")->required();
  eval_cmd->add_option("--input", c.input_path, "Gold corpus")->required();
  eval_cmd->add_option("--report-kv", c.report_kv_path, "Key-value report file");
  eval_cmd->add_option("--output", c.output_path, "Write predictions as CoNLL");
  eval_cmd->add_option("--scheme", scheme_name, "Span scheme: bio or plain")
      ->check(CLI::IsMember(schemes, CLI::ignore_case));
  columns(eval_cmd);
  decoding(eval_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "Time HMC and PMC training and decoding");
  bench_cmd->add_option("--train", c.train_path, "Training corpus")->required();
  bench_cmd->add_option("--input", c.input_path, "Test corpus")->required();
  bench_cmd->add_option("--repetitions", c.repetitions, "Timing repetitions")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report-kv", c.report_kv_path, "Key-value report file");
  columns(bench_cmd);
  training(bench_cmd);
  decoding(bench_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Check inference against exhaustive enumeration");
  verify_cmd->add_option("--trials", c.trials, "Random tiny instances");
  verify_cmd->add_option("--seed", c.seed, "Random seed");

  auto* dump_cmd = app.add_subcommand("dump", "Print a text summary of a model file");
  dump_cmd->add_option("--model", c.model_path, "Model file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  auto lower = [](std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return text;
  };
  c.task = tasks.at(lower(task_name));
  c.mode = modes.at(lower(mode_name));
  c.decoder = decoders.at(lower(decoder_name));
  c.trigger = triggers.at(lower(trigger_name));
  if (!scheme_name.empty()) c.scheme = schemes.at(lower(scheme_name));

  try {
    if (train_cmd->parsed()) return cmd_train(c, out, err);
    if (tag_cmd->parsed()) return cmd_tag(c, out, err);
    if (eval_cmd->parsed()) return cmd_eval(c, out, err);
    if (bench_cmd->parsed()) return cmd_bench(c, out, err);
    if (verify_cmd->parsed()) return cmd_verify(c, out, err);
    if (dump_cmd->parsed()) return cmd_dump(c, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::regex_error& e) {
    err << "error: invalid --skip-pattern: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace pmctag::cli
