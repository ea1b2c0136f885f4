#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmctag/evaluation.hpp"
#include "pmctag/inference.hpp"
#include "pmctag/model.hpp"

namespace pmctag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct CliConfig {
  std::string command;
  std::string model_path;
  std::string train_path;
  std::string update_path;
  std::string input_path;
  std::string output_path;
  std::string report_kv_path;
  std::string mapping_path;
  std::string skip_pattern = "-DOCSTART-";
  Task task = Task::kPos;
  DecodeMode mode = DecodeMode::kPmc;
  Decoder decoder = Decoder::kMpm;
  DowngradeTrigger trigger = DowngradeTrigger::kBigramSupport;
  bool rescue = true;
  std::optional<SpanScheme> scheme;
  int word_column = 0;
  int tag_column = 1;
  std::size_t suffix_max_len = 3;
  std::size_t repetitions = 3;
  std::size_t threads = 1;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
};

int cmd_train(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_tag(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_dump(const CliConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and dispatches. Data goes to
// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Decodes every sentence, `threads` at a time, preserving order. Sentences
// that hit a dead end get an empty label vector and are listed in
// `dead_ends`.
struct BatchResult {
  std::vector<std::vector<std::string>> labels;
  std::vector<std::size_t> dead_ends;
  std::size_t steps = 0;
  std::size_t downgraded = 0;
  std::size_t rescued = 0;
  double seconds = 0.0;
};

BatchResult decode_batch(const Tagger& tagger, const std::vector<std::vector<std::string>>& sentences,
                         const ResolveOptions& options, Decoder decoder, std::size_t threads);

}  // namespace pmctag::cli
