#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pmctag/counts.hpp"
#include "pmctag/features.hpp"
#include "pmctag/interner.hpp"
#include "pmctag/params.hpp"

namespace pmctag {

enum class Task : std::uint8_t { kPos = 0, kChunk = 1, kNer = 2 };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

inline constexpr std::uint32_t kFormatVersion = 1;

// A PMC, its fallback HMC and the unknown-word feature tables, all derived
// from the same counts. Immutable once built; safe to share between decoders.
struct ModelBundle {
  std::uint32_t format_version = kFormatVersion;
  Task task = Task::kPos;
  LabelAlphabet alphabet;
  Vocabulary vocabulary;
  CountTables counts;
  FeatureCounts feature_counts;
  HmcParams hmc;
  PmcParams pmc;
  FeatureEmissionTables features;

  std::size_t num_labels() const { return alphabet.size(); }

  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

// Serialized layout (all integers little-endian):
//   magic "PMCTAGMD" | u32 version | u64 payload size | payload | u32 crc32(payload)
// The payload carries task, alphabet, vocabulary, counts and the derived
// tables, every map in ascending key order, so equal models give equal bytes.
std::vector<char> serialize_model(const ModelBundle& model);
void serialize_model(const ModelBundle& model, std::ostream& out);

// Throws kUnsupportedVersion or kCorruptModel.
ModelBundle deserialize_model(const std::vector<char>& bytes);
ModelBundle deserialize_model(std::istream& in);

void save_model(const ModelBundle& model, const std::string& path);
ModelBundle load_model(const std::string& path);

// Line-oriented "key value" summary: sizes, totals and per-label counts.
void dump_model(const ModelBundle& model, std::ostream& out);

}  // namespace pmctag
