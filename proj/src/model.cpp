#include "pmctag/model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <ostream>
#include <sstream>

#include <zlib.h>

#include "pmctag/error.hpp"
#include "pmctag/training.hpp"

namespace pmctag {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptySentence: return "EmptySentence";
    case ErrorCode::kEmptyToken: return "EmptyToken";
    case ErrorCode::kDeadEnd: return "DeadEnd";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kUnknownTag: return "UnknownTag";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kCorruptModel: return "CorruptModel";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kUsage: return "UsageError";
  }
  return "Unknown";
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kPos: return "pos";
    case Task::kChunk: return "chunk";
    case Task::kNer: return "ner";
  }
  return "pos";
}

Task parse_task(std::string_view name) {
  if (name == "pos") return Task::kPos;
  if (name == "chunk") return Task::kChunk;
  if (name == "ner") return Task::kNer;
  throw Error(ErrorCode::kUsage, "unknown task: " + std::string(name));
}

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'M', 'C', 'T', 'A', 'G', 'M', 'D'};
constexpr std::size_t kHeaderSize = kMagic.size() + 4 + 8;

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

class Writer {
 public:
  explicit Writer(std::vector<char>& buf) : buf_(buf) {}

  template <typename T>
  void pod(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&value);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void u8(std::uint8_t v) { pod(v); }
  void u32(std::uint32_t v) { pod(v); }
  void u64(std::uint64_t v) { pod(v); }
  void f64(double v) { pod(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

 private:
  std::vector<char>& buf_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::uint8_t u8() { return pod<std::uint8_t>(); }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(data_ + pos_, n);
    pos_ += n;
    return s;
  }
  // Element count guarded against the remaining bytes, each element taking at
  // least `min_bytes`.
  std::size_t count(std::size_t min_bytes) {
    const auto n = u64();
    if (min_bytes > 0 && n > (size_ - pos_) / min_bytes) corrupt("table size exceeds payload");
    return static_cast<std::size_t>(n);
  }
  bool done() const { return pos_ == size_; }

  [[noreturn]] static void corrupt(const std::string& what) {
    throw Error(ErrorCode::kCorruptModel, "corrupt model: " + what);
  }

 private:
  void need(std::size_t n) const {
    if (n > size_ - pos_) corrupt("unexpected end of payload");
  }

  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

template <typename Map>
auto sorted_entries(const Map& map) {
  std::vector<std::pair<typename Map::key_type, typename Map::mapped_type>> entries(map.begin(), map.end());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return entries;
}

void write_strings(Writer& w, const std::vector<std::string>& items) {
  w.u64(items.size());
  for (const auto& s : items) w.str(s);
}

std::vector<std::string> read_strings(Reader& r) {
  const auto n = r.count(4);
  std::vector<std::string> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) items.push_back(r.str());
  return items;
}

void write_feature_key(Writer& w, const FeatureKey& key) {
  w.u32(key.label);
  w.u8(key.bits);
  w.str(key.suffix);
}

FeatureKey read_feature_key(Reader& r) {
  FeatureKey key;
  key.label = r.u32();
  key.bits = r.u8();
  key.suffix = r.str();
  return key;
}

void write_payload(const ModelBundle& m, Writer& w) {
  w.u8(static_cast<std::uint8_t>(m.task));
  write_strings(w, m.alphabet.items());
  write_strings(w, m.vocabulary.items());

  // Primary counts; marginals are rebuilt on load.
  w.u64(m.counts.chains);
  w.u64(m.counts.initial.size());
  for (const auto& [k, c] : sorted_entries(m.counts.initial)) {
    w.u32(k.label);
    w.u32(k.word);
    w.u64(c);
  }
  w.u64(m.counts.patterns.size());
  for (const auto& [k, c] : sorted_entries(m.counts.patterns)) {
    w.u32(k.label);
    w.u32(k.word);
    w.u32(k.next_label);
    w.u32(k.next_word);
    w.u64(c);
  }

  const auto& fc = m.feature_counts;
  w.u64(fc.max_suffix);
  w.u64(fc.label_tokens.size());
  for (Count c : fc.label_tokens) w.u64(c);
  for (const auto& level : fc.levels) {
    w.u64(level.size());
    for (const auto& [k, c] : sorted_entries(level)) {
      write_feature_key(w, k);
      w.u64(c);
    }
  }

  // Derived tables.
  const auto& hmc = m.hmc;
  w.u64(hmc.num_labels);
  for (double p : hmc.initial) w.f64(p);
  for (double p : hmc.transition) w.f64(p);
  for (bool b : hmc.row_supported) w.u8(b ? 1 : 0);
  w.u64(hmc.emission.size());
  for (const auto& [k, p] : sorted_entries(hmc.emission)) {
    w.u32(k.label);
    w.u32(k.word);
    w.f64(p);
  }

  const auto& pmc = m.pmc;
  w.u64(pmc.num_labels);
  w.u64(pmc.initial.size());
  for (const auto& [k, p] : sorted_entries(pmc.initial)) {
    w.u32(k.label);
    w.u32(k.word);
    w.f64(p);
  }
  w.u64(pmc.transition.size());
  for (const auto& [k, row] : sorted_entries(pmc.transition)) {
    w.u32(k.label);
    w.u32(k.word);
    for (double p : row) w.f64(p);
  }
  w.u64(pmc.emission.size());
  for (const auto& [k, dist] : sorted_entries(pmc.emission)) {
    w.u32(k.label);
    w.u32(k.word);
    w.u32(k.next_label);
    w.u64(dist.size());
    for (const auto& [word, p] : dist) {
      w.u32(word);
      w.f64(p);
    }
  }

  const auto& ft = m.features;
  w.u64(ft.max_suffix);
  w.u64(ft.num_labels);
  for (const auto& level : ft.levels) {
    w.u64(level.size());
    for (const auto& [k, p] : sorted_entries(level)) {
      write_feature_key(w, k);
      w.f64(p);
    }
  }
}

ModelBundle read_payload(Reader& r) {
  ModelBundle m;
  const auto task = r.u8();
  if (task > static_cast<std::uint8_t>(Task::kNer)) Reader::corrupt("bad task");
  m.task = static_cast<Task>(task);
  m.alphabet = LabelAlphabet(read_strings(r));
  m.vocabulary = Vocabulary(read_strings(r));
  const std::size_t n = m.alphabet.size();
  const std::size_t v = m.vocabulary.size();
  auto check_label = [&](std::uint32_t id) {
    if (id >= n) Reader::corrupt("label id out of range");
    return id;
  };
  auto check_word = [&](std::uint32_t id) {
    if (id >= v) Reader::corrupt("word id out of range");
    return id;
  };

  m.counts.chains = r.u64();
  for (std::size_t e = 0, size = r.count(16); e < size; ++e) {
    LabelWord k{check_label(r.u32()), check_word(r.u32())};
    m.counts.initial.emplace(k, r.u64());
  }
  for (std::size_t e = 0, size = r.count(24); e < size; ++e) {
    Pattern k;
    k.label = check_label(r.u32());
    k.word = check_word(r.u32());
    k.next_label = check_label(r.u32());
    k.next_word = check_word(r.u32());
    m.counts.patterns.emplace(k, r.u64());
  }
  m.counts.rebuild_marginals(n);

  auto& fc = m.feature_counts;
  fc.max_suffix = r.u64();
  if (fc.max_suffix > 64) Reader::corrupt("suffix length out of range");
  fc.label_tokens.resize(r.count(8));
  for (auto& c : fc.label_tokens) c = r.u64();
  fc.levels.resize(fc.max_suffix + 1);
  for (auto& level : fc.levels) {
    for (std::size_t e = 0, size = r.count(17); e < size; ++e) {
      auto key = read_feature_key(r);
      check_label(key.label);
      level.emplace(std::move(key), r.u64());
    }
  }

  auto& hmc = m.hmc;
  hmc.num_labels = r.count(0);
  if (hmc.num_labels != n) Reader::corrupt("hmc label count mismatch");
  hmc.initial.resize(n);
  for (auto& p : hmc.initial) p = r.f64();
  hmc.transition.resize(n * n);
  for (auto& p : hmc.transition) p = r.f64();
  hmc.row_supported.resize(n);
  for (std::size_t i = 0; i < n; ++i) hmc.row_supported[i] = r.u8() != 0;
  for (std::size_t e = 0, size = r.count(16); e < size; ++e) {
    LabelWord k{check_label(r.u32()), check_word(r.u32())};
    hmc.emission.emplace(k, r.f64());
  }

  auto& pmc = m.pmc;
  pmc.num_labels = r.count(0);
  if (pmc.num_labels != n) Reader::corrupt("pmc label count mismatch");
  for (std::size_t e = 0, size = r.count(16); e < size; ++e) {
    LabelWord k{check_label(r.u32()), check_word(r.u32())};
    pmc.initial.emplace(k, r.f64());
  }
  for (std::size_t e = 0, size = r.count(8); e < size; ++e) {
    LabelWord k{check_label(r.u32()), check_word(r.u32())};
    std::vector<double> row(n);
    for (auto& p : row) p = r.f64();
    pmc.transition.emplace(k, std::move(row));
  }
  for (std::size_t e = 0, size = r.count(20); e < size; ++e) {
    LabelWordLabel k;
    k.label = check_label(r.u32());
    k.word = check_word(r.u32());
    k.next_label = check_label(r.u32());
    WordDistribution dist(r.count(12));
    for (auto& [word, p] : dist) {
      word = check_word(r.u32());
      p = r.f64();
    }
    pmc.emission.emplace(k, std::move(dist));
  }

  auto& ft = m.features;
  ft.max_suffix = r.count(0);
  ft.num_labels = r.count(0);
  if (ft.max_suffix != fc.max_suffix) Reader::corrupt("feature table shape mismatch");
  ft.levels.resize(ft.max_suffix + 1);
  ft.seen_suffixes.resize(ft.max_suffix + 1);
  for (std::size_t level = 0; level <= ft.max_suffix; ++level) {
    for (std::size_t e = 0, size = r.count(17); e < size; ++e) {
      auto key = read_feature_key(r);
      check_label(key.label);
      ft.seen_suffixes[level].insert(key.suffix);
      ft.levels[level].emplace(std::move(key), r.f64());
    }
  }
  if (!r.done()) Reader::corrupt("trailing bytes in payload");
  return m;
}

std::uint32_t checksum(const char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths.
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<char> serialize_model(const ModelBundle& model) {
  std::vector<char> payload;
  Writer pw(payload);
  write_payload(model, pw);

  std::vector<char> out;
  out.reserve(kHeaderSize + payload.size() + 4);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  Writer w(out);
  w.u32(model.format_version);
  w.u64(payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  w.u32(checksum(payload.data(), payload.size()));
  return out;
}

void serialize_model(const ModelBundle& model, std::ostream& out) {
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "serialize_model: write failed");
}

ModelBundle deserialize_model(const std::vector<char>& bytes) {
  if (bytes.size() < kHeaderSize || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kCorruptModel, "corrupt model: bad magic or truncated header");
  }
  Reader header(bytes.data() + kMagic.size(), kHeaderSize - kMagic.size());
  const auto version = header.u32();
  const auto payload_size = header.u64();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported model format version " + std::to_string(version));
  }
  if (payload_size > bytes.size() - kHeaderSize || bytes.size() - kHeaderSize - payload_size != 4) {
    throw Error(ErrorCode::kCorruptModel, "corrupt model: truncated or oversized stream");
  }
  const char* payload = bytes.data() + kHeaderSize;
  std::uint32_t stored = 0;
  std::memcpy(&stored, payload + payload_size, 4);
  if (stored != checksum(payload, payload_size)) {
    throw Error(ErrorCode::kCorruptModel, "corrupt model: checksum mismatch");
  }

  Reader r(payload, payload_size);
  ModelBundle model = read_payload(r);
  model.format_version = version;

  // Stored tables must be exactly what the counts produce.
  ModelBundle derived = model;
  refit(derived);
  if (!(derived.hmc == model.hmc) || !(derived.pmc == model.pmc) || !(derived.features == model.features)) {
    throw Error(ErrorCode::kCorruptModel, "corrupt model: derived tables disagree with counts");
  }
  return model;
}

ModelBundle deserialize_model(std::istream& in) {
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "deserialize_model: read failed");
  return deserialize_model(bytes);
}

void save_model(const ModelBundle& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path);
  serialize_model(model, out);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model: " + path);
  return deserialize_model(in);
}

void dump_model(const ModelBundle& model, std::ostream& out) {
  out << "format_version " << model.format_version << '\n';
  out << "task " << to_string(model.task) << '\n';
  out << "labels " << model.alphabet.size() << '\n';
  out << "words " << model.vocabulary.size() << '\n';
  out << "chains " << model.counts.chains << '\n';
  Count tokens = 0;
  for (Count c : model.feature_counts.label_tokens) tokens += c;
  out << "tokens " << tokens << '\n';
  out << "initial_patterns " << model.counts.initial.size() << '\n';
  out << "pair_patterns " << model.counts.patterns.size() << '\n';
  out << "word_bigrams " << model.counts.word_bigram.size() << '\n';
  out << "hmc_emissions " << model.hmc.emission.size() << '\n';
  out << "pmc_initial " << model.pmc.initial.size() << '\n';
  out << "pmc_transitions " << model.pmc.transition.size() << '\n';
  out << "pmc_emissions " << model.pmc.emission.size() << '\n';
  out << "suffix_max_len " << model.features.max_suffix << '\n';
  for (std::size_t m = 0; m < model.features.levels.size(); ++m) {
    out << "feature_level " << m << ' ' << model.features.levels[m].size() << ' '
        << model.features.seen_suffixes[m].size() << '\n';
  }
  for (std::size_t i = 0; i < model.alphabet.size(); ++i) {
    const Count n0 = model.counts.initial_label[i];
    const Count ni = model.counts.label_total[i];
    const Count tok = i < model.feature_counts.label_tokens.size() ? model.feature_counts.label_tokens[i] : 0;
    out << "label " << model.alphabet.at(static_cast<LabelId>(i)) << ' ' << n0 << ' ' << ni << ' ' << tok << '\n';
  }
}

}  // namespace pmctag
