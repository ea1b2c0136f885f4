#include "pmctag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "pmctag/error.hpp"

namespace pmctag {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) fields.push_back(std::move(field));
  return fields;
}

[[noreturn]] void format_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kFormat, source + ", line " + std::to_string(line) + ": " + what);
}

// `min_columns` > 0 rejects token lines with fewer fields, naming the line.
ConllDocument read_document(std::istream& in, const ReadOptions& options, std::size_t min_columns) {
  ConllDocument doc;
  std::vector<ConllDocument::Line> current;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  std::string line;
  auto flush = [&] {
    if (!current.empty()) doc.sentences.push_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) {
      flush();
      continue;
    }
    if (options.skip_pattern && options.skip_column < fields.size() &&
        std::regex_match(fields[options.skip_column], *options.skip_pattern)) {
      flush();
      continue;
    }
    if (fields.size() < min_columns) {
      format_error(options.source_name, line_no,
                   "missing column " + std::to_string(min_columns - 1) + " (found " +
                       std::to_string(fields.size()) + " fields)");
    }
    if (columns == 0) {
      columns = fields.size();
    } else if (fields.size() != columns) {
      format_error(options.source_name, line_no,
                   "expected " + std::to_string(columns) + " columns, found " + std::to_string(fields.size()));
    }
    current.push_back(std::move(fields));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, options.source_name + ": read failed");
  flush();
  return doc;
}

}  // namespace

std::size_t LabeledCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

ConllDocument read_conll_document(std::istream& in, const ReadOptions& options) {
  return read_document(in, options, 0);
}

LabeledCorpus to_labeled(const ConllDocument& doc, int word_column, int tag_column,
                         const std::string& source_name) {
  if (word_column < 0) throw Error(ErrorCode::kUsage, "word column must be non-negative");
  LabeledCorpus corpus;
  corpus.sentences.reserve(doc.sentences.size());
  const auto need = static_cast<std::size_t>(std::max(word_column, tag_column)) + 1;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    Sentence sentence;
    sentence.reserve(doc.sentences[s].size());
    for (std::size_t t = 0; t < doc.sentences[s].size(); ++t) {
      const auto& fields = doc.sentences[s][t];
      if (fields.size() < need) {
        throw Error(ErrorCode::kFormat, source_name + ": sentence " + std::to_string(s + 1) + ", token " +
                                            std::to_string(t + 1) + ": missing column " +
                                            std::to_string(need - 1));
      }
      Token token;
      token.word = fields[word_column];
      if (tag_column >= 0) token.label = fields[tag_column];
      sentence.push_back(std::move(token));
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

LabeledCorpus read_conll(std::istream& in, int word_column, int tag_column, const ReadOptions& options) {
  const auto need = static_cast<std::size_t>(std::max(word_column, tag_column)) + 1;
  return to_labeled(read_document(in, options, need), word_column, tag_column, options.source_name);
}

LabeledCorpus read_conll_file(const std::string& path, int word_column, int tag_column,
                              const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus: " + path);
  ReadOptions named = options;
  named.source_name = path;
  return read_conll(in, word_column, tag_column, named);
}

void write_conll(const ConllDocument& doc, std::ostream& out) {
  for (const auto& sentence : doc.sentences) {
    for (const auto& fields : sentence) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (c) out << ' ';
        out << fields[c];
      }
      out << '\n';
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write_conll: write failed");
}

void write_conll(const LabeledCorpus& corpus, std::ostream& out) {
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence) {
      out << token.word;
      if (!token.label.empty()) out << ' ' << token.label;
      out << '\n';
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write_conll: write failed");
}

TagMapping read_tag_mapping(std::istream& in) {
  TagMapping mapping;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (line.empty() || (line[0] == '#' && tab == std::string::npos)) continue;
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(ErrorCode::kFormat, "mapping line " + std::to_string(line_no) + ": expected source<TAB>target");
    }
    mapping[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return mapping;
}

TagMapping read_tag_mapping_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mapping: " + path);
  return read_tag_mapping(in);
}

LabeledCorpus apply_mapping(const LabeledCorpus& corpus, const TagMapping& mapping) {
  LabeledCorpus out = corpus;
  std::set<std::string> missing;
  for (auto& sentence : out.sentences) {
    for (auto& token : sentence) {
      auto it = mapping.find(token.label);
      if (it == mapping.end()) {
        missing.insert(token.label);
      } else {
        token.label = it->second;
      }
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& tag : missing) list += (list.empty() ? "" : ", ") + tag;
    throw Error(ErrorCode::kUnknownTag, "tags absent from mapping: " + list);
  }
  return out;
}

std::vector<std::vector<bool>> mark_known(const LabeledCorpus& corpus, const Vocabulary& vocabulary) {
  std::vector<std::vector<bool>> known;
  known.reserve(corpus.sentences.size());
  for (const auto& sentence : corpus.sentences) {
    std::vector<bool> bits;
    bits.reserve(sentence.size());
    for (const auto& token : sentence) bits.push_back(vocabulary.contains(token.word));
    known.push_back(std::move(bits));
  }
  return known;
}

}  // namespace pmctag
