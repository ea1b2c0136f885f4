#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "pmctag/interner.hpp"

namespace pmctag {

struct Token {
  std::string word;
  std::string label;
  friend bool operator==(const Token&, const Token&) = default;
};

using Sentence = std::vector<Token>;

enum class Split { kUnspecified, kTrain, kTest };

struct LabeledCorpus {
  std::vector<Sentence> sentences;
  Split split = Split::kUnspecified;

  std::size_t token_count() const;
  friend bool operator==(const LabeledCorpus& a, const LabeledCorpus& b) {
    return a.sentences == b.sentences;
  }
};

// Raw column view of a CoNLL file: sentences of token lines, each a list of
// whitespace-separated fields.
struct ConllDocument {
  using Line = std::vector<std::string>;
  std::vector<std::vector<Line>> sentences;
  friend bool operator==(const ConllDocument&, const ConllDocument&) = default;
};

struct ReadOptions {
  // Token lines whose first field matches are dropped together with the
  // sentence break they imply (e.g. "-DOCSTART-").
  std::optional<std::regex> skip_pattern;
  std::size_t skip_column = 0;
  std::string source_name = "<stream>";
};

// Throws kFormat (with line number) on ragged rows.
ConllDocument read_conll_document(std::istream& in, const ReadOptions& options = {});

// tag_column < 0 reads words only; labels are left empty. Throws kFormat when
// a requested column is missing.
LabeledCorpus to_labeled(const ConllDocument& doc, int word_column, int tag_column,
                         const std::string& source_name = "<stream>");

LabeledCorpus read_conll(std::istream& in, int word_column, int tag_column,
                         const ReadOptions& options = {});
LabeledCorpus read_conll_file(const std::string& path, int word_column, int tag_column,
                              const ReadOptions& options = {});

// Single-space separated fields, blank line after each sentence.
void write_conll(const ConllDocument& doc, std::ostream& out);
void write_conll(const LabeledCorpus& corpus, std::ostream& out);

using TagMapping = std::map<std::string, std::string>;

// "source<TAB>target" per line. Blank lines and '#' lines without a tab are
// comments, so "#" itself can still be mapped.
TagMapping read_tag_mapping(std::istream& in);
TagMapping read_tag_mapping_file(const std::string& path);

// Throws kUnknownTag listing every unmapped tag.
LabeledCorpus apply_mapping(const LabeledCorpus& corpus, const TagMapping& mapping);

// Per sentence, per token: 1 iff the word is in the vocabulary.
std::vector<std::vector<bool>> mark_known(const LabeledCorpus& corpus, const Vocabulary& vocabulary);

}  // namespace pmctag
