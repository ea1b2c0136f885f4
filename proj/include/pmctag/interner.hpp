#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pmctag {

using LabelId = std::uint32_t;
using WordId = std::uint32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

// Append-only bijection between strings and dense ids 0..size()-1, assigned in
// order of first insertion. Existing ids never change.
template <typename Tag>
class Interner {
 public:
  using Id = std::uint32_t;

  Interner() = default;
  explicit Interner(std::vector<std::string> items) {
    for (auto& s : items) intern(s);
  }

  Id intern(std::string_view s) {
    if (auto it = index_.find(s); it != index_.end()) return it->second;
    const auto id = static_cast<Id>(items_.size());
    items_.emplace_back(s);
    index_.emplace(items_.back(), id);
    return id;
  }

  std::optional<Id> find(std::string_view s) const {
    if (auto it = index_.find(s); it != index_.end()) return it->second;
    return std::nullopt;
  }

  bool contains(std::string_view s) const { return index_.find(s) != index_.end(); }

  const std::string& at(Id id) const { return items_.at(id); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<std::string>& items() const { return items_; }

  friend bool operator==(const Interner& a, const Interner& b) { return a.items_ == b.items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, Id, StringHash, std::equal_to<>> index_;
};

struct LabelTag {};
struct WordTag {};

using LabelAlphabet = Interner<LabelTag>;
using Vocabulary = Interner<WordTag>;

}  // namespace pmctag
