#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pmctag {

enum class ErrorCode {
  kEmptySupport,
  kEmptyCorpus,
  kEmptySentence,
  kEmptyToken,
  kDeadEnd,
  kFormat,
  kUnknownTag,
  kShape,
  kCorruptModel,
  kUnsupportedVersion,
  kIo,
  kUsage,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; callers branch on
// code() rather than on the dynamic type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when every label at position `step` receives zero mass.
class DeadEndError : public Error {
 public:
  DeadEndError(std::size_t step, const std::string& what)
      : Error(ErrorCode::kDeadEnd, what), step_(step) {}

  // 0-based position in the sentence whose forward mass vanished.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace pmctag
