#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ssd {

enum class ErrorCode {
  kInvalidDimension,
  kInvalidParameter,
  kZeroColumn,
  kNumericDivergence,
  kStepSearchFailure,
  kDegenerateDictionary,
  kParse,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library. `index` carries the offending column
// for kZeroColumn and the iteration for kNumericDivergence.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace ssd
