#pragma once

#include <stdexcept>
#include <string>

namespace pitchstyle {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kMalformedHeader,
  kUnsupportedFormat,
  kTruncatedData,
  kSchema,
  kShapeMismatch,
  kDiverged,
};

const char* to_string(ErrorKind kind);

// Every failure the library reports carries a kind so callers (and the CLI)
// can tell bad input apart from IO trouble without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace pitchstyle
