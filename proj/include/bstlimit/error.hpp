#pragma once

#include <stdexcept>
#include <string>

namespace bstlimit {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode : int {
  DepthOverflow = 1,
  RootHasNoParent,
  CommonPrefixExceedsCap,
  NotExternal,
  NotInTree,
  ParseError,
  DuplicateKey,
  InvalidParameter,
  TooLarge,
  InsufficientSamples,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace bstlimit
