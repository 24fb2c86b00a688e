#include "bstlimit/error.hpp"

namespace bstlimit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DepthOverflow: return "DepthOverflow";
    case ErrorCode::RootHasNoParent: return "RootHasNoParent";
    case ErrorCode::CommonPrefixExceedsCap: return "CommonPrefixExceedsCap";
    case ErrorCode::NotExternal: return "NotExternal";
    case ErrorCode::NotInTree: return "NotInTree";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace bstlimit
