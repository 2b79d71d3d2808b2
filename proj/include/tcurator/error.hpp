#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcurator {

enum class ErrorCode {
  InvalidArgument,
  InvalidDegree,
  OverlappingPartition,
  FileNotReadable,
  NoQueryParameter,
  InvalidUtf8,
  EmptyQuery,
  InvalidRange,
  InvalidThreshold,
  InvalidKnowledgeBase,
  TrustedExceedsInput,
  BrokenChain,
  WriteFailure,
  InvalidConfig,
  UnknownOperator,
  MissingDependency,
  StageFailure,
  MissingCheckpoint,
  StorageFailure,
  SchemaMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the ErrorCode values
/// above so callers (CLI exit codes, HTTP status mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace tcurator
