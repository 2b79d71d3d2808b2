#include "tcurator/error.hpp"

namespace tcurator {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDegree: return "InvalidDegree";
    case ErrorCode::OverlappingPartition: return "OverlappingPartition";
    case ErrorCode::FileNotReadable: return "FileNotReadable";
    case ErrorCode::NoQueryParameter: return "NoQueryParameter";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidKnowledgeBase: return "InvalidKnowledgeBase";
    case ErrorCode::TrustedExceedsInput: return "TrustedExceedsInput";
    case ErrorCode::BrokenChain: return "BrokenChain";
    case ErrorCode::WriteFailure: return "WriteFailure";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::MissingDependency: return "MissingDependency";
    case ErrorCode::StageFailure: return "StageFailure";
    case ErrorCode::MissingCheckpoint: return "MissingCheckpoint";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

}  // namespace tcurator
