#include "agentrec/error.hpp"

namespace agentrec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kUnsupportedMedia: return "UnsupportedMedia";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kScriptExhausted: return "ScriptExhausted";
    case ErrorCode::kScriptMismatch: return "ScriptMismatch";
    case ErrorCode::kCapabilityError: return "CapabilityError";
    case ErrorCode::kDuplicateTool: return "DuplicateTool";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNoFixture: return "NoFixture";
    case ErrorCode::kNonHtmlContent: return "NonHtmlContent";
    case ErrorCode::kUnknownTool: return "UnknownTool";
    case ErrorCode::kMalformedArgs: return "MalformedArgs";
    case ErrorCode::kRegistryFrozen: return "RegistryFrozen";
    case ErrorCode::kEmptyRecommendations: return "EmptyRecommendations";
    case ErrorCode::kEmptySummary: return "EmptySummary";
    case ErrorCode::kAllAgentsFailed: return "AllAgentsFailed";
    case ErrorCode::kUnknownFollowup: return "UnknownFollowup";
    case ErrorCode::kStorageError: return "StorageError";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kNoRelevantItems: return "NoRelevantItems";
    case ErrorCode::kEmptyQuerySet: return "EmptyQuerySet";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateRecord: return "DuplicateRecord";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kMissingOutput: return "MissingOutput";
    case ErrorCode::kEmptyRows: return "EmptyRows";
  }
  return "Unknown";
}

}  // namespace agentrec
