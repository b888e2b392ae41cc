#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agentrec {

// Closed set of failure kinds surfaced by the library. Each module throws
// agentrec::Error with one of these codes; callers branch on code(), never
// on message text.
enum class ErrorCode {
  // core-domain
  kEmptyQuery,
  kUnsupportedMedia,
  kInvalidArgument,
  // llm-gateway
  kRateLimited,
  kTransportError,
  kProviderError,
  kScriptExhausted,
  kScriptMismatch,
  kCapabilityError,
  // tool-system
  kDuplicateTool,
  kNotFound,
  kNoFixture,
  kNonHtmlContent,
  kUnknownTool,
  kMalformedArgs,
  kRegistryFrozen,
  // recommendation-agents
  kEmptyRecommendations,
  kEmptySummary,
  kAllAgentsFailed,
  kUnknownFollowup,
  // profile-store
  kStorageError,
  kUnknownUser,
  // ranking-metrics
  kNoRelevantItems,
  kEmptyQuerySet,
  // eval-harness
  kParseError,
  kDuplicateRecord,
  kSchemaViolation,
  kMissingOutput,
  kEmptyRows,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agentrec
