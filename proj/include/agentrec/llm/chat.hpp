#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "agentrec/core/domain.hpp"
#include "agentrec/tools/tool_spec.hpp"
#include "agentrec/util/clock.hpp"

namespace agentrec::llm {

enum class Role { kSystem, kUser, kAssistant, kTool };

std::string_view to_string(Role r);
Role parse_role(std::string_view s);

struct TextPart {
  std::string text;
  bool operator==(const TextPart&) const = default;
};

struct ImagePart {
  core::ImageAttachment image;
  bool operator==(const ImagePart&) const = default;
};

using Part = std::variant<TextPart, ImagePart>;

struct Message {
  Role role = Role::kUser;
  std::vector<Part> parts;

  static Message text(Role role, std::string body);
  // Concatenation of all text parts, separated by newlines.
  std::string joined_text() const;
  bool has_image() const;
  bool operator==(const Message&) const = default;
};

inline constexpr double kDefaultTemperature = 0.2;
inline constexpr int kDefaultMaxTokens = 1024;

struct ChatRequest {
  std::string model_id;
  std::vector<Message> messages;
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;
  std::optional<std::vector<tools::ToolSpec>> tool_specs;

  bool has_image() const;
  bool operator==(const ChatRequest&) const = default;
};

// Throws Error(kInvalidArgument) on any violated request invariant.
void validate(const ChatRequest& request);

enum class FinishReason { kStop, kLength, kToolCall, kError };

std::string_view to_string(FinishReason f);
FinishReason parse_finish_reason(std::string_view s);

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  bool operator==(const Usage&) const = default;
};

struct ChatResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::kStop;
  Usage usage;
  Millis latency{0};

  bool operator==(const ChatResponse&) const = default;
};

// Provider-side "slow down" answer (HTTP 429 or an equivalent error code).
struct RateLimitSignal {
  std::optional<Millis> retry_after;
  std::string detail;
  bool operator==(const RateLimitSignal&) const = default;
};

using ProviderReply = std::variant<ChatResponse, RateLimitSignal>;

// Canonical JSON of a request; image bytes base64. Stable across runs, so
// its SHA-256 serves as the request digest for scripted-provider guards.
nlohmann::json to_json(const ChatRequest& request);
ChatRequest request_from_json(const nlohmann::json& j);
std::string request_digest(const ChatRequest& request);

nlohmann::json to_json(const ChatResponse& response);
ChatResponse response_from_json(const nlohmann::json& j);

}  // namespace agentrec::llm
