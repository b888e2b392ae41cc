#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "agentrec/error.hpp"
#include "agentrec/llm/gateway.hpp"

namespace agentrec::llm {

// A non-retryable failure to replay (transport drop or provider HTTP error).
struct ScriptedFailure {
  ErrorCode code = ErrorCode::kTransportError;
  int status = 0;
  std::string body;
  bool operator==(const ScriptedFailure&) const = default;
};

struct ScriptEntry {
  std::optional<std::string> expected_request_digest;
  std::variant<ChatResponse, RateLimitSignal, ScriptedFailure> reply;
  bool operator==(const ScriptEntry&) const = default;
};

struct ProviderScript {
  std::vector<ScriptEntry> entries;
};

// Replays a script in order. Calls are serialized, so concurrent callers
// observe a total order over entries.
class ScriptedProvider final : public Provider {
 public:
  ScriptedProvider(ProviderScript script, bool multimodal, std::string name = "scripted");

  ProviderReply send(const ChatRequest& request) override;
  bool supports_multimodal() const override { return multimodal_; }
  std::string name() const override { return name_; }

  std::size_t calls() const;
  std::size_t remaining() const;
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  ProviderScript script_;
  std::size_t cursor_ = 0;
  std::vector<ChatRequest> seen_;
  bool multimodal_;
  std::string name_;
};

std::shared_ptr<ScriptedProvider> make_scripted_provider(ProviderScript script,
                                                         bool multimodal = false,
                                                         std::string name = "scripted");

// Script fixture JSON: an array of entries, each one of
//   {"expected_request_digest"?: hex, "response": {text, finish_reason, usage, latency_ms}}
//   {"expected_request_digest"?: hex, "rate_limit": {"retry_after_ms"?: n, "detail"?: s}}
//   {"expected_request_digest"?: hex, "error": {"kind": "transport"|"provider", "status", "body"}}
ProviderScript script_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProviderScript& script);
ProviderScript load_script(const std::filesystem::path& path);

// Convenience builders for tests and fixtures.
ScriptEntry reply_text(std::string text);
ScriptEntry rate_limit();

}  // namespace agentrec::llm
