#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "agentrec/llm/gateway.hpp"
#include "agentrec/util/http.hpp"

namespace agentrec::llm {

enum class WireFormat {
  kOpenAiChat,  // /chat/completions (Groq and other OpenAI-compatible hosts)
  kGemini,      // /models/{model}:generateContent
};

// Live endpoint configuration. The credential itself never lives in config:
// only the name of the environment variable that holds it.
struct ProviderConfig {
  WireFormat format = WireFormat::kOpenAiChat;
  std::string base_url;
  std::string model_id;
  std::string api_key_env;
  int timeout_ms = 30000;
  bool multimodal = false;
};

// {"providers": {"default": {...}, "<agent_id>": {...}}}, each entry:
//   {"format": "openai"|"gemini", "base_url", "model_id", "api_key_env",
//    "timeout_ms"?, "multimodal"?}
// Rejects any key named like a secret ("api_key", "token", ...).
struct GatewayConfig {
  std::map<std::string, ProviderConfig> providers;

  // Entry for agent_id, falling back to "default". Throws kNotFound.
  const ProviderConfig& for_agent(const std::string& agent_id) const;
};

GatewayConfig gateway_config_from_json(const nlohmann::json& j);
GatewayConfig load_gateway_config(const std::filesystem::path& path);

// Wire-format adapters. Pure functions so both shapes are testable offline.
nlohmann::json to_openai_body(const ChatRequest& request);
nlohmann::json to_gemini_body(const ChatRequest& request);
// Map an HTTP response to a reply. 429 (or a rate-limit error code in the
// body) becomes RateLimitSignal; other non-2xx throw Error(kProviderError).
ProviderReply parse_openai_response(const net::HttpResponse& response);
ProviderReply parse_gemini_response(const net::HttpResponse& response);

class HttpProvider final : public Provider {
 public:
  HttpProvider(ProviderConfig config, std::shared_ptr<net::HttpTransport> transport);

  ProviderReply send(const ChatRequest& request) override;
  bool supports_multimodal() const override { return config_.multimodal; }
  std::string name() const override;

 private:
  std::string credential() const;

  ProviderConfig config_;
  std::shared_ptr<net::HttpTransport> transport_;
};

std::shared_ptr<Provider> make_http_provider(const ProviderConfig& config,
                                             std::shared_ptr<net::HttpTransport> transport = {});

}  // namespace agentrec::llm
