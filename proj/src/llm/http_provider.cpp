#include "agentrec/llm/http_provider.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "agentrec/error.hpp"
#include "agentrec/util/digest.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::llm {

using nlohmann::json;

namespace {

std::string mime_of(core::MediaType t) { return "image/" + std::string(core::to_string(t)); }

std::string data_url(const core::ImageAttachment& img) {
  return "data:" + mime_of(img.media_type) + ";base64," + util::base64_encode(img.bytes);
}

bool looks_like_secret(const std::string& key) {
  const std::string k = util::to_lower_ascii(key);
  return k == "api_key" || k == "apikey" || k == "token" || k == "secret" || k == "password" ||
         k == "authorization";
}

WireFormat parse_format(const std::string& s) {
  if (s == "openai" || s == "groq") return WireFormat::kOpenAiChat;
  if (s == "gemini") return WireFormat::kGemini;
  throw Error(ErrorCode::kInvalidArgument, "unknown provider format: " + s);
}

std::optional<Millis> retry_after(const net::HttpResponse& r) {
  auto it = r.headers.find("retry-after");
  if (it == r.headers.end()) return std::nullopt;
  long seconds = 0;
  const auto& v = it->second;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), seconds);
  if (ec != std::errc{}) return std::nullopt;
  return Millis{seconds * 1000};
}

json parse_body(const net::HttpResponse& r) {
  try {
    return json::parse(r.body);
  } catch (const json::exception&) {
    return json();
  }
}

void ensure_success(const net::HttpResponse& r) {
  if (r.status < 200 || r.status >= 300) {
    throw Error(ErrorCode::kProviderError,
                "provider returned HTTP " + std::to_string(r.status) + ": " + r.body);
  }
}

}  // namespace

const ProviderConfig& GatewayConfig::for_agent(const std::string& agent_id) const {
  if (auto it = providers.find(agent_id); it != providers.end()) return it->second;
  if (auto it = providers.find("default"); it != providers.end()) return it->second;
  throw Error(ErrorCode::kNotFound, "no provider configured for agent " + agent_id);
}

GatewayConfig gateway_config_from_json(const json& j) {
  GatewayConfig cfg;
  for (const auto& [name, p] : j.at("providers").items()) {
    for (const auto& [key, value] : p.items()) {
      if (looks_like_secret(key)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "credentials must not be stored in config (key '" + key +
                        "'); use api_key_env");
      }
    }
    ProviderConfig c;
    c.format = parse_format(p.value("format", "openai"));
    c.base_url = p.at("base_url").get<std::string>();
    c.model_id = p.at("model_id").get<std::string>();
    c.api_key_env = p.value("api_key_env", "");
    c.timeout_ms = p.value("timeout_ms", 30000);
    c.multimodal = p.value("multimodal", false);
    net::parse_url(c.base_url);
    cfg.providers[name] = c;
  }
  return cfg;
}

GatewayConfig load_gateway_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open provider config " + path.string());
  try {
    return gateway_config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "bad provider config: " + std::string(e.what()));
  }
}

json to_openai_body(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    // Observations travel as user turns: the text tool grammar carries no
    // tool_call ids for the native "tool" role.
    const std::string role = m.role == Role::kTool ? "user" : std::string(to_string(m.role));
    if (!m.has_image()) {
      messages.push_back(json{{"role", role}, {"content", m.joined_text()}});
      continue;
    }
    json content = json::array();
    for (const auto& p : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&p)) {
        content.push_back(json{{"type", "text"}, {"text", t->text}});
      } else {
        content.push_back(json{{"type", "image_url"},
                               {"image_url", {{"url", data_url(std::get<ImagePart>(p).image)}}}});
      }
    }
    messages.push_back(json{{"role", role}, {"content", content}});
  }
  return json{{"model", request.model_id},
              {"messages", messages},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens}};
}

json to_gemini_body(const ChatRequest& request) {
  json contents = json::array();
  std::string system;
  for (const auto& m : request.messages) {
    if (m.role == Role::kSystem) {
      if (!system.empty()) system += "\n";
      system += m.joined_text();
      continue;
    }
    json parts = json::array();
    for (const auto& p : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&p)) {
        parts.push_back(json{{"text", t->text}});
      } else {
        const auto& img = std::get<ImagePart>(p).image;
        parts.push_back(json{{"inline_data",
                              {{"mime_type", mime_of(img.media_type)},
                               {"data", util::base64_encode(img.bytes)}}}});
      }
    }
    contents.push_back(
        json{{"role", m.role == Role::kAssistant ? "model" : "user"}, {"parts", parts}});
  }
  json body{{"contents", contents},
            {"generationConfig",
             {{"temperature", request.temperature}, {"maxOutputTokens", request.max_tokens}}}};
  if (!system.empty()) body["systemInstruction"] = json{{"parts", {{{"text", system}}}}};
  return body;
}

ProviderReply parse_openai_response(const net::HttpResponse& r) {
  const json body = parse_body(r);
  const bool rate_code = body.is_object() && body.contains("error") &&
                         body["error"].is_object() &&
                         body["error"].value("code", "") == "rate_limit_exceeded";
  if (r.status == 429 || rate_code) {
    std::string detail;
    if (body.is_object() && body.contains("error") && body["error"].is_object()) {
      detail = body["error"].value("message", "");
    }
    return RateLimitSignal{retry_after(r), detail};
  }
  ensure_success(r);
  try {
    const auto& choice = body.at("choices").at(0);
    ChatResponse out;
    const auto& content = choice.at("message").at("content");
    out.text = content.is_null() ? "" : content.get<std::string>();
    const std::string finish = choice.value("finish_reason", "stop");
    out.finish_reason = finish == "length"       ? FinishReason::kLength
                        : finish == "tool_calls" ? FinishReason::kToolCall
                        : finish == "stop"       ? FinishReason::kStop
                                                 : FinishReason::kError;
    if (body.contains("usage")) {
      out.usage.prompt_tokens = body["usage"].value("prompt_tokens", 0);
      out.usage.completion_tokens = body["usage"].value("completion_tokens", 0);
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderError, "malformed chat completion: " + std::string(e.what()));
  }
}

ProviderReply parse_gemini_response(const net::HttpResponse& r) {
  const json body = parse_body(r);
  const bool exhausted = body.is_object() && body.contains("error") &&
                         body["error"].is_object() &&
                         body["error"].value("status", "") == "RESOURCE_EXHAUSTED";
  if (r.status == 429 || exhausted) {
    std::string detail;
    if (body.is_object() && body.contains("error") && body["error"].is_object()) {
      detail = body["error"].value("message", "");
    }
    return RateLimitSignal{retry_after(r), detail};
  }
  ensure_success(r);
  try {
    const auto& cand = body.at("candidates").at(0);
    ChatResponse out;
    for (const auto& p : cand.at("content").at("parts")) {
      if (p.contains("text")) out.text += p.at("text").get<std::string>();
    }
    const std::string finish = cand.value("finishReason", "STOP");
    out.finish_reason = finish == "STOP"         ? FinishReason::kStop
                        : finish == "MAX_TOKENS" ? FinishReason::kLength
                                                 : FinishReason::kError;
    if (body.contains("usageMetadata")) {
      out.usage.prompt_tokens = body["usageMetadata"].value("promptTokenCount", 0);
      out.usage.completion_tokens = body["usageMetadata"].value("candidatesTokenCount", 0);
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderError, "malformed Gemini response: " + std::string(e.what()));
  }
}

HttpProvider::HttpProvider(ProviderConfig config, std::shared_ptr<net::HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) transport_ = net::make_live_transport(config_.timeout_ms);
}

std::string HttpProvider::name() const {
  return (config_.format == WireFormat::kGemini ? "gemini:" : "openai:") + config_.model_id;
}

std::string HttpProvider::credential() const {
  if (config_.api_key_env.empty()) return {};
  const char* v = std::getenv(config_.api_key_env.c_str());
  if (!v || !*v) {
    throw Error(ErrorCode::kTransportError,
                "credential environment variable " + config_.api_key_env + " is not set");
  }
  return v;
}

ProviderReply HttpProvider::send(const ChatRequest& request) {
  std::string base = config_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const std::string key = credential();
  net::Headers headers;
  if (config_.format == WireFormat::kOpenAiChat) {
    ChatRequest r = request;
    if (r.model_id.empty()) r.model_id = config_.model_id;
    if (!key.empty()) headers["Authorization"] = "Bearer " + key;
    const auto resp = transport_->post(base + "/chat/completions", to_openai_body(r).dump(),
                                       "application/json", headers);
    return parse_openai_response(resp);
  }
  const std::string model = request.model_id.empty() ? config_.model_id : request.model_id;
  if (!key.empty()) headers["x-goog-api-key"] = key;
  const auto resp = transport_->post(base + "/models/" + model + ":generateContent",
                                     to_gemini_body(request).dump(), "application/json", headers);
  return parse_gemini_response(resp);
}

std::shared_ptr<Provider> make_http_provider(const ProviderConfig& config,
                                             std::shared_ptr<net::HttpTransport> transport) {
  return std::make_shared<HttpProvider>(config, std::move(transport));
}

}  // namespace agentrec::llm
